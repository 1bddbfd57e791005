#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "oeecast/feature_matrix.hpp"
#include "oeecast/sarimax.hpp"

namespace oeecast {

struct DroppedColumn {
  std::string name;
  std::string reason;
};

/// One selection stage. kept and dropped partition the input columns.
struct SelectionReport {
  std::string stage;
  std::vector<std::string> input_columns;
  std::vector<std::string> kept_columns;
  std::vector<DroppedColumn> dropped_columns;
  std::map<std::string, double> metrics;

  nlohmann::json to_json() const;
};

/// Drops columns whose sample variance over the first `train_rows` rows
/// (all rows when 0) is below `threshold`.
std::pair<FeatureMatrix, SelectionReport> variance_filter(const FeatureMatrix& fm, double threshold = 0.01,
                                                          std::size_t train_rows = 0);

/// |Spearman rank correlation| of each column with the target.
std::vector<double> spearman_importance(const FeatureMatrix& fm, std::span<const double> target);

/// Greedy over pairs with |Pearson rho| > rho_threshold, strongest first; the
/// member with the smaller spearman_importance is dropped. Statistics use the
/// first target.size() rows.
std::pair<FeatureMatrix, SelectionReport> correlation_filter(const FeatureMatrix& fm,
                                                             std::span<const double> target,
                                                             double rho_threshold = 0.9);

/// Keeps the `max_columns` most important columns (stable on ties).
std::pair<FeatureMatrix, SelectionReport> cap_by_importance(const FeatureMatrix& fm,
                                                            std::span<const double> target,
                                                            std::size_t max_columns);

/// Removes columns until the z-scored design over the first `rows` rows
/// has condition number <= max_condition, dropping the last column of a
/// column-pivoted QR each time.
std::pair<FeatureMatrix, SelectionReport> prune_collinear(const FeatureMatrix& fm, std::size_t rows,
                                                          double max_condition = 1e8);

struct RfeResult {
  FeatureMatrix features;
  SelectionReport report;
  sarimax::SarimaxFit final_fit;
  int fits = 0;
};

/// Recursive elimination by exogenous p-values: while some p > alpha and at
/// least min_features columns remain, drop the worst ceil(10%) of the
/// offending columns and refit. `fm` rows align with `y`.
RfeResult rfe_sarimax(std::span<const double> y, const FeatureMatrix& fm, const sarimax::SarimaxSpec& spec,
                      double alpha = 0.05, std::size_t min_features = 3, const sarimax::FitOptions& options = {});

struct PsoConfig {
  int swarm_size = 40;
  int max_iterations = 300;
  double inertia = 0.7;
  double cognitive = 1.4;
  double social = 1.8;
  int runs = 5;
  int stability_threshold = 3;
  int stagnation_limit = 30;
  double velocity_clamp = 6.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PsoRun {
  std::vector<std::string> selected;
  double bic = 0.0;
  int iterations = 0;
  std::vector<double> gbest_history;  // gbest BIC after each iteration
};

struct PsoResult {
  std::vector<std::string> best_subset;    // Set 1
  std::vector<std::string> stable_subset;  // Set 2
  double best_bic = 0.0;
  double empty_bic = 0.0;  // no-exogenous reference model
  std::vector<PsoRun> per_run;
  std::size_t distinct_fits = 0;

  nlohmann::json to_json() const;
};

/// Binary PSO over column subsets minimising SARIMAX BIC.
PsoResult pso_bic(std::span<const double> y, const FeatureMatrix& fm, const sarimax::SarimaxSpec& spec,
                  const PsoConfig& cfg = {}, const sarimax::FitOptions& options = {});

/// {"columns": [...], "stages": [...]} for reproducible refits.
void save_manifest(const std::filesystem::path& path, const std::vector<std::string>& columns,
                   const std::vector<SelectionReport>& stages);
std::vector<std::string> load_manifest(const std::filesystem::path& path);

}  // namespace oeecast
