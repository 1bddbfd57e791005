#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oeecast/feat_select.hpp"
#include "oeecast/forecasters.hpp"
#include "oeecast/sarimax.hpp"
#include "oeecast/series.hpp"
#include "oeecast/tda.hpp"

namespace oeecast {

enum class ModelKind { SeasonalNaive, EtsRaw, SarimaRaw, Decomposed };
enum class FeatureMode { None, Statistical, Topological, Both };
enum class SelectionMode { None, Rfe, RfePso };

std::string to_string(ModelKind m);
std::string to_string(FeatureMode m);
std::string to_string(SelectionMode m);
ModelKind parse_model_kind(const std::string& s);
FeatureMode parse_feature_mode(const std::string& s);
SelectionMode parse_selection_mode(const std::string& s);

struct PipelineConfig {
  std::filesystem::path dataset;
  std::string value_column = "oee";
  std::string timestamp_column;  // empty: auto-detect

  ModelKind model = ModelKind::Decomposed;
  FeatureMode feature_mode = FeatureMode::None;
  SelectionMode selection_mode = SelectionMode::None;
  sarimax::SarimaxSpec spec{4, 0, 0, 1, 0, 1, 8, 0};

  std::vector<int> periods{8, 24, 168};
  int decompose_passes = 2;
  std::size_t window = 24;
  std::size_t horizon = 4;
  double test_fraction = 0.2;
  std::size_t refit_interval = 24;
  std::uint64_t seed = 0;
  int naive_period = 24;
  std::size_t max_origins = 0;  // 0: every test origin

  double variance_threshold = 0.01;
  double rho_threshold = 0.9;
  double rfe_alpha = 0.05;
  std::size_t rfe_min_features = 3;
  PsoConfig pso;
  bool pso_use_stable_subset = false;  // Set 2 instead of Set 1
  tda::TdaParams tda;

  std::string label;  // empty: derived from model/feature/selection

  void validate() const;
  std::string model_label() const;
  /// Index of the first test observation.
  std::size_t split_index(std::size_t n) const;
};

struct EvaluationReport {
  std::string model_label;
  double mae = 0.0;
  double mape = 0.0;
  double cost_seconds = 0.0;
  std::size_t n_forecasts = 0;
  std::size_t n_origins = 0;
  std::size_t split_index = 0;
  std::size_t horizon = 0;
  std::vector<double> per_step_mae;
  std::vector<double> per_step_mape;
  double train_mae = 0.0;
  double train_mape = 0.0;
  int failed_fits = 0;
  std::vector<std::string> fit_failures;  // one message per failed fit
  std::vector<std::string> selected_columns;
  std::vector<SelectionReport> selection;
  std::vector<std::size_t> origins;
  std::vector<std::vector<double>> forecasts;  // one row per origin
  std::vector<std::vector<double>> actuals;

  nlohmann::json to_json() const;
  /// origin_index,target_index,timestamp,step,actual,predicted
  void save_forecasts_csv(const std::filesystem::path& path, const TimeSeries& ts) const;
};

/// history = y[0..t]; returns `horizon` forecasts for t+1..t+horizon.
using ForecastFn = std::function<std::vector<double>(std::span<const double> history, std::size_t horizon)>;

/// Rolling-origin harness: origins t = split_index-1 .. n-1-horizon, each
/// seeing only y[0..t]. Metrics are pooled over every (origin, step) pair.
EvaluationReport evaluate_forecaster(std::span<const double> y, std::size_t split_index, std::size_t horizon,
                                     const ForecastFn& fn, const std::string& label, std::size_t max_origins = 0);

EvaluationReport rolling_forecast(const PipelineConfig& cfg);
EvaluationReport rolling_forecast(const PipelineConfig& cfg, const TimeSeries& ts);

/// Forecast from the last observation with the configured model (selection
/// and fitting on the full history).
ForecastResult forecast_latest(const PipelineConfig& cfg, const TimeSeries& ts, std::size_t horizon);

struct SelectionOutcome {
  std::vector<std::string> columns;
  std::vector<SelectionReport> stages;
  double tda_scale = 1.0;
};

/// The pipeline's selection stages on the residual of the first
/// split_index(n) observations (the training span).
SelectionOutcome select_features(const PipelineConfig& cfg, const TimeSeries& ts);

/// The six comparison rows derived from a base configuration: seasonal-naive,
/// ETS and SARIMA on the raw series, then decomposed SARIMA and decomposed
/// SARIMAX with statistical or topological exogenous features.
std::vector<PipelineConfig> benchmark_configs(const PipelineConfig& base,
                                              SelectionMode statistical_selection = SelectionMode::None,
                                              SelectionMode topological_selection = SelectionMode::None);
/// Runs every row (concurrently) on the same series and split.
std::vector<EvaluationReport> benchmark(const std::vector<PipelineConfig>& rows, const TimeSeries& ts);
std::vector<EvaluationReport> benchmark(const std::vector<PipelineConfig>& rows);

/// Deterministic CSV (no timing columns) and a human-readable table.
std::string benchmark_csv(const std::vector<EvaluationReport>& reports);
std::string benchmark_table(const std::vector<EvaluationReport>& reports);

using FeatureBuilder = std::function<FeatureMatrix(std::span<const double>)>;

struct LeakageAuditResult {
  bool passed = true;
  bool row_index_ok = true;
  bool perturbation_ok = true;
  std::vector<std::string> violations;
};

/// Checks that `build(values)` has strictly increasing in-range row_index and
/// that perturbing values at positions >= p (for probe positions p at and
/// after split_index) leaves every row with row_index < p bit-identical.
LeakageAuditResult leakage_audit(std::span<const double> values, const FeatureBuilder& build,
                                 std::size_t split_index, std::uint64_t seed = 0);
/// Row-index sanity of an already built matrix.
bool leakage_audit(const FeatureMatrix& fm, std::size_t source_length);

/// Feature builder used by the pipeline for a feature mode, with a fixed
/// TDA diagram scale.
FeatureBuilder pipeline_feature_builder(const PipelineConfig& cfg, FeatureMode mode, double tda_scale);

/// Runs the pipeline on `ts` and on copies perturbed after each probe
/// position; returns false if any forecast at an origin before the probe
/// position changes.
bool forecast_perturbation_probe(const PipelineConfig& cfg, const TimeSeries& ts,
                                 const std::vector<std::size_t>& probe_positions, std::string* detail = nullptr);

}  // namespace oeecast
