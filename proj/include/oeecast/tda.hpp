#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oeecast/feature_matrix.hpp"
#include "oeecast/series.hpp"
#include "oeecast/stat_features.hpp"

namespace oeecast::tda {

struct PointCloud {
  std::vector<std::vector<double>> points;
  std::size_t size() const noexcept { return points.size(); }
  std::size_t dim() const noexcept { return points.empty() ? 0 : points.front().size(); }
};

struct PersistencePair {
  double birth = 0.0;
  double death = 0.0;
  int dim = 0;
  double lifetime() const noexcept { return death - birth; }
};

/// H0 holds one pair per point; the essential class dies at max_filtration
/// (the largest pairwise distance). H1 pairs of zero lifetime are omitted.
struct PersistenceDiagram {
  std::vector<PersistencePair> pairs;
  double max_filtration = 0.0;

  std::vector<PersistencePair> restricted(int dim) const;
};

struct TdaParams {
  std::size_t window = 24;
  std::size_t stride = 1;
  int delay = 8;
  int embed_dim = 3;
  std::vector<int> homology_dims{0, 1};
  int betti_bins = 10;
  int landscape_layers = 2;
  int landscape_samples = 10;
  double silhouette_power = 1.0;
  double wasserstein_order = 2.0;
  double heat_sigma = 0.1;  // in scaled units, i.e. 0.1 x the unit diagram range
  /// Divisor applied to every diagram. Unset: the maximum death over all
  /// windows of the input (callers that must stay leak-free pass the
  /// training-span value from diagram_scale()).
  std::optional<double> scale;

  void validate() const;
};

PointCloud takens_embed(std::span<const double> x, int delay, int dim);

/// First local minimum of the binned average mutual information over delays
/// 1..max_delay (plateaus count as minima); falls back to the first acf zero
/// crossing, then to max_delay.
int estimate_delay(std::span<const double> x, int max_delay);

/// Smallest dimension whose false-nearest-neighbour fraction is below 5%
/// (distance-ratio test with tolerance rtol plus the attractor-size test),
/// capped at max_dim.
int estimate_dim_fnn(std::span<const double> x, int delay, int max_dim, double rtol = 10.0);

PersistenceDiagram vr_persistence(const PointCloud& cloud, int max_hom_dim = 1);

PersistenceDiagram scale_diagram(const PersistenceDiagram& d, double scale);

EntropyResult persistence_entropy(const PersistenceDiagram& d, int dim);
double bottleneck_amplitude(const PersistenceDiagram& d, int dim);
double wasserstein_amplitude(const PersistenceDiagram& d, int dim, double p = 2.0);

/// Evaluation grids: Betti curves use bin midpoints; landscapes, silhouettes
/// and the heat kernel use `samples` equally spaced points including both ends.
std::vector<double> betti_curve(const PersistenceDiagram& d, int dim, int bins,
                                std::pair<double, double> t_range = {0.0, 1.0});
std::vector<std::vector<double>> landscape(const PersistenceDiagram& d, int dim, int layers, int samples,
                                           std::pair<double, double> t_range = {0.0, 1.0});
/// (sum over layers of the trapezoidal integral of |lambda_k|^p)^(1/p).
double landscape_norm(const std::vector<std::vector<double>>& landscape_matrix, double p = 2.0,
                      std::pair<double, double> t_range = {0.0, 1.0});
std::vector<double> silhouette(const PersistenceDiagram& d, int dim, double alpha, int samples,
                               std::pair<double, double> t_range = {0.0, 1.0});
/// Trapezoidal L2 norm of the heat function sum_i (4 pi s^2)^(-1/2) exp(-(t - m_i)^2 / (4 s^2)),
/// m_i the pair midpoint.
double heat_kernel_norm(const PersistenceDiagram& d, int dim, double sigma, int samples,
                        std::pair<double, double> t_range = {0.0, 1.0});

struct LifetimeStats {
  double sum = 0, mean = 0, median = 0, variance = 0, std = 0, max = 0, min = 0;
  bool empty = true;
};
/// Population variance; all zeros (empty = true) for an empty restriction.
LifetimeStats lifetime_stats(const PersistenceDiagram& d, int dim);

/// Persistence diagram of one raw window (embed then Vietoris-Rips).
PersistenceDiagram window_diagram(std::span<const double> window, const TdaParams& params);

/// Maximum death over the diagrams of windows ending strictly before
/// `end_index` (all windows when end_index exceeds the series); 1 when that
/// maximum is zero.
double diagram_scale(std::span<const double> values, const TdaParams& params, std::size_t end_index);

std::vector<std::string> tda_feature_names(const TdaParams& params = {});
std::vector<double> tda_features_of_window(std::span<const double> window, const TdaParams& params,
                                           double scale);

FeatureMatrix extract_tda_features(std::span<const double> values, const TdaParams& params = {});
inline FeatureMatrix extract_tda_features(const TimeSeries& ts, const TdaParams& params = {}) {
  return extract_tda_features(ts.values(), params);
}

/// CSV rows birth,death,dim,window_index.
void save_diagrams_csv(const std::filesystem::path& path,
                       const std::vector<std::pair<std::size_t, PersistenceDiagram>>& diagrams);

}  // namespace oeecast::tda
