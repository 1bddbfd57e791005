#pragma once

#include <span>
#include <string>
#include <vector>

#include "oeecast/feature_matrix.hpp"
#include "oeecast/series.hpp"

namespace oeecast {

/// Entropy value; `degenerate` marks windows where the estimator is undefined
/// (zero tolerance, no matching templates, flat spectrum) and a convention
/// value was returned instead.
struct EntropyResult {
  double value = 0.0;
  bool degenerate = false;
};

/// Chebyshev-distance sample entropy. r < 0 selects 0.2 * population std.
/// When no (m+1)-template pairs match, the count is taken as 1.
EntropyResult sample_entropy(std::span<const double> x, int m = 2, double r = -1.0);
/// Pincus approximate entropy (self-matches counted). r < 0 selects 0.2 * std.
EntropyResult approximate_entropy(std::span<const double> x, int m = 2, double r = -1.0);
/// Bandt-Pompe ordinal-pattern entropy; normalized by ln(order!) when asked.
EntropyResult permutation_entropy(std::span<const double> x, int order = 3, int delay = 1,
                                  bool normalize = true);
/// Shannon entropy of the max-normalized periodogram histogram.
EntropyResult fourier_entropy(std::span<const double> x, int bins = 10);

/// Fixed, ordered statistical feature names (267 columns, prefix "stat.").
const std::vector<std::string>& stat_feature_names();

/// Features of a single window, in stat_feature_names() order. Non-finite
/// values are left as NaN for the matrix to impute.
std::vector<double> stat_features_of_window(std::span<const double> window);

/// One row per window; row_index is the window end position in `ts`.
FeatureMatrix extract_stat_features(const TimeSeries& ts, std::size_t window = 24,
                                    std::size_t stride = 1);
FeatureMatrix extract_stat_features(std::span<const double> values, std::size_t window = 24,
                                    std::size_t stride = 1);

}  // namespace oeecast
