#pragma once

#include <span>
#include <string>
#include <vector>

#include "oeecast/series.hpp"

namespace oeecast {

struct ForecastResult {
  std::size_t origin_index = 0;  // index of the last observation used
  std::size_t horizon = 0;
  std::vector<double> values;
  std::string model_label;
};

// Additive-error, additive-trend, non-seasonal exponential smoothing.
struct EtsFit {
  double alpha = 0.5;  // level smoothing, (0, 1)
  double beta = 0.0;   // trend smoothing, [0, 1)
  double level = 0.0;
  double slope = 0.0;
  double sse = 0.0;
  std::size_t origin_index = 0;
};

/// Grid search (step 0.01) over (alpha, beta) minimising one-step SSE,
/// refined by coordinate descent. The initial state comes from a
/// least-squares line through the first ten points.
EtsFit ets_fit(std::span<const double> y);
inline EtsFit ets_fit(const TimeSeries& ts) { return ets_fit(ts.values()); }

/// Runs the smoothing recursions with fixed (alpha, beta) to get the end state
/// for a new series.
EtsFit ets_filter(std::span<const double> y, double alpha, double beta);

/// In-sample one-step predictions, one per observation.
std::vector<double> ets_one_step_predictions(std::span<const double> y, double alpha, double beta);

ForecastResult ets_forecast(const EtsFit& fit, std::size_t horizon);

/// Repeats the last complete cycle.
ForecastResult seasonal_naive_forecast(std::span<const double> seasonal, int period,
                                       std::size_t horizon);
inline ForecastResult seasonal_naive_forecast(const TimeSeries& ts, int period,
                                              std::size_t horizon) {
  return seasonal_naive_forecast(ts.values(), period, horizon);
}

inline constexpr double kOeeFloor = 1.0;
inline constexpr double kOeeCeiling = 60.0;

/// Element-wise sum of component forecasts clamped to [1, 60].
ForecastResult recombine_forecasts(const ForecastResult& trend,
                                   const std::vector<ForecastResult>& seasonals,
                                   const ForecastResult& residual);

}  // namespace oeecast
