#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "oeecast/series.hpp"

namespace oeecast {

struct DecompositionResult {
  TimeSeries trend;
  std::map<int, TimeSeries> seasonal;  // period -> component
  TimeSeries residual;
  std::vector<int> periods;
};

/// Centered moving average. Even windows use the 2xN convention (half
/// weights at both ends); near the edges the window shrinks symmetrically.
std::vector<double> centered_moving_average(std::span<const double> x, int window);

/**
 * Iterative classical additive decomposition.
 *
 * Each pass visits the periods in ascending order: the series minus the
 * other seasonal estimates is detrended by a centered moving average of the
 * period's length, and the seasonal is set to the centered per-phase means of
 * that remainder. The final trend is a moving average (window = largest
 * period) of the deseasonalized series. The seasonals are then backfitted
 * against that trend until the residual has zero mean at every phase of
 * every period, and the residual closes the identity
 * input = trend + sum(seasonal) + residual.
 *
 * Requires length >= 2 * max(periods) and strictly increasing, nested periods.
 */
DecompositionResult decompose(const TimeSeries& ts,
                              const std::vector<int>& periods = {8, 24, 168},
                              int passes = 2);

TimeSeries reconstruct(const DecompositionResult& d);

/// One column per component, row-aligned with the input timestamps.
void save_decomposition_csv(const std::filesystem::path& path,
                            const DecompositionResult& d);

}  // namespace oeecast
