#pragma once

#include <cstdint>
#include <string>

#include "oeecast/series.hpp"

namespace oeecast {

/// Shape of a surrogate hourly OEE series: daily, shift and weekly cycles,
/// an AR(1) disturbance, and idle spells that pin the value to the floor.
struct SyntheticProfile {
  std::size_t length = 648;
  double level = 34.0;
  double shift_amplitude = 8.0;   // period 8
  double daily_amplitude = 12.0;  // period 24
  double weekly_amplitude = 6.0;  // period 168
  double ar = 0.6;
  double noise_sd = 9.0;
  double idle_start = 0.04;  // hourly chance of entering an idle spell
  double idle_stop = 0.2;    // hourly chance of leaving it
  std::uint64_t seed = 0;
  std::string name = "synthetic";
};

/// Values clamped to [1, 60], starting at 2023-01-02T00:00.
TimeSeries synthetic_oee(const SyntheticProfile& profile);

/// Surrogates sized like the three published sets: "GH2" (648 points),
/// "H2" (683) and "GM2" (672).
SyntheticProfile surrogate_profile(const std::string& id, std::uint64_t seed = 0);

}  // namespace oeecast
