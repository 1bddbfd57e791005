#include "oeecast/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oeecast/errors.hpp"
#include "oeecast/forecasters.hpp"

namespace oeecast {

TimeSeries synthetic_oee(const SyntheticProfile& pr) {
  if (pr.length < 2) throw InvalidArgument("synthetic series needs at least two points");
  if (!(std::abs(pr.ar) < 1.0)) throw InvalidArgument("synthetic AR coefficient must lie in (-1, 1)");
  std::mt19937_64 rng(pr.seed);
  std::normal_distribution<double> noise(0.0, pr.noise_sd);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> v(pr.length);
  double e = 0.0;
  bool idle = false;
  for (std::size_t t = 0; t < pr.length; ++t) {
    const double h = static_cast<double>(t);
    e = pr.ar * e + noise(rng);
    idle = idle ? unit(rng) >= pr.idle_stop : unit(rng) < pr.idle_start;
    const double x = pr.level + pr.shift_amplitude * std::sin(two_pi * h / 8.0) +
                     pr.daily_amplitude * std::sin(two_pi * h / 24.0 + 0.7) +
                     pr.weekly_amplitude * std::sin(two_pi * h / 168.0) + e;
    v[t] = idle ? kOeeFloor : std::clamp(x, kOeeFloor, kOeeCeiling);
  }
  return TimeSeries(std::move(v), parse_hour("2023-01-02T00:00"), pr.name);
}

SyntheticProfile surrogate_profile(const std::string& id, std::uint64_t seed) {
  SyntheticProfile p;
  p.seed = seed;
  p.name = id;
  if (id == "GH2") {
    p.length = 648;
  } else if (id == "H2") {
    p.length = 683;
    p.level = 38.0;
    p.idle_start = 0.02;
  } else if (id == "GM2") {
    p.length = 672;
    p.level = 36.0;
    p.idle_start = 0.03;
  } else {
    throw InvalidArgument("unknown surrogate id '" + id + "' (GH2, H2, GM2)");
  }
  return p;
}

}  // namespace oeecast
