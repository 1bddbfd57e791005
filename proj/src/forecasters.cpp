#include "oeecast/forecasters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oeecast/errors.hpp"

namespace oeecast {

namespace {

constexpr std::size_t kInitPoints = 10;

struct State {
  double level;
  double slope;
};

// State one step before the first observation, so the first one-step
// prediction equals the fitted line at t = 0.
State initial_state(std::span<const double> y) {
  const std::size_t m = std::min(kInitPoints, y.size());
  double tbar = 0.0, ybar = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    tbar += static_cast<double>(t);
    ybar += y[t];
  }
  tbar /= static_cast<double>(m);
  ybar /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    sxy += (static_cast<double>(t) - tbar) * (y[t] - ybar);
    sxx += (static_cast<double>(t) - tbar) * (static_cast<double>(t) - tbar);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = ybar - slope * tbar;
  return {intercept - slope, slope};
}

double run(std::span<const double> y, double alpha, double beta, State init, State* end) {
  double level = init.level, slope = init.slope, sse = 0.0;
  for (double v : y) {
    const double pred = level + slope;
    const double err = v - pred;
    sse += err * err;
    const double new_level = pred + alpha * err;
    slope = slope + beta * (new_level - level - slope);
    level = new_level;
  }
  if (end) *end = {level, slope};
  return sse;
}

}  // namespace

EtsFit ets_fit(std::span<const double> y) {
  if (y.size() < kInitPoints) throw InvalidArgument("ets_fit: need at least 10 observations");
  const State init = initial_state(y);

  double best_a = 0.01, best_b = 0.0, best = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 99; ++i) {
    for (int j = 0; j <= 99; ++j) {
      const double a = i * 0.01, b = j * 0.01;
      const double sse = run(y, a, b, init, nullptr);
      if (sse < best) {
        best = sse;
        best_a = a;
        best_b = b;
      }
    }
  }

  // Coordinate descent with a shrinking step inside the admissible box.
  constexpr double kAlphaLo = 1e-4, kAlphaHi = 1.0 - 1e-4, kBetaHi = 1.0 - 1e-4;
  double step = 0.005;
  while (step > 1e-7) {
    bool moved = false;
    for (int coord = 0; coord < 2; ++coord) {
      for (double dir : {-1.0, 1.0}) {
        double a = best_a, b = best_b;
        (coord == 0 ? a : b) += dir * step;
        if (a < kAlphaLo || a > kAlphaHi || b < 0.0 || b > kBetaHi) continue;
        const double sse = run(y, a, b, init, nullptr);
        if (sse < best) {
          best = sse;
          best_a = a;
          best_b = b;
          moved = true;
        }
      }
    }
    if (!moved) step /= 2.0;
  }

  EtsFit fit = ets_filter(y, best_a, best_b);
  return fit;
}

EtsFit ets_filter(std::span<const double> y, double alpha, double beta) {
  if (y.size() < kInitPoints) throw InvalidArgument("ets_filter: need at least 10 observations");
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta >= 0.0 && beta < 1.0)) {
    throw InvalidArgument("ets_filter: smoothing parameters out of range");
  }
  State end{};
  EtsFit fit;
  fit.alpha = alpha;
  fit.beta = beta;
  fit.sse = run(y, alpha, beta, initial_state(y), &end);
  fit.level = end.level;
  fit.slope = end.slope;
  fit.origin_index = y.size() - 1;
  return fit;
}

std::vector<double> ets_one_step_predictions(std::span<const double> y, double alpha, double beta) {
  if (y.size() < kInitPoints) throw InvalidArgument("ets: need at least 10 observations");
  State s = initial_state(y);
  std::vector<double> out;
  out.reserve(y.size());
  for (double v : y) {
    const double pred = s.level + s.slope;
    out.push_back(pred);
    const double new_level = pred + alpha * (v - pred);
    s.slope += beta * (new_level - s.level - s.slope);
    s.level = new_level;
  }
  return out;
}

ForecastResult ets_forecast(const EtsFit& fit, std::size_t horizon) {
  if (horizon < 1) throw InvalidArgument("forecast horizon must be >= 1");
  ForecastResult r{fit.origin_index, horizon, std::vector<double>(horizon), "ets"};
  for (std::size_t h = 1; h <= horizon; ++h) {
    r.values[h - 1] = fit.level + static_cast<double>(h) * fit.slope;
  }
  return r;
}

ForecastResult seasonal_naive_forecast(std::span<const double> seasonal, int period,
                                       std::size_t horizon) {
  if (period < 1) throw InvalidArgument("seasonal period must be >= 1");
  if (horizon < 1) throw InvalidArgument("forecast horizon must be >= 1");
  const auto p = static_cast<std::size_t>(period);
  if (seasonal.size() < p) throw InvalidArgument("seasonal series shorter than its period");
  const std::size_t n = seasonal.size();
  ForecastResult r{n - 1, horizon, std::vector<double>(horizon),
                   "seasonal-naive-" + std::to_string(period)};
  for (std::size_t h = 1; h <= horizon; ++h) r.values[h - 1] = seasonal[n - p + (h - 1) % p];
  return r;
}

ForecastResult recombine_forecasts(const ForecastResult& trend,
                                   const std::vector<ForecastResult>& seasonals,
                                   const ForecastResult& residual) {
  const auto check = [&](const ForecastResult& f) {
    if (f.horizon != trend.horizon || f.values.size() != trend.values.size() ||
        f.origin_index != trend.origin_index) {
      throw InvalidArgument("recombine_forecasts: horizon/origin mismatch");
    }
  };
  check(residual);
  for (const auto& s : seasonals) check(s);
  ForecastResult out{trend.origin_index, trend.horizon, trend.values, residual.model_label};
  for (std::size_t h = 0; h < out.values.size(); ++h) {
    for (const auto& s : seasonals) out.values[h] += s.values[h];
    out.values[h] = std::clamp(out.values[h] + residual.values[h], kOeeFloor, kOeeCeiling);
  }
  return out;
}

}  // namespace oeecast
