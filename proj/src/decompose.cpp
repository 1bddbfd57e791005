#include "oeecast/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "oeecast/errors.hpp"

namespace oeecast {

std::vector<double> centered_moving_average(std::span<const double> x, int window) {
  if (window < 1) throw InvalidArgument("moving-average window must be positive");
  const auto n = static_cast<long>(x.size());
  std::vector<double> prefix(x.size() + 1, 0.0);
  for (long i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  const auto range_sum = [&](long a, long b) { return prefix[b + 1] - prefix[a]; };

  const bool even = window % 2 == 0;
  const long half = window / 2;
  std::vector<double> out(x.size());
  for (long t = 0; t < n; ++t) {
    const long h = std::min({half, t, n - 1 - t});
    if (even && h == half) {
      const double inner = range_sum(t - half + 1, t + half - 1);
      out[t] = (inner + 0.5 * (x[t - half] + x[t + half])) / static_cast<double>(window);
    } else {
      out[t] = range_sum(t - h, t + h) / static_cast<double>(2 * h + 1);
    }
  }
  return out;
}

namespace {

constexpr int kMaxBackfitSweeps = 200;

// Per-phase means of `x` for `period` (centred to zero average when asked),
// expanded to the full length.
std::vector<double> phase_means(std::span<const double> x, int period, bool centre = true) {
  std::vector<double> sum(period, 0.0);
  std::vector<int> count(period, 0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    sum[t % period] += x[t];
    ++count[t % period];
  }
  for (int p = 0; p < period; ++p) sum[p] /= count[p];
  if (centre) {
    const double center = std::accumulate(sum.begin(), sum.end(), 0.0) / period;
    for (double& v : sum) v -= center;
  }
  std::vector<double> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) out[t] = sum[t % period];
  return out;
}

}  // namespace

DecompositionResult decompose(const TimeSeries& ts, const std::vector<int>& periods, int passes) {
  if (periods.empty()) throw InvalidArgument("decompose: empty period list");
  if (passes < 1) throw InvalidArgument("decompose: passes must be >= 1");
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (periods[i] < 2) throw InvalidArgument("decompose: periods must be >= 2");
    if (i > 0 && (periods[i] <= periods[i - 1] || periods[i] % periods[i - 1] != 0)) {
      throw InvalidArgument("decompose: periods must be strictly increasing and nested");
    }
  }
  const std::size_t n = ts.size();
  const int max_period = periods.back();
  if (n < 2 * static_cast<std::size_t>(max_period)) {
    throw InvalidArgument("decompose: series of length " + std::to_string(n) +
                          " shorter than twice the largest period " + std::to_string(max_period));
  }

  const auto x = ts.values();
  std::vector<std::vector<double>> seasonal(periods.size(), std::vector<double>(n, 0.0));
  std::vector<double> work(n);
  for (int pass = 0; pass < passes; ++pass) {
    for (std::size_t k = 0; k < periods.size(); ++k) {
      for (std::size_t t = 0; t < n; ++t) {
        double v = x[t];
        for (std::size_t j = 0; j < periods.size(); ++j) {
          if (j != k) v -= seasonal[j][t];
        }
        work[t] = v;
      }
      const auto trend = centered_moving_average(work, periods[k]);
      for (std::size_t t = 0; t < n; ++t) work[t] -= trend[t];
      seasonal[k] = phase_means(work, periods[k]);
    }
  }

  for (std::size_t t = 0; t < n; ++t) {
    double v = x[t];
    for (const auto& s : seasonal) v -= s[t];
    work[t] = v;
  }
  auto trend = centered_moving_average(work, max_period);

  // Backfit the seasonals against the final trend so that the residual has
  // zero mean at every phase of every period; the centring constants move
  // into the trend.
  std::vector<double> residual(n);
  const auto update_residual = [&] {
    for (std::size_t t = 0; t < n; ++t) {
      double v = x[t] - trend[t];
      for (const auto& s : seasonal) v -= s[t];
      residual[t] = v;
    }
  };
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  for (int sweep = 0; sweep < kMaxBackfitSweeps; ++sweep) {
    for (std::size_t k = 0; k < periods.size(); ++k) {
      for (std::size_t t = 0; t < n; ++t) {
        double v = x[t] - trend[t];
        for (std::size_t j = 0; j < periods.size(); ++j) {
          if (j != k) v -= seasonal[j][t];
        }
        work[t] = v;
      }
      const auto raw = phase_means(work, periods[k], false);
      const auto centred = phase_means(work, periods[k], true);
      const double c = raw[0] - centred[0];
      seasonal[k] = centred;
      for (double& v : trend) v += c;
    }
    update_residual();
    double worst = 0.0;
    for (int p : periods) {
      for (double m : phase_means(residual, p, false)) worst = std::max(worst, std::abs(m));
    }
    if (worst <= 1e-12 * std::max(scale, 1.0)) break;
  }

  std::map<int, TimeSeries> comps;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    comps.emplace(periods[k], ts.with_values(std::move(seasonal[k])));
  }
  return DecompositionResult{ts.with_values(std::move(trend)), std::move(comps),
                             ts.with_values(std::move(residual)), periods};
}

TimeSeries reconstruct(const DecompositionResult& d) {
  const std::size_t n = d.trend.size();
  if (d.residual.size() != n) throw InvalidArgument("reconstruct: component length mismatch");
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = d.trend[t];
  for (const auto& [period, s] : d.seasonal) {
    if (s.size() != n) throw InvalidArgument("reconstruct: component length mismatch");
    for (std::size_t t = 0; t < n; ++t) out[t] += s[t];
  }
  for (std::size_t t = 0; t < n; ++t) out[t] += d.residual[t];
  return d.trend.with_values(std::move(out));
}

void save_decomposition_csv(const std::filesystem::path& path, const DecompositionResult& d) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out.precision(17);
  out << "timestamp,trend";
  for (const auto& [period, s] : d.seasonal) out << ",seasonal_" << period;
  out << ",residual\n";
  for (std::size_t t = 0; t < d.trend.size(); ++t) {
    out << format_hour(d.trend.timestamp(t)) << ',' << d.trend[t];
    for (const auto& [period, s] : d.seasonal) out << ',' << s[t];
    out << ',' << d.residual[t] << '\n';
  }
}

}  // namespace oeecast
