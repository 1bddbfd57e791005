#include "oeecast/stat_features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "oeecast/errors.hpp"
#include "oeecast/parallel.hpp"

namespace oeecast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double mean_of(std::span<const double> x) {
  return x.empty() ? kNaN : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double pvar_of(std::span<const double> x) {
  if (x.empty()) return kNaN;
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

double median_of(std::span<const double> x) { return x.empty() ? kNaN : quantile(x, 0.5); }

// Sample skewness / excess kurtosis with the usual small-sample adjustment.
double skewness_of(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  if (n < 3) return kNaN;
  const double m = mean_of(x);
  double m2 = 0, m3 = 0;
  for (double v : x) {
    m2 += (v - m) * (v - m);
    m3 += (v - m) * (v - m) * (v - m);
  }
  m2 /= n;
  m3 /= n;
  if (m2 <= 0) return kNaN;
  return std::sqrt(n * (n - 1)) / (n - 2) * m3 / std::pow(m2, 1.5);
}

double kurtosis_of(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  if (n < 4) return kNaN;
  const double m = mean_of(x);
  double m2 = 0, m4 = 0;
  for (double v : x) {
    const double d2 = (v - m) * (v - m);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  if (m2 <= 0) return kNaN;
  const double g2 = m4 / (m2 * m2) - 3.0;
  return (n - 1) / ((n - 2) * (n - 3)) * ((n + 1) * g2 + 6.0);
}

struct LinReg {
  double slope = kNaN, intercept = kNaN, rvalue = kNaN, pvalue = kNaN, stderr_ = kNaN;
};

LinReg linregress(std::span<const double> xs, std::span<const double> ys) {
  LinReg r;
  const std::size_t n = ys.size();
  if (n < 2) return r;
  const double mx = mean_of(xs), my = mean_of(ys);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0) return r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  if (syy > 0) r.rvalue = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (n > 2) {
    const double resid = std::max(0.0, syy - r.slope * sxy);
    r.stderr_ = std::sqrt(resid / static_cast<double>(n - 2) / sxx);
    if (syy > 0) {
      const double df = static_cast<double>(n - 2);
      const double rr = r.rvalue;
      if (1.0 - rr * rr <= 1e-15) {
        r.pvalue = 0.0;
      } else {
        const double t = rr * std::sqrt(df / (1.0 - rr * rr));
        boost::math::students_t dist(df);
        r.pvalue = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
      }
    }
  }
  return r;
}

LinReg linregress_index(std::span<const double> ys) {
  std::vector<double> xs(ys.size());
  std::iota(xs.begin(), xs.end(), 0.0);
  return linregress(xs, ys);
}

// Index of the histogram bin (equal width over [lo, hi]) holding v.
int bin_of(double v, double lo, double hi, int bins) {
  if (hi <= lo) return 0;
  const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
  return std::clamp(b, 0, bins - 1);
}

double histogram_entropy(std::span<const double> x, int bins) {
  if (x.empty()) return kNaN;
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (double v : x) ++counts[static_cast<std::size_t>(bin_of(v, *lo_it, *hi_it, bins))];
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(x.size());
    h -= p * std::log(p);
  }
  return h;
}

std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double a = -2.0 * M_PI * static_cast<double>(k * t % n) / static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(a), std::sin(a));
    }
    out[k] = acc;
  }
  return out;
}

// Biased autocorrelation for lags 0..max_lag; NaN for lags >= n or a flat window.
std::vector<double> window_acf(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  std::vector<double> r(max_lag + 1, kNaN);
  const double m = mean_of(x);
  double c0 = 0.0;
  for (double v : x) c0 += (v - m) * (v - m);
  if (!(c0 > 0.0)) return r;
  for (std::size_t k = 0; k <= max_lag && k < n; ++k) {
    double c = 0.0;
    for (std::size_t t = k; t < n; ++t) c += (x[t] - m) * (x[t - k] - m);
    r[k] = c / c0;
  }
  return r;
}

double lempel_ziv(std::span<const double> x, int bins) {
  if (x.empty()) return kNaN;
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  std::vector<int> seq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) seq[i] = bin_of(x[i], *lo_it, *hi_it, bins);
  std::set<std::vector<int>> seen;
  std::size_t ind = 0, inc = 1;
  while (ind + inc <= seq.size()) {
    std::vector<int> sub(seq.begin() + static_cast<long>(ind), seq.begin() + static_cast<long>(ind + inc));
    if (seen.count(sub)) {
      ++inc;
    } else {
      seen.insert(std::move(sub));
      ind += inc;
      inc = 1;
    }
  }
  return static_cast<double>(seen.size()) / static_cast<double>(x.size());
}

double change_quantiles(std::span<const double> x, double ql, double qh, bool isabs, bool var) {
  const double lo = quantile(x, ql), hi = quantile(x, qh);
  std::vector<double> d;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const bool in0 = x[i - 1] >= lo && x[i - 1] <= hi;
    const bool in1 = x[i] >= lo && x[i] <= hi;
    if (in0 && in1) {
      const double c = x[i] - x[i - 1];
      d.push_back(isabs ? std::abs(c) : c);
    }
  }
  if (d.empty()) return 0.0;
  return var ? pvar_of(d) : mean_of(d);
}

class Sink {
 public:
  explicit Sink(bool record_names) : record_(record_names) {}
  void add(const std::string& name, double v) {
    if (record_) names.push_back(name);
    values.push_back(v);
  }
  std::vector<std::string> names;
  std::vector<double> values;

 private:
  bool record_;
};

void compute(std::span<const double> x, Sink& s) {
  const std::size_t n = x.size();
  const double m = mean_of(x);
  const double var = pvar_of(x);
  const double sd = std::sqrt(var);
  std::vector<double> diff(n > 0 ? n - 1 : 0);
  for (std::size_t i = 1; i < n; ++i) diff[i - 1] = x[i] - x[i - 1];

  // Group 1: descriptive.
  double sum = 0, energy = 0, abs_change = 0;
  for (double v : x) {
    sum += v;
    energy += v * v;
  }
  for (double d : diff) abs_change += std::abs(d);
  double second = 0.0;
  for (std::size_t i = 0; i + 2 < n; ++i) second += (x[i + 2] - 2.0 * x[i + 1] + x[i]) / 2.0;
  s.add("stat.sum", sum);
  s.add("stat.mean", m);
  s.add("stat.median", median_of(x));
  s.add("stat.std", sd);
  s.add("stat.variance", var);
  s.add("stat.skewness", skewness_of(x));
  s.add("stat.kurtosis", kurtosis_of(x));
  s.add("stat.rms", std::sqrt(energy / static_cast<double>(n)));
  s.add("stat.abs_energy", energy);
  s.add("stat.mean_abs_change", diff.empty() ? kNaN : abs_change / static_cast<double>(diff.size()));
  s.add("stat.mean_second_derivative_central", n > 2 ? second / static_cast<double>(n - 2) : kNaN);

  const auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
  const double mn = *mn_it, mx = *mx_it;
  s.add("stat.minimum", mn);
  s.add("stat.maximum", mx);
  s.add("stat.range", mx - mn);
  s.add("stat.mean_change", n > 1 ? (x[n - 1] - x[0]) / static_cast<double>(n - 1) : kNaN);
  s.add("stat.absolute_sum_of_changes", abs_change);
  std::size_t above = 0, below = 0, run_a = 0, run_b = 0, best_a = 0, best_b = 0, crossings = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool a = x[i] > m, b = x[i] < m;
    above += a;
    below += b;
    run_a = a ? run_a + 1 : 0;
    run_b = b ? run_b + 1 : 0;
    best_a = std::max(best_a, run_a);
    best_b = std::max(best_b, run_b);
    if (i > 0 && (x[i] > m) != (x[i - 1] > m)) ++crossings;
  }
  s.add("stat.count_above_mean", static_cast<double>(above));
  s.add("stat.count_below_mean", static_cast<double>(below));
  s.add("stat.longest_strike_above_mean", static_cast<double>(best_a));
  s.add("stat.longest_strike_below_mean", static_cast<double>(best_b));
  const double nd = static_cast<double>(n);
  const auto first_max = static_cast<double>(std::max_element(x.begin(), x.end()) - x.begin());
  const auto first_min = static_cast<double>(std::min_element(x.begin(), x.end()) - x.begin());
  std::size_t last_max = 0, last_min = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == mx) last_max = i;
    if (x[i] == mn) last_min = i;
  }
  s.add("stat.first_location_of_maximum", first_max / nd);
  s.add("stat.last_location_of_maximum", static_cast<double>(last_max + 1) / nd);
  s.add("stat.first_location_of_minimum", first_min / nd);
  s.add("stat.last_location_of_minimum", static_cast<double>(last_min + 1) / nd);
  s.add("stat.number_crossing_mean", static_cast<double>(crossings));
  s.add("stat.variation_coefficient", m != 0.0 ? sd / m : kNaN);
  for (int q = 1; q <= 9; ++q) s.add("stat.quantile.q" + num(q / 10.0), quantile(x, q / 10.0));
  for (double r : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
    std::size_t c = 0;
    for (double v : x) c += std::abs(v - m) > r * sd;
    s.add("stat.ratio_beyond_r_sigma.r" + num(r), static_cast<double>(c) / nd);
  }
  for (std::size_t lag = 1; lag <= 3; ++lag) {
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i + 2 * lag < n; ++i, ++cnt) acc += x[i + 2 * lag] * x[i + lag] * x[i];
    s.add("stat.c3.lag" + std::to_string(lag), cnt ? acc / static_cast<double>(cnt) : kNaN);
  }
  for (bool normalize : {false, true}) {
    double acc = 0.0;
    if (!normalize || sd > 0) {
      const double scale = normalize ? sd : 1.0;
      for (double d : diff) acc += (d / scale) * (d / scale);
    }
    s.add(std::string("stat.cid_ce.normalize_") + (normalize ? "true" : "false"), std::sqrt(acc));
  }
  for (std::size_t lag = 1; lag <= 3; ++lag) {
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i + 2 * lag < n; ++i, ++cnt) {
      acc += x[i + 2 * lag] * x[i + 2 * lag] * x[i + lag] - x[i + lag] * x[i] * x[i];
    }
    s.add("stat.time_reversal_asymmetry.lag" + std::to_string(lag), cnt ? acc / static_cast<double>(cnt) : kNaN);
  }
  {
    double total = 0.0;
    for (double v : x) total += std::abs(v);
    for (int q = 1; q <= 9; ++q) {
      double v = kNaN;
      if (total > 0) {
        double cum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          cum += std::abs(x[i]);
          if (cum / total >= q / 10.0 - 1e-12) {
            v = static_cast<double>(i + 1) / nd;
            break;
          }
        }
      }
      s.add("stat.index_mass_quantile.q" + num(q / 10.0), v);
    }
  }
  for (std::size_t support : {1u, 3u}) {
    std::size_t peaks = 0;
    for (std::size_t i = support; i + support < n; ++i) {
      bool peak = true;
      for (std::size_t k = 1; k <= support && peak; ++k) peak = x[i] > x[i - k] && x[i] > x[i + k];
      peaks += peak;
    }
    s.add("stat.number_peaks.n" + std::to_string(support), static_cast<double>(peaks));
  }

  // Group 2: frequency domain (FFT length = window length).
  const auto spec = rfft(x);
  for (std::size_t k = 0; k <= 12; ++k) {
    const bool ok = k < spec.size();
    const std::string base = "stat.fft_coefficient.k" + std::to_string(k) + ".";
    const std::complex<double> c = ok ? spec[k] : std::complex<double>(kNaN, kNaN);
    s.add(base + "real", c.real());
    s.add(base + "imag", c.imag());
    s.add(base + "abs", std::abs(c));
    s.add(base + "angle", ok ? std::arg(c) : kNaN);
    if (k == 7) {
      double w = 0.0, c1 = 0.0;
      for (std::size_t j = 0; j < spec.size(); ++j) {
        w += std::abs(spec[j]);
        c1 += static_cast<double>(j) * std::abs(spec[j]);
      }
      double centroid = kNaN, variance = kNaN, skew = kNaN, kurt = kNaN;
      if (w > 0) {
        centroid = c1 / w;
        double m2 = 0, m3 = 0, m4 = 0;
        for (std::size_t j = 0; j < spec.size(); ++j) {
          const double d = static_cast<double>(j) - centroid;
          const double p = std::abs(spec[j]) / w;
          m2 += d * d * p;
          m3 += d * d * d * p;
          m4 += d * d * d * d * p;
        }
        variance = m2;
        if (m2 > 0) {
          skew = m3 / std::pow(m2, 1.5);
          kurt = m4 / (m2 * m2);
        }
      }
      s.add("stat.spectral.centroid", centroid);
      s.add("stat.spectral.variance", variance);
      s.add("stat.spectral.skewness", skew);
      s.add("stat.spectral.kurtosis", kurt);
    }
  }
  {
    double total = energy;
    const std::size_t segments = 4;
    for (std::size_t seg = 0; seg < segments; ++seg) {
      // numpy.array_split boundaries
      const std::size_t base = n / segments, extra = n % segments;
      const std::size_t b = seg * base + std::min(seg, extra);
      const std::size_t e = b + base + (seg < extra ? 1 : 0);
      double part = 0.0;
      for (std::size_t i = b; i < e; ++i) part += x[i] * x[i];
      s.add("stat.energy_ratio_by_chunks.segment" + std::to_string(seg), total > 0 ? part / total : kNaN);
    }
  }

  // Group 3: autocorrelation.
  const auto rho = window_acf(x, 11);
  std::vector<double> pac(12, kNaN);
  if (std::all_of(rho.begin(), rho.end(), [](double v) { return std::isfinite(v); })) {
    pac = pacf_from_acf(rho);
  }
  for (std::size_t k = 1; k <= 8; ++k) s.add("stat.acf.lag" + std::to_string(k), rho[k]);
  for (std::size_t k = 1; k <= 8; ++k) s.add("stat.pacf.lag" + std::to_string(k), pac[k]);
  const std::span<const double> r18(rho.data() + 1, 8);
  s.add("stat.agg_acf.mean", mean_of(r18));
  s.add("stat.agg_acf.std", std::sqrt(pvar_of(r18)));
  for (std::size_t k = 9; k <= 11; ++k) s.add("stat.acf.lag" + std::to_string(k), rho[k]);
  for (std::size_t k = 9; k <= 11; ++k) s.add("stat.pacf.lag" + std::to_string(k), pac[k]);
  s.add("stat.agg_acf.median", std::all_of(r18.begin(), r18.end(), [](double v) { return std::isfinite(v); })
                                   ? median_of(r18)
                                   : kNaN);
  s.add("stat.agg_acf.var", pvar_of(r18));

  // Group 4: entropy.
  s.add("stat.sample_entropy", sample_entropy(x).value);
  s.add("stat.approximate_entropy", approximate_entropy(x).value);
  s.add("stat.permutation_entropy", permutation_entropy(x).value);
  s.add("stat.fourier_entropy", fourier_entropy(x).value);
  for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    s.add("stat.approximate_entropy.r" + num(r), approximate_entropy(x, 2, r * sd).value);
  }
  for (int order = 4; order <= 7; ++order) {
    s.add("stat.permutation_entropy.order" + std::to_string(order), permutation_entropy(x, order).value);
  }
  for (int bins : {2, 3, 5, 100}) {
    s.add("stat.fourier_entropy.bins" + std::to_string(bins), fourier_entropy(x, bins).value);
  }
  s.add("stat.binned_entropy.bins10", histogram_entropy(x, 10));
  for (int bins : {2, 3, 5, 10, 100}) {
    s.add("stat.lempel_ziv_complexity.bins" + std::to_string(bins), lempel_ziv(x, bins));
  }

  // Group 5: trend and change.
  const LinReg lr = linregress_index(x);
  s.add("stat.linear_trend.slope", lr.slope);
  s.add("stat.linear_trend.intercept", lr.intercept);
  s.add("stat.linear_trend.r_squared", lr.rvalue * lr.rvalue);
  s.add("stat.linear_trend.stderr", lr.stderr_);
  s.add("stat.linear_trend.rvalue", lr.rvalue);
  s.add("stat.linear_trend.pvalue", lr.pvalue);
  const auto cq_name = [](double ql, double qh, bool isabs, bool var) {
    return "stat.change_quantiles.ql" + num(ql) + ".qh" + num(qh) + (isabs ? ".abs" : ".raw") +
           (var ? ".var" : ".mean");
  };
  const std::vector<std::pair<double, double>> core = {{0.0, 0.2}, {0.2, 0.8}, {0.8, 1.0}};
  for (const auto& [ql, qh] : core) s.add(cq_name(ql, qh, true, false), change_quantiles(x, ql, qh, true, false));
  const double grid[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) {
      for (bool isabs : {false, true}) {
        for (bool var : {false, true}) {
          const bool is_core = isabs && !var &&
                               std::find(core.begin(), core.end(), std::make_pair(grid[i], grid[j])) != core.end();
          if (is_core) continue;
          s.add(cq_name(grid[i], grid[j], isabs, var), change_quantiles(x, grid[i], grid[j], isabs, var));
        }
      }
    }
  }
  for (std::size_t chunk : {5u, 10u}) {
    for (const char* agg : {"max", "min", "mean", "var"}) {
      std::vector<double> ys;
      for (std::size_t b = 0; b < n; b += chunk) {
        const std::span<const double> part = x.subspan(b, std::min(chunk, n - b));
        const std::string a = agg;
        if (a == "max") ys.push_back(*std::max_element(part.begin(), part.end()));
        else if (a == "min") ys.push_back(*std::min_element(part.begin(), part.end()));
        else if (a == "mean") ys.push_back(mean_of(part));
        else ys.push_back(pvar_of(part));
      }
      const LinReg r = linregress_index(ys);
      const std::string base = "stat.agg_linear_trend.chunk" + std::to_string(chunk) + "." + agg + ".";
      s.add(base + "slope", r.slope);
      s.add(base + "intercept", r.intercept);
      s.add(base + "rvalue", r.rvalue);
      s.add(base + "stderr", r.stderr_);
    }
  }
}

}  // namespace

EntropyResult sample_entropy(std::span<const double> x, int m, double r) {
  if (m < 1 || x.size() <= static_cast<std::size_t>(2 * m)) {
    throw InvalidArgument("sample_entropy: window must be longer than 2*m");
  }
  if (r < 0) r = 0.2 * std::sqrt(pvar_of(x));
  if (!(r > 0)) return {0.0, true};
  const std::size_t n = x.size();
  const std::size_t templates = n - static_cast<std::size_t>(m);
  const auto close = [&](std::size_t i, std::size_t j, int len) {
    for (int k = 0; k < len; ++k) {
      if (std::abs(x[i + k] - x[j + k]) > r) return false;
    }
    return true;
  };
  double b = 0, a = 0;
  for (std::size_t i = 0; i < templates; ++i) {
    for (std::size_t j = i + 1; j < templates; ++j) {
      if (close(i, j, m)) {
        ++b;
        if (close(i, j, m + 1)) ++a;
      }
    }
  }
  if (b == 0) return {0.0, true};
  if (a == 0) return {std::log(b), true};
  return {-std::log(a / b), false};
}

EntropyResult approximate_entropy(std::span<const double> x, int m, double r) {
  if (m < 1 || x.size() <= static_cast<std::size_t>(2 * m)) {
    throw InvalidArgument("approximate_entropy: window must be longer than 2*m");
  }
  if (r < 0) r = 0.2 * std::sqrt(pvar_of(x));
  if (!(r > 0)) return {0.0, true};
  const std::size_t n = x.size();
  const auto phi = [&](int len) {
    const std::size_t count = n - static_cast<std::size_t>(len) + 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t c = 0;
      for (std::size_t j = 0; j < count; ++j) {
        bool ok = true;
        for (int k = 0; k < len && ok; ++k) ok = std::abs(x[i + k] - x[j + k]) <= r;
        c += ok;
      }
      acc += std::log(static_cast<double>(c) / static_cast<double>(count));
    }
    return acc / static_cast<double>(count);
  };
  return {std::max(0.0, phi(m) - phi(m + 1)), false};
}

EntropyResult permutation_entropy(std::span<const double> x, int order, int delay, bool normalize) {
  if (order < 2 || delay < 1) throw InvalidArgument("permutation_entropy: order >= 2 and delay >= 1 required");
  const std::size_t span_len = static_cast<std::size_t>((order - 1) * delay);
  if (x.size() <= span_len) throw InvalidArgument("permutation_entropy: window too short for order/delay");
  std::map<std::vector<int>, std::size_t> counts;
  std::vector<int> idx(static_cast<std::size_t>(order));
  const std::size_t patterns = x.size() - span_len;
  for (std::size_t t = 0; t < patterns; ++t) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return x[t + static_cast<std::size_t>(a * delay)] < x[t + static_cast<std::size_t>(b * delay)];
    });
    ++counts[idx];
  }
  double h = 0.0;
  for (const auto& [pat, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(patterns);
    h -= p * std::log(p);
  }
  if (normalize) h /= std::lgamma(static_cast<double>(order) + 1.0);
  return {std::max(0.0, h), false};
}

EntropyResult fourier_entropy(std::span<const double> x, int bins) {
  if (bins < 1) throw InvalidArgument("fourier_entropy: bins must be >= 1");
  if (x.size() < 2) throw InvalidArgument("fourier_entropy: window too short");
  const auto spec = rfft(x);
  std::vector<double> power(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) power[k] = std::norm(spec[k]);
  const double top = *std::max_element(power.begin(), power.end());
  if (!(top > 0)) return {0.0, true};
  for (auto& p : power) p /= top;
  return {histogram_entropy(power, bins), false};
}

const std::vector<std::string>& stat_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<double> probe(24);
    for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = std::sin(0.7 * static_cast<double>(i)) + 0.1 * i;
    Sink s(true);
    compute(probe, s);
    return s.names;
  }();
  return names;
}

std::vector<double> stat_features_of_window(std::span<const double> window) {
  if (window.size() < 5) throw InvalidArgument("statistical features need a window of at least 5 values");
  Sink s(false);
  compute(window, s);
  return std::move(s.values);
}

FeatureMatrix extract_stat_features(std::span<const double> values, std::size_t window, std::size_t stride) {
  if (stride < 1) throw InvalidArgument("stride must be >= 1");
  if (window > values.size()) {
    throw InvalidArgument("window " + std::to_string(window) + " exceeds series length " +
                          std::to_string(values.size()));
  }
  const std::size_t rows = (values.size() - window) / stride + 1;
  std::vector<std::vector<double>> out(rows);
  parallel_for(rows, [&](std::size_t r) { out[r] = stat_features_of_window(values.subspan(r * stride, window)); });
  FeatureMatrix fm(stat_feature_names());
  for (std::size_t r = 0; r < rows; ++r) fm.append_row(r * stride + window - 1, out[r]);
  return fm;
}

FeatureMatrix extract_stat_features(const TimeSeries& ts, std::size_t window, std::size_t stride) {
  return extract_stat_features(ts.values(), window, stride);
}

}  // namespace oeecast
