#include "oeecast/series.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "oeecast/errors.hpp"

namespace oeecast {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      cell.push_back(c);
    } else if (c == ',' && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

Hour parse_hour(std::string_view text) {
  std::string s = trim(text);
  if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.pop_back();
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  char sep = 0;
  int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &sec);
  if (n < 3 || (n >= 4 && sep != 'T' && sep != ' ') || (n == 4)) {
    throw ParseError("malformed timestamp '" + s + "'");
  }
  if (mi != 0 || sec != 0) {
    throw ParseError("timestamp '" + s + "' is not on an hour boundary");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23) {
    throw ParseError("invalid calendar timestamp '" + s + "'");
  }
  return std::chrono::time_point_cast<std::chrono::hours>(std::chrono::sys_days{ymd}) +
         std::chrono::hours(h);
}

std::string format_hour(Hour hr) {
  const auto day = std::chrono::floor<std::chrono::days>(hr);
  const std::chrono::year_month_day ymd{day};
  const auto h = (hr - day).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:00", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(h));
  return buf;
}

TimeSeries::TimeSeries(std::vector<double> values, Hour start, std::string name)
    : values_(std::move(values)), start_(start), name_(std::move(name)) {
  if (values_.empty()) throw InvalidArgument("time series must hold at least one value");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidArgument("non-finite value at index " + std::to_string(i));
    }
  }
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > values_.size()) {
    throw InvalidArgument("invalid slice [" + std::to_string(begin) + ", " +
                          std::to_string(end) + ")");
  }
  return TimeSeries({values_.begin() + static_cast<long>(begin), values_.begin() + static_cast<long>(end)},
                    timestamp(begin), name_);
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
  return TimeSeries(std::move(values), start_, name_);
}

TimeSeries load_csv(const std::filesystem::path& path, const std::string& value_column,
                    Hour start, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open '" + path.string() + "'");

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw ParseError("empty file '" + path.string() + "'");
  if (!header.empty() && header[0].size() >= 3 &&
      header[0].compare(0, 3, "\xEF\xBB\xBF") == 0) {
    header[0] = header[0].substr(3);
  }

  const auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto value_idx = find_col(value_column);
  if (!value_idx) {
    throw ParseError("column '" + value_column + "' not found in '" + path.string() + "'");
  }
  std::optional<std::size_t> ts_idx;
  if (!options.timestamp_column.empty()) {
    ts_idx = find_col(options.timestamp_column);
    if (!ts_idx) {
      throw ParseError("timestamp column '" + options.timestamp_column + "' not found");
    }
  } else {
    for (std::size_t i = 0; i < header.size() && !ts_idx; ++i) {
      const auto l = lower(header[i]);
      if (i != *value_idx && (l == "timestamp" || l == "time" || l == "datetime" || l == "date" || l == "ds")) {
        ts_idx = i;
      }
    }
  }

  std::vector<double> values;
  std::vector<Hour> stamps;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() <= *value_idx || (ts_idx && cells.size() <= *ts_idx)) {
      throw ParseError("row " + std::to_string(row) + " has too few cells");
    }
    double v = 0.0;
    if (!parse_double(cells[*value_idx], v)) {
      throw ParseError("non-numeric value '" + cells[*value_idx] + "' in column '" +
                       value_column + "' at row " + std::to_string(row));
    }
    if (ts_idx) {
      try {
        stamps.push_back(parse_hour(cells[*ts_idx]));
      } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " at row " + std::to_string(row));
      }
    }
    values.push_back(v);
  }
  if (values.empty()) throw ParseError("no data rows in '" + path.string() + "'");

  std::string name = path.stem().string();
  if (!ts_idx) return TimeSeries(std::move(values), start, std::move(name));

  std::vector<double> filled{values.front()};
  for (std::size_t i = 1; i < values.size(); ++i) {
    const long gap = (stamps[i] - stamps[i - 1]).count();
    if (gap <= 0) {
      throw ParseError("timestamps not strictly increasing at row " + std::to_string(i + 1));
    }
    if (gap > 1) {
      const long missing = gap - 1;
      if (!options.interpolate_gaps || missing > 3) {
        throw ParseError(std::to_string(missing) + " missing hour(s) before row " +
                         std::to_string(i + 1));
      }
      for (long k = 1; k <= missing; ++k) {
        const double w = static_cast<double>(k) / static_cast<double>(gap);
        filled.push_back(values[i - 1] + w * (values[i] - values[i - 1]));
      }
    }
    filled.push_back(values[i]);
  }
  return TimeSeries(std::move(filled), stamps.front(), std::move(name));
}

void save_csv(const std::filesystem::path& path, const TimeSeries& ts,
              const std::string& value_column) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << "timestamp," << value_column << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out << format_hour(ts.timestamp(i)) << ',' << ts[i] << '\n';
  }
}

double quantile(std::span<const double> x, double q) {
  if (x.empty()) throw InvalidArgument("quantile of an empty sample");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

SummaryStats summary_stats(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw InvalidArgument("summary statistics need at least 2 values");
  SummaryStats s;
  s.count = n;
  s.mean = mean_of(x);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double nd = static_cast<double>(n);
  s.std_dev = std::sqrt(m2 / (nd - 1.0));
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.q25 = quantile(sorted, 0.25);
  s.median = quantile(sorted, 0.5);
  s.q75 = quantile(sorted, 0.75);

  m2 /= nd;
  m3 /= nd;
  m4 /= nd;
  if (m2 > 1e-14 * (1.0 + s.mean * s.mean)) {
    if (n >= 3) {
      const double g1 = m3 / std::pow(m2, 1.5);
      s.skewness = g1 * std::sqrt(nd * (nd - 1.0)) / (nd - 2.0);
    }
    if (n >= 4) {
      const double g2 = m4 / (m2 * m2) - 3.0;
      s.kurtosis = ((nd + 1.0) * g2 + 6.0) * (nd - 1.0) / ((nd - 2.0) * (nd - 3.0));
    }
  }
  return s;
}

std::string_view to_string(PValueBracket b) {
  switch (b) {
    case PValueBracket::Below001: return "<0.01";
    case PValueBracket::From001To005: return "0.01-0.05";
    case PValueBracket::From005To010: return "0.05-0.10";
    case PValueBracket::Above010: return ">0.10";
  }
  return "?";
}

TestResult kpss_test(std::span<const double> x, KpssRegression regression,
                     std::optional<int> lags) {
  const std::size_t n = x.size();
  if (n < 20) throw InvalidArgument("KPSS needs at least 20 observations");
  const double nd = static_cast<double>(n);

  std::vector<double> e(n);
  if (regression == KpssRegression::Level) {
    const double m = mean_of(x);
    for (std::size_t t = 0; t < n; ++t) e[t] = x[t] - m;
  } else {
    const double tbar = (nd - 1.0) / 2.0;
    const double ybar = mean_of(x);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double dt = static_cast<double>(t) - tbar;
      sxy += dt * (x[t] - ybar);
      sxx += dt * dt;
    }
    const double slope = sxy / sxx;
    for (std::size_t t = 0; t < n; ++t) {
      e[t] = x[t] - ybar - slope * (static_cast<double>(t) - tbar);
    }
  }

  double gamma0 = 0.0;
  for (double v : e) gamma0 += v * v;
  gamma0 /= nd;
  if (gamma0 <= 1e-14) throw InvalidArgument("KPSS on a zero-variance series");

  const int l = lags ? *lags : static_cast<int>(std::floor(12.0 * std::pow(nd / 100.0, 0.25)));
  if (l < 0 || static_cast<std::size_t>(l) >= n) throw InvalidArgument("invalid KPSS lag count");
  double lrv = gamma0;
  for (int j = 1; j <= l; ++j) {
    double g = 0.0;
    for (std::size_t t = static_cast<std::size_t>(j); t < n; ++t) g += e[t] * e[t - static_cast<std::size_t>(j)];
    lrv += 2.0 * (1.0 - static_cast<double>(j) / (l + 1.0)) * g / nd;
  }

  double partial = 0.0, eta = 0.0;
  for (double v : e) {
    partial += v;
    eta += partial * partial;
  }
  TestResult r;
  r.lags = l;
  r.statistic = eta / (nd * nd * lrv);

  // 10%, 5%, 1% critical values (Kwiatkowski et al. 1992, Table 1).
  const bool level = regression == KpssRegression::Level;
  const double c10 = level ? 0.347 : 0.119;
  const double c05 = level ? 0.463 : 0.146;
  const double c01 = level ? 0.739 : 0.216;
  if (r.statistic > c01) r.p_value_bracket = PValueBracket::Below001;
  else if (r.statistic > c05) r.p_value_bracket = PValueBracket::From001To005;
  else if (r.statistic > c10) r.p_value_bracket = PValueBracket::From005To010;
  else r.p_value_bracket = PValueBracket::Above010;
  r.reject_at_5pct = r.statistic > c05;
  return r;
}

std::vector<double> acf(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (n == 0 || 2 * max_lag >= n) {
    throw InvalidArgument("acf: max_lag " + std::to_string(max_lag) +
                          " must be below half the length " + std::to_string(n));
  }
  const double m = mean_of(x);
  double c0 = 0.0;
  for (double v : x) c0 += (v - m) * (v - m);
  if (c0 <= 1e-14 * static_cast<double>(n) * (1.0 + m * m)) {
    throw InvalidArgument("acf of a zero-variance series");
  }
  std::vector<double> r(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double c = 0.0;
    for (std::size_t t = k; t < n; ++t) c += (x[t] - m) * (x[t - k] - m);
    r[k] = c / c0;
  }
  r[0] = 1.0;
  return r;
}

std::vector<double> pacf_from_acf(std::span<const double> rho) {
  const std::size_t max_lag = rho.size() - 1;
  std::vector<double> out(max_lag + 1, 0.0);
  out[0] = 1.0;
  std::vector<double> phi(max_lag + 1, 0.0), prev(max_lag + 1, 0.0);
  double v = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double num = rho[k];
    for (std::size_t j = 1; j < k; ++j) num -= prev[j] * rho[k - j];
    const double a = v > 1e-14 ? num / v : 0.0;
    phi[k] = a;
    for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - a * prev[k - j];
    v *= (1.0 - a * a);
    out[k] = a;
    prev = phi;
  }
  return out;
}

std::vector<double> pacf(std::span<const double> x, std::size_t max_lag) {
  return pacf_from_acf(acf(x, max_lag));
}

LjungBox ljung_box(std::span<const double> x, std::size_t lags, std::size_t fitted_params) {
  if (lags <= fitted_params) throw InvalidArgument("Ljung-Box needs lags > fitted parameters");
  const auto r = acf(x, lags);
  const double n = static_cast<double>(x.size());
  double q = 0.0;
  for (std::size_t k = 1; k <= lags; ++k) q += r[k] * r[k] / (n - static_cast<double>(k));
  q *= n * (n + 2.0);
  const boost::math::chi_squared dist(static_cast<double>(lags - fitted_params));
  return {q, boost::math::cdf(boost::math::complement(dist, q))};
}

double mae(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) throw InvalidArgument("mae: length mismatch");
  if (actual.empty()) throw InvalidArgument("mae: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) s += std::abs(actual[i] - predicted[i]);
  return s / static_cast<double>(actual.size());
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) throw InvalidArgument("mape: length mismatch");
  if (actual.empty()) throw InvalidArgument("mape: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) throw InvalidArgument("mape: zero actual at index " + std::to_string(i));
    s += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
  }
  return s / static_cast<double>(actual.size());
}

}  // namespace oeecast
