#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oeecast {

using Hour = std::chrono::sys_time<std::chrono::hours>;

/// Parses "YYYY-MM-DD HH[:MM[:SS]]" (a 'T' separator and a trailing 'Z' are
/// accepted). Minutes and seconds must be zero.
Hour parse_hour(std::string_view text);
std::string format_hour(Hour h);

/**
 * Hourly-stamped real-valued sequence. Timestamps are implied by the start
 * hour and a fixed one-hour step; there are no gaps. Values are finite and
 * there is at least one of them.
 */
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values, Hour start = Hour{},
                      std::string name = {});

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  Hour start() const noexcept { return start_; }
  Hour timestamp(std::size_t i) const {
    return start_ + std::chrono::hours(static_cast<long>(i));
  }
  const std::string& name() const noexcept { return name_; }

  /// Values [begin, end) with the start hour shifted accordingly.
  TimeSeries slice(std::size_t begin, std::size_t end) const;
  TimeSeries with_values(std::vector<double> values) const;

 private:
  std::vector<double> values_;
  Hour start_;
  std::string name_;
};

struct CsvOptions {
  /// Column holding ISO-8601 hour stamps. Empty means auto-detect a column
  /// named timestamp/time/datetime/date/ds, if any.
  std::string timestamp_column;
  /// Linear interpolation across gaps of at most three missing hours.
  /// Without it any gap is an error.
  bool interpolate_gaps = false;
};

/// Reads one value column from a headed CSV file. When the file carries a
/// timestamp column it fixes the start hour and is checked for contiguity;
/// otherwise `start` is used.
TimeSeries load_csv(const std::filesystem::path& path,
                    const std::string& value_column, Hour start = Hour{},
                    const CsvOptions& options = {});

void save_csv(const std::filesystem::path& path, const TimeSeries& ts,
              const std::string& value_column = "value");

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
  // Empty when the sample has zero variance (or is too short).
  std::optional<double> skewness;
  std::optional<double> kurtosis;  // excess
};

/// Sample moments (n-1 std, adjusted skewness, adjusted excess kurtosis) and
/// linearly interpolated quartiles.
SummaryStats summary_stats(std::span<const double> x);
inline SummaryStats summary_stats(const TimeSeries& ts) {
  return summary_stats(ts.values());
}

/// Linear-interpolation quantile (R type 7) of an unsorted sample.
double quantile(std::span<const double> x, double q);

enum class KpssRegression { Level, Trend };

enum class PValueBracket { Below001, From001To005, From005To010, Above010 };
std::string_view to_string(PValueBracket b);

struct TestResult {
  double statistic = 0.0;
  PValueBracket p_value_bracket = PValueBracket::Above010;
  bool reject_at_5pct = false;
  int lags = 0;
};

/// KPSS stationarity test with a Bartlett-kernel long-run variance. With no
/// lag given, uses floor(12 (n/100)^(1/4)).
TestResult kpss_test(std::span<const double> x, KpssRegression regression,
                     std::optional<int> lags = std::nullopt);
inline TestResult kpss_test(const TimeSeries& ts, KpssRegression regression,
                            std::optional<int> lags = std::nullopt) {
  return kpss_test(ts.values(), regression, lags);
}

/// Biased (divide by n) autocorrelations for lags 0..max_lag.
std::vector<double> acf(std::span<const double> x, std::size_t max_lag);
/// Partial autocorrelations for lags 0..max_lag (index 0 is 1) via the
/// Durbin-Levinson recursion.
std::vector<double> pacf(std::span<const double> x, std::size_t max_lag);
/// Durbin-Levinson on a given autocorrelation sequence; same layout as pacf.
std::vector<double> pacf_from_acf(std::span<const double> rho);

struct LjungBox {
  double statistic = 0.0;
  double p_value = 1.0;
};
LjungBox ljung_box(std::span<const double> x, std::size_t lags,
                   std::size_t fitted_params = 0);

double mae(std::span<const double> actual, std::span<const double> predicted);
/// Mean absolute percentage error as a fraction (0.07 means 7%).
double mape(std::span<const double> actual, std::span<const double> predicted);

}  // namespace oeecast
