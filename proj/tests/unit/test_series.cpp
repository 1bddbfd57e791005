#include <doctest.h>

#include <cmath>
#include <random>

#include "oeecast/errors.hpp"
#include "oeecast/series.hpp"
#include "test_util.hpp"

using namespace oeecast;

TEST_CASE("csv load: single row and timestamps") {
  testutil::TempDir dir("series");
  testutil::write_file(dir.file("one.csv"), "oee\n42.0\n");
  const auto ts = load_csv(dir.file("one.csv"), "oee");
  CHECK(ts.size() == 1);
  CHECK(ts[0] == 42.0);
  CHECK_THROWS_AS(summary_stats(ts), InvalidArgument);

  testutil::write_file(dir.file("ts.csv"), "timestamp,oee\n2023-03-01T05:00,1\n2023-03-01T06:00,2\n");
  const auto t2 = load_csv(dir.file("ts.csv"), "oee");
  CHECK(format_hour(t2.timestamp(1)) == "2023-03-01T06:00");
}

TEST_CASE("csv load: non-numeric cell names its row") {
  testutil::TempDir dir("series");
  std::string text = "oee\n";
  for (int i = 1; i <= 10; ++i) text += (i == 7 ? std::string("abc") : std::to_string(i)) + "\n";
  testutil::write_file(dir.file("bad.csv"), text);
  try {
    load_csv(dir.file("bad.csv"), "oee");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 7") != std::string::npos);
  }
}

TEST_CASE("csv load: gaps") {
  testutil::TempDir dir("series");
  testutil::write_file(dir.file("gap.csv"), "timestamp,oee\n2023-03-01T05:00,1\n2023-03-01T07:00,3\n");
  CHECK_THROWS_AS(load_csv(dir.file("gap.csv"), "oee"), ParseError);
  CsvOptions o;
  o.interpolate_gaps = true;
  const auto ts = load_csv(dir.file("gap.csv"), "oee", Hour{}, o);
  REQUIRE(ts.size() == 3);
  CHECK(ts[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(load_csv(dir.file("missing.csv"), "oee"), NotFound);
}

TEST_CASE("summary statistics") {
  const std::vector<double> x{1, 2, 3, 4, 10};
  const auto s = summary_stats(x);
  CHECK(s.count == 5);
  CHECK(s.mean == doctest::Approx(4.0));
  CHECK(s.std_dev == doctest::Approx(std::sqrt(50.0 / 4.0)));
  CHECK(s.median == doctest::Approx(3.0));
  CHECK(s.q25 == doctest::Approx(2.0));
  CHECK(s.q75 == doctest::Approx(4.0));
  REQUIRE(s.skewness);
  CHECK(*s.skewness > 0);

  const auto c = summary_stats(std::vector<double>{5, 5, 5, 5});
  CHECK(c.std_dev == 0.0);
  CHECK_FALSE(c.skewness.has_value());
  CHECK_FALSE(c.kurtosis.has_value());
}

TEST_CASE("kpss: noise mostly stationary, trend rejected") {
  int rejected = 0;
  for (int seed = 0; seed < 50; ++seed) rejected += kpss_test(testutil::gaussian(500, seed), KpssRegression::Level).reject_at_5pct;
  CHECK(rejected <= 5);
  auto v = testutil::gaussian(500, 99);
  for (std::size_t t = 0; t < v.size(); ++t) v[t] += 0.05 * static_cast<double>(t);
  CHECK(kpss_test(v, KpssRegression::Level).reject_at_5pct);
}

TEST_CASE("acf and pacf of an AR(1)") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> x(5000);
  double prev = 0;
  for (auto& v : x) prev = v = 0.8 * prev + g(rng);
  const auto a = acf(x, 5);
  CHECK(a[0] == doctest::Approx(1.0));
  CHECK(a[1] >= 0.77);
  CHECK(a[1] <= 0.83);
  const auto p = pacf(x, 5);
  CHECK(std::abs(p[2]) <= 0.05);

  std::vector<double> rev(x.rbegin(), x.rend());
  const auto ar = acf(rev, 5);
  for (int k = 0; k <= 5; ++k) CHECK(ar[k] == doctest::Approx(a[k]).epsilon(1e-9));
}

TEST_CASE("ljung-box separates noise from AR") {
  CHECK(ljung_box(testutil::gaussian(1000, 4), 10).p_value > 0.01);
  std::vector<double> x = testutil::gaussian(1000, 5);
  for (std::size_t t = 1; t < x.size(); ++t) x[t] += 0.7 * x[t - 1];
  CHECK(ljung_box(x, 10).p_value < 1e-6);
}

TEST_CASE("mae and mape") {
  const std::vector<double> a{10, 20}, p{11, 18};
  CHECK(mae(a, p) == doctest::Approx(1.5));
  CHECK(mape(a, p) == doctest::Approx(0.10));
  CHECK(mae(a, a) == 0.0);
  CHECK(mape(a, a) == 0.0);
}
