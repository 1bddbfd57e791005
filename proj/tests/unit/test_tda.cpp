#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oeecast/errors.hpp"
#include "oeecast/tda.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace oeecast;
using namespace oeecast::tda;

namespace {

PersistenceDiagram dgm(std::vector<std::pair<double, double>> pairs, int dim = 1) {
  PersistenceDiagram d;
  for (auto [b, e] : pairs) d.pairs.push_back({b, e, dim});
  d.max_filtration = 1.0;
  return d;
}

}  // namespace

TEST_CASE("takens embedding") {
  std::vector<double> x(10);
  for (int i = 0; i < 10; ++i) x[i] = i;
  const auto c = takens_embed(x, 2, 2);
  CHECK(c.points.front() == std::vector<double>{0, 2});
  CHECK(c.points.back() == std::vector<double>{7, 9});
  CHECK(takens_embed(x, 1, 1).size() == 10);
  CHECK(takens_embed(std::vector<double>(24, 0.0), 8, 3).size() == 8);
  CHECK(takens_embed(std::vector<double>(24, 0.0), 8, 3).dim() == 3);
}

TEST_CASE("delay and dimension estimates") {
  std::vector<double> s(1000);
  for (int i = 0; i < 1000; ++i) s[i] = std::sin(2 * std::numbers::pi * i / 20.0);
  CHECK(std::abs(estimate_delay(s, 20) - 5) <= 1);
  CHECK(estimate_delay(testutil::gaussian(1000, 1), 20) == 1);
  CHECK_THROWS_AS(estimate_delay(std::vector<double>(100, 2.0), 10), InvalidArgument);
  CHECK(estimate_dim_fnn(s, 5, 6) == 2);
  CHECK(estimate_dim_fnn(testutil::gaussian(1000, 2), 1, 6) == 6);
  std::vector<double> ramp(200);
  for (int i = 0; i < 200; ++i) ramp[i] = 0.5 * i;
  CHECK(estimate_dim_fnn(ramp, 1, 6) == 1);
}

TEST_CASE("unit square and equilateral triangle") {
  PointCloud sq{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const auto d = vr_persistence(sq);
  const auto h1 = d.restricted(1);
  REQUIRE(h1.size() == 1);
  CHECK(h1[0].birth == doctest::Approx(1.0));
  CHECK(h1[0].death == doctest::Approx(std::sqrt(2.0)));
  const auto h0 = d.restricted(0);
  CHECK(h0.size() == 4);
  CHECK(std::count_if(h0.begin(), h0.end(), [&](const auto& p) { return p.death < d.max_filtration; }) == 3);

  PointCloud tri{{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}}};
  CHECK(vr_persistence(tri).restricted(1).empty());
}

TEST_CASE("persistence matches the boundary-matrix oracle") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 10; ++k) {
    const auto pts = oracle::random_cloud(8, 2, rng);
    CHECK(oracle::same_pairs(vr_persistence(PointCloud{pts}).pairs, oracle::boundary_matrix_persistence(pts)));
  }
}

TEST_CASE("scaling") {
  const auto d = dgm({{1, std::sqrt(2.0)}});
  const auto s = scale_diagram(d, 2.0);
  CHECK(s.pairs[0].birth == doctest::Approx(0.5));
  CHECK(s.pairs[0].death == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(scale_diagram(d, 1.0).pairs[0].death == d.pairs[0].death);
}

TEST_CASE("entropy and amplitudes") {
  CHECK(persistence_entropy(dgm({{0, 1}}), 1).value == 0.0);
  CHECK(persistence_entropy(dgm({{0, 1}, {2, 3}}), 1).value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(persistence_entropy(dgm({{0, 1}, {0, 3}}), 1).value ==
        doctest::Approx(-(0.25 * std::log(0.25) + 0.75 * std::log(0.75))));
  CHECK(bottleneck_amplitude(dgm({}), 1) == 0.0);
  CHECK(bottleneck_amplitude(dgm({{1, 3}}), 1) == doctest::Approx(1.0));
  CHECK(bottleneck_amplitude(dgm({{0, 1}, {0, 4}}), 1) == doctest::Approx(2.0));
  CHECK(wasserstein_amplitude(dgm({}), 1) == 0.0);
  CHECK(wasserstein_amplitude(dgm({{0, 2}}), 1, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(wasserstein_amplitude(dgm({{0, 1}, {0, 1}}), 1, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("betti curves") {
  const auto b = betti_curve(dgm({{0, 2}}), 1, 4, {0.0, 2.0});  // midpoints .25 .75 1.25 1.75
  for (double v : b) CHECK(v == 1.0);
  for (double v : betti_curve(dgm({}), 1, 5)) CHECK(v == 0.0);
  const auto d = dgm({{0, 1}, {0.5, 2}});
  const auto c = betti_curve(d, 1, 4, {0.5, 2.5});  // midpoints .75 1.25 1.75 2.25
  CHECK(c[0] == 2.0);
  CHECK(c[1] == 1.0);
  CHECK(c[3] == 0.0);
}

TEST_CASE("landscapes") {
  const auto l = landscape(dgm({{0, 2}}), 1, 2, 3, {0.0, 2.0});
  CHECK(l[0][1] == doctest::Approx(1.0));
  for (double v : l[1]) CHECK(v == 0.0);
  const auto m = landscape(dgm({{0, 2}, {1, 3}}), 1, 2, 3, {0.5, 2.5});  // t = .5 1.5 2.5
  CHECK(m[0][1] == doctest::Approx(0.5));
  CHECK(m[1][1] == doctest::Approx(0.5));
  const auto fine = landscape(dgm({{0, 2}}), 1, 1, 2001, {0.0, 2.0});
  CHECK(landscape_norm(fine, 1.0, {0.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-5));
  auto scaled = fine;
  for (auto& row : scaled) {
    for (auto& v : row) v *= 3.0;
  }
  CHECK(landscape_norm(scaled, 2.0, {0.0, 2.0}) == doctest::Approx(3.0 * landscape_norm(fine, 2.0, {0.0, 2.0})));
  CHECK(landscape_norm(landscape(dgm({}), 1, 2, 10), 2.0) == 0.0);
}

TEST_CASE("silhouettes") {
  const auto one = silhouette(dgm({{0, 2}}), 1, 1.0, 3, {0.0, 2.0});
  CHECK(one[1] == doctest::Approx(1.0));
  const auto two = silhouette(dgm({{0, 2}, {0, 4}}), 1, 1.0, 5, {0.0, 4.0});  // t = 0 1 2 3 4
  CHECK(two[1] == doctest::Approx(1.0));
  const auto flat = silhouette(dgm({{0, 2}, {0, 2}}), 1, 0.0, 3, {0.0, 2.0});
  CHECK(flat[1] == doctest::Approx(1.0));
}

TEST_CASE("heat kernel norm against quadrature") {
  CHECK(heat_kernel_norm(dgm({}), 1, 0.1, 50) == 0.0);
  const double s = 0.1, m = 0.5;
  const auto f = [&](double t) {
    const double g = std::exp(-(t - m) * (t - m) / (4 * s * s)) / std::sqrt(4 * std::numbers::pi * s * s);
    return g * g;
  };
  const double want = std::sqrt(oracle::trapezoid(f, -1.0, 2.0, 200000));
  CHECK(heat_kernel_norm(dgm({{0.3, 0.7}}), 1, s, 3001, {-1.0, 2.0}) == doctest::Approx(want).epsilon(1e-4));
  CHECK(heat_kernel_norm(dgm({{0.3, 0.7}, {0.3, 0.7}}), 1, s, 3001, {-1.0, 2.0}) ==
        doctest::Approx(2 * heat_kernel_norm(dgm({{0.3, 0.7}}), 1, s, 3001, {-1.0, 2.0})));
}

TEST_CASE("lifetime statistics") {
  const auto st = lifetime_stats(dgm({{0, 1}, {1, 4}}), 1);
  CHECK(st.sum == 4.0);
  CHECK(st.mean == 2.0);
  CHECK(st.max == 3.0);
  CHECK(st.min == 1.0);
  CHECK(lifetime_stats(dgm({}), 1).empty);
  std::mt19937_64 rng(5);
  const auto d = oracle::random_diagram(100, 1, rng);
  std::vector<double> l;
  for (const auto& p : d.pairs) l.push_back(p.lifetime());
  double mean = 0;
  for (double v : l) mean += v;
  mean /= 100;
  double var = 0;
  for (double v : l) var += (v - mean) * (v - mean);
  var /= 100;
  const auto r = lifetime_stats(d, 1);
  CHECK(std::abs(r.mean - mean) < 1e-12);
  CHECK(std::abs(r.variance - var) < 1e-12);
  CHECK(std::abs(r.std - std::sqrt(var)) < 1e-12);
}

TEST_CASE("feature matrix scale and invariances") {
  const auto names = tda_feature_names();
  CHECK(names.size() == 144);
  auto x = testutil::gaussian(120, 8);
  TdaParams p;
  p.scale = 2.0;
  const auto a = extract_tda_features(x, p);
  CHECK(a.cols() == 144);
  CHECK(a.row_index().front() == 23);
  for (auto& v : x) v += 100.0;
  const auto b = extract_tda_features(x, p);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) CHECK(b.at(r, c) == doctest::Approx(a.at(r, c)).epsilon(1e-9));
  }
  const auto flat = tda_features_of_window(std::vector<double>(24, 4.0), p, 1.0);
  for (double v : flat) CHECK(std::isfinite(v));
}
