#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace oracle {

namespace {

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

struct Simplex {
  std::vector<int> vertices;
  double value = 0;
};

}  // namespace

Points random_cloud(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Points p(n, std::vector<double>(dim));
  for (auto& q : p) {
    for (auto& v : q) v = u(rng);
  }
  return p;
}

std::vector<oeecast::tda::PersistencePair> boundary_matrix_persistence(const Points& pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  double max_d = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      d[i][j] = dist(pts[i], pts[j]);
      max_d = std::max(max_d, d[i][j]);
    }
  }
  std::vector<Simplex> cx;
  for (int i = 0; i < n; ++i) cx.push_back({{i}, 0.0});
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) cx.push_back({{i, j}, d[i][j]});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) cx.push_back({{i, j, k}, std::max({d[i][j], d[i][k], d[j][k]})});
    }
  }
  std::stable_sort(cx.begin(), cx.end(), [](const Simplex& a, const Simplex& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.vertices.size() < b.vertices.size();
  });
  std::map<std::vector<int>, int> pos;
  for (int i = 0; i < static_cast<int>(cx.size()); ++i) pos[cx[i].vertices] = i;

  const int m = static_cast<int>(cx.size());
  std::vector<std::vector<int>> col(m);
  for (int j = 0; j < m; ++j) {
    const auto& v = cx[j].vertices;
    if (v.size() < 2) continue;
    for (std::size_t drop = 0; drop < v.size(); ++drop) {
      std::vector<int> face;
      for (std::size_t t = 0; t < v.size(); ++t) {
        if (t != drop) face.push_back(v[t]);
      }
      col[j].push_back(pos.at(face));
    }
    std::sort(col[j].begin(), col[j].end());
  }
  std::vector<int> owner(m, -1);  // low row -> reduced column
  std::vector<bool> paired(m, false);
  std::vector<oeecast::tda::PersistencePair> out;
  for (int j = 0; j < m; ++j) {
    while (!col[j].empty() && owner[col[j].back()] >= 0) {
      const auto& other = col[owner[col[j].back()]];
      std::vector<int> sum;
      std::set_symmetric_difference(col[j].begin(), col[j].end(), other.begin(), other.end(),
                                    std::back_inserter(sum));
      col[j] = std::move(sum);
    }
    if (col[j].empty()) continue;
    const int low = col[j].back();
    owner[low] = j;
    paired[low] = paired[j] = true;
    const int dim = static_cast<int>(cx[low].vertices.size()) - 1;
    const double b = cx[low].value, e = cx[j].value;
    if (dim == 0 || (dim == 1 && e > b)) out.push_back({b, e, dim});
  }
  for (int i = 0; i < m; ++i) {
    if (!paired[i] && cx[i].vertices.size() == 1) out.push_back({0.0, max_d, 0});
  }
  return out;
}

std::vector<double> mst_weights(const Points& pts) {
  const std::size_t n = pts.size();
  std::vector<bool> in(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<double> out;
  best[0] = 0;
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in[i] && (u == n || best[i] < best[u])) u = i;
    }
    in[u] = true;
    if (it > 0) out.push_back(best[u]);
    for (std::size_t i = 0; i < n; ++i) {
      if (!in[i]) best[i] = std::min(best[i], dist(pts[u], pts[i]));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool same_pairs(std::vector<oeecast::tda::PersistencePair> a, std::vector<oeecast::tda::PersistencePair> b,
                double tol) {
  const auto key = [](const oeecast::tda::PersistencePair& p) { return std::make_tuple(p.dim, p.birth, p.death); };
  const auto less = [&](const auto& x, const auto& y) { return key(x) < key(y); };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].dim != b[i].dim || std::abs(a[i].birth - b[i].birth) > tol || std::abs(a[i].death - b[i].death) > tol) {
      return false;
    }
  }
  return true;
}

oeecast::tda::PersistenceDiagram random_diagram(std::size_t pairs, int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  oeecast::tda::PersistenceDiagram d;
  for (std::size_t i = 0; i < pairs; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    d.pairs.push_back({a, b, dim});
  }
  d.max_filtration = 1.0;
  return d;
}

int count_alive(const oeecast::tda::PersistenceDiagram& d, int dim, double t) {
  int c = 0;
  for (const auto& p : d.pairs) {
    if (p.dim == dim && p.birth <= t && t < p.death) ++c;
  }
  return c;
}

double sample_entropy_by_templates(std::span<const double> x, int m, double r) {
  const std::size_t starts = x.size() - static_cast<std::size_t>(m);
  const auto match = [&](std::size_t i, std::size_t j, int len) {
    double worst = 0;
    for (int k = 0; k < len; ++k) worst = std::max(worst, std::abs(x[i + k] - x[j + k]));
    return worst <= r;
  };
  long a = 0, b = 0;
  for (std::size_t i = 0; i < starts; ++i) {
    for (std::size_t j = 0; j < starts; ++j) {
      if (i == j) continue;
      b += match(i, j, m);
      a += match(i, j, m + 1);
    }
  }
  return -std::log(static_cast<double>(a) / static_cast<double>(b));
}

std::vector<double> sar_forecast(std::span<const double> y, double mu, double phi, double seasonal_phi, int s,
                                 std::size_t horizon) {
  std::vector<double> e;
  for (double v : y) e.push_back(v - mu);
  std::vector<double> out;
  for (std::size_t h = 0; h < horizon; ++h) {
    const std::size_t t = e.size();
    const auto lag = [&](std::size_t k) { return e[t - k]; };
    const auto su = static_cast<std::size_t>(s);
    const double v = phi * lag(1) + seasonal_phi * lag(su) - phi * seasonal_phi * lag(su + 1);
    e.push_back(v);
    out.push_back(mu + v);
  }
  return out;
}

}  // namespace oracle
