#include "oeecast/tda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <tuple>

#include "oeecast/errors.hpp"
#include "oeecast/parallel.hpp"

namespace oeecast::tda {

namespace {

constexpr int kAmplitudeSamples = 100;

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

std::vector<double> grid(int samples, std::pair<double, double> t_range) {
  if (samples < 1) throw InvalidArgument("sample count must be >= 1");
  if (!(t_range.second >= t_range.first)) throw InvalidArgument("invalid t_range");
  std::vector<double> t(static_cast<std::size_t>(samples));
  if (samples == 1) {
    t[0] = 0.5 * (t_range.first + t_range.second);
    return t;
  }
  const double step = (t_range.second - t_range.first) / (samples - 1);
  for (int i = 0; i < samples; ++i) t[static_cast<std::size_t>(i)] = t_range.first + step * i;
  return t;
}

// Trapezoidal integral over an equally spaced grid covering t_range.
double trapezoid(std::span<const double> f, std::pair<double, double> t_range) {
  const std::size_t n = f.size();
  const double width = t_range.second - t_range.first;
  if (n == 0) return 0.0;
  if (n == 1) return f[0] * width;
  const double h = width / static_cast<double>(n - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (i == 0 || i + 1 == n ? 0.5 : 1.0) * f[i];
  return s * h;
}

double tent(const PersistencePair& p, double t) { return std::max(0.0, std::min(t - p.birth, p.death - t)); }

std::vector<double> lifetimes(const PersistenceDiagram& d, int dim) {
  std::vector<double> out;
  for (const auto& p : d.pairs) {
    if (p.dim == dim) out.push_back(p.lifetime());
  }
  return out;
}

double mutual_information(std::span<const double> x, std::size_t lag, int bins, double lo, double hi) {
  const std::size_t n = x.size() - lag;
  std::vector<double> joint(static_cast<std::size_t>(bins * bins), 0.0), pa(static_cast<std::size_t>(bins), 0.0),
      pb(static_cast<std::size_t>(bins), 0.0);
  const auto bin = [&](double v) {
    return std::clamp(static_cast<int>(std::floor((v - lo) / (hi - lo) * bins)), 0, bins - 1);
  };
  for (std::size_t t = 0; t < n; ++t) {
    const int a = bin(x[t]), b = bin(x[t + lag]);
    joint[static_cast<std::size_t>(a * bins + b)] += 1.0;
    pa[static_cast<std::size_t>(a)] += 1.0;
    pb[static_cast<std::size_t>(b)] += 1.0;
  }
  const double nd = static_cast<double>(n);
  double mi = 0.0;
  for (int a = 0; a < bins; ++a) {
    for (int b = 0; b < bins; ++b) {
      const double j = joint[static_cast<std::size_t>(a * bins + b)];
      if (j == 0) continue;
      mi += j / nd * std::log(j * nd / (pa[static_cast<std::size_t>(a)] * pb[static_cast<std::size_t>(b)]));
    }
  }
  return mi;
}

}  // namespace

std::vector<PersistencePair> PersistenceDiagram::restricted(int dim) const {
  std::vector<PersistencePair> out;
  for (const auto& p : pairs) {
    if (p.dim == dim) out.push_back(p);
  }
  return out;
}

void TdaParams::validate() const {
  if (delay < 1 || embed_dim < 1) throw InvalidArgument("delay and embedding dimension must be >= 1");
  if (window < static_cast<std::size_t>((embed_dim - 1) * delay + 1)) {
    throw InvalidArgument("window shorter than (m-1)*tau + 1");
  }
  if (stride < 1 || betti_bins < 1 || landscape_layers < 1 || landscape_samples < 1) {
    throw InvalidArgument("TDA counts must be >= 1");
  }
  for (int h : homology_dims) {
    if (h != 0 && h != 1) throw InvalidArgument("homology dimensions are limited to 0 and 1");
  }
  if (!(heat_sigma > 0)) throw InvalidArgument("heat sigma must be positive");
  if (wasserstein_order < 1) throw InvalidArgument("Wasserstein order must be >= 1");
  if (silhouette_power < 0) throw InvalidArgument("silhouette power must be >= 0");
  if (scale && !(*scale > 0)) throw InvalidArgument("diagram scale must be positive");
}

PointCloud takens_embed(std::span<const double> x, int delay, int dim) {
  if (delay < 1 || dim < 1) throw InvalidArgument("delay and dimension must be >= 1");
  const std::size_t span_len = static_cast<std::size_t>((dim - 1) * delay);
  if (x.size() < span_len + 1) {
    throw InvalidArgument("series of length " + std::to_string(x.size()) + " too short for delay " +
                          std::to_string(delay) + ", dimension " + std::to_string(dim));
  }
  PointCloud cloud;
  const std::size_t count = x.size() - span_len;
  cloud.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> p(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) p[static_cast<std::size_t>(k)] = x[i + static_cast<std::size_t>(k * delay)];
    cloud.points.push_back(std::move(p));
  }
  return cloud;
}

int estimate_delay(std::span<const double> x, int max_delay) {
  if (max_delay < 1) throw InvalidArgument("max_delay must be >= 1");
  if (x.size() < static_cast<std::size_t>(4 * max_delay)) throw InvalidArgument("series too short for max_delay");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  if (!(*hi_it > *lo_it)) throw InvalidArgument("constant series has no delay structure");
  const int bins = std::clamp(static_cast<int>(std::lround(std::cbrt(static_cast<double>(x.size()) / 16.0))), 4, 16);
  std::vector<double> mi(static_cast<std::size_t>(max_delay) + 2);
  for (std::size_t lag = 0; lag < mi.size() && lag < x.size(); ++lag) {
    mi[lag] = mutual_information(x, lag, bins, *lo_it, *hi_it);
  }
  const double tol = 0.01 * mi[0];
  for (int lag = 1; lag <= max_delay; ++lag) {
    if (mi[static_cast<std::size_t>(lag) + 1] > mi[static_cast<std::size_t>(lag)] - tol) return lag;
  }
  const auto rho = acf(x, std::min<std::size_t>(static_cast<std::size_t>(max_delay), x.size() / 2 - 1));
  for (std::size_t lag = 1; lag < rho.size(); ++lag) {
    if (rho[lag] <= 0.0) return static_cast<int>(lag);
  }
  return max_delay;
}

int estimate_dim_fnn(std::span<const double> x, int delay, int max_dim, double rtol) {
  if (delay < 1 || max_dim < 1) throw InvalidArgument("delay and max_dim must be >= 1");
  if (x.size() < static_cast<std::size_t>(max_dim * delay) + 10) {
    throw InvalidArgument("series too short for an embedding of dimension " + std::to_string(max_dim));
  }
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ra = 0.0;
  for (double v : x) ra += (v - mean) * (v - mean);
  ra = std::sqrt(ra / static_cast<double>(x.size()));
  constexpr double atol = 2.0;
  for (int d = 1; d < max_dim; ++d) {
    const std::size_t n = x.size() - static_cast<std::size_t>(d * delay);
    std::size_t false_nn = 0, counted = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = i;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double dist = 0.0;
        for (int k = 0; k < d; ++k) {
          const double diff = x[i + static_cast<std::size_t>(k * delay)] - x[j + static_cast<std::size_t>(k * delay)];
          dist += diff * diff;
        }
        if (dist < best) {
          best = dist;
          arg = j;
        }
      }
      const double extra = std::abs(x[i + static_cast<std::size_t>(d * delay)] - x[arg + static_cast<std::size_t>(d * delay)]);
      const double r = std::sqrt(best);
      ++counted;
      const bool ratio_test = extra > rtol * std::max(r, 1e-9 * ra);
      const bool size_test = ra > 0 && std::sqrt(best + extra * extra) / ra > atol;
      if (ratio_test || size_test) ++false_nn;
    }
    if (counted == 0 || static_cast<double>(false_nn) / static_cast<double>(counted) < 0.05) return d;
  }
  return max_dim;
}

PersistenceDiagram vr_persistence(const PointCloud& cloud, int max_hom_dim) {
  const std::size_t n = cloud.size();
  if (n < 2) throw InvalidArgument("persistence needs at least 2 points");
  if (max_hom_dim != 0 && max_hom_dim != 1) throw InvalidArgument("max_hom_dim must be 0 or 1");
  for (const auto& p : cloud.points) {
    if (p.size() != cloud.dim()) throw InvalidArgument("point cloud has mixed dimensions");
    for (double v : p) {
      if (!std::isfinite(v)) throw InvalidArgument("point cloud has non-finite coordinates");
    }
  }

  std::vector<double> dist(n * n, 0.0);
  double max_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < cloud.dim(); ++k) {
        const double d = cloud.points[i][k] - cloud.points[j][k];
        s += d * d;
      }
      dist[i * n + j] = dist[j * n + i] = std::sqrt(s);
      max_d = std::max(max_d, std::sqrt(s));
    }
  }

  struct Edge {
    double w;
    std::size_t a, b;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({dist[i * n + j], i, j});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.w, x.a, x.b) < std::tie(y.w, y.a, y.b);
  });

  PersistenceDiagram out;
  out.max_filtration = max_d;
  UnionFind uf(n);
  for (const auto& e : edges) {
    if (uf.unite(e.a, e.b)) out.pairs.push_back({0.0, e.w, 0});
  }
  out.pairs.push_back({0.0, max_d, 0});
  if (max_hom_dim == 0) return out;

  // Edge filtration order, indexed by vertex pair.
  std::vector<std::size_t> edge_pos(n * n, 0);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    edge_pos[edges[k].a * n + edges[k].b] = edge_pos[edges[k].b * n + edges[k].a] = k;
  }
  struct Tri {
    double w;
    std::size_t a, b, c;
  };
  std::vector<Tri> tris;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        tris.push_back({std::max({dist[a * n + b], dist[a * n + c], dist[b * n + c]}), a, b, c});
      }
    }
  }
  std::sort(tris.begin(), tris.end(), [](const Tri& x, const Tri& y) {
    return std::tie(x.w, x.a, x.b, x.c) < std::tie(y.w, y.a, y.b, y.c);
  });

  // Column reduction over Z/2; columns hold sorted edge positions.
  std::vector<std::vector<std::size_t>> reduced;
  std::vector<long> owner(edges.size(), -1);  // pivot row -> reduced column
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const Tri& tr = tris[t];
    std::vector<std::size_t> col = {edge_pos[tr.a * n + tr.b], edge_pos[tr.a * n + tr.c], edge_pos[tr.b * n + tr.c]};
    std::sort(col.begin(), col.end());
    while (!col.empty() && owner[col.back()] >= 0) {
      const auto& other = reduced[static_cast<std::size_t>(owner[col.back()])];
      std::vector<std::size_t> sum;
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(), std::back_inserter(sum));
      col = std::move(sum);
    }
    if (!col.empty()) {
      owner[col.back()] = static_cast<long>(reduced.size());
      const double birth = edges[col.back()].w;
      if (tr.w > birth) out.pairs.push_back({birth, tr.w, 1});
    }
    reduced.push_back(std::move(col));
  }
  return out;
}

PersistenceDiagram scale_diagram(const PersistenceDiagram& d, double scale) {
  if (!(scale > 0)) throw InvalidArgument("diagram scale must be positive");
  PersistenceDiagram out = d;
  for (auto& p : out.pairs) {
    p.birth /= scale;
    p.death /= scale;
  }
  out.max_filtration /= scale;
  return out;
}

EntropyResult persistence_entropy(const PersistenceDiagram& d, int dim) {
  double total = 0.0;
  const auto life = lifetimes(d, dim);
  for (double l : life) {
    if (l > 0) total += l;
  }
  if (!(total > 0)) return {0.0, true};
  double h = 0.0;
  for (double l : life) {
    if (l <= 0) continue;
    const double p = l / total;
    h -= p * std::log(p);
  }
  return {h, false};
}

double bottleneck_amplitude(const PersistenceDiagram& d, int dim) {
  double m = 0.0;
  for (double l : lifetimes(d, dim)) m = std::max(m, l / 2.0);
  return m;
}

double wasserstein_amplitude(const PersistenceDiagram& d, int dim, double p) {
  if (p < 1) throw InvalidArgument("Wasserstein order must be >= 1");
  double s = 0.0;
  for (double l : lifetimes(d, dim)) s += std::pow(l / std::sqrt(2.0), p);
  return std::pow(s, 1.0 / p);
}

std::vector<double> betti_curve(const PersistenceDiagram& d, int dim, int bins, std::pair<double, double> t_range) {
  if (bins < 1) throw InvalidArgument("bins must be >= 1");
  if (!(t_range.second >= t_range.first)) throw InvalidArgument("invalid t_range");
  std::vector<double> out(static_cast<std::size_t>(bins), 0.0);
  const double w = (t_range.second - t_range.first) / bins;
  for (int j = 0; j < bins; ++j) {
    const double t = t_range.first + (j + 0.5) * w;
    for (const auto& p : d.pairs) {
      if (p.dim == dim && p.birth <= t && t < p.death) out[static_cast<std::size_t>(j)] += 1.0;
    }
  }
  return out;
}

std::vector<std::vector<double>> landscape(const PersistenceDiagram& d, int dim, int layers, int samples,
                                           std::pair<double, double> t_range) {
  if (layers < 1) throw InvalidArgument("layers must be >= 1");
  const auto t = grid(samples, t_range);
  const auto pairs = d.restricted(dim);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(layers), std::vector<double>(t.size(), 0.0));
  std::vector<double> vals;
  for (std::size_t j = 0; j < t.size(); ++j) {
    vals.clear();
    for (const auto& p : pairs) vals.push_back(tent(p, t[j]));
    std::sort(vals.begin(), vals.end(), std::greater<>());
    for (std::size_t k = 0; k < out.size() && k < vals.size(); ++k) out[k][j] = vals[k];
  }
  return out;
}

double landscape_norm(const std::vector<std::vector<double>>& lm, double p, std::pair<double, double> t_range) {
  if (p < 1) throw InvalidArgument("norm order must be >= 1");
  double s = 0.0;
  for (const auto& layer : lm) {
    std::vector<double> f(layer.size());
    for (std::size_t j = 0; j < layer.size(); ++j) f[j] = std::pow(std::abs(layer[j]), p);
    s += trapezoid(f, t_range);
  }
  return std::pow(s, 1.0 / p);
}

std::vector<double> silhouette(const PersistenceDiagram& d, int dim, double alpha, int samples,
                               std::pair<double, double> t_range) {
  if (alpha < 0) throw InvalidArgument("silhouette power must be >= 0");
  const auto t = grid(samples, t_range);
  std::vector<double> out(t.size(), 0.0);
  double wsum = 0.0;
  const auto pairs = d.restricted(dim);
  for (const auto& p : pairs) {
    if (p.lifetime() <= 0) continue;
    const double w = std::pow(p.lifetime(), alpha);
    wsum += w;
    for (std::size_t j = 0; j < t.size(); ++j) out[j] += w * tent(p, t[j]);
  }
  if (wsum > 0) {
    for (auto& v : out) v /= wsum;
  }
  return out;
}

double heat_kernel_norm(const PersistenceDiagram& d, int dim, double sigma, int samples,
                        std::pair<double, double> t_range) {
  if (!(sigma > 0)) throw InvalidArgument("heat sigma must be positive");
  const auto t = grid(samples, t_range);
  std::vector<double> h(t.size(), 0.0);
  const double c = 1.0 / std::sqrt(4.0 * M_PI * sigma * sigma);
  for (const auto& p : d.pairs) {
    if (p.dim != dim) continue;
    const double mid = 0.5 * (p.birth + p.death);
    for (std::size_t j = 0; j < t.size(); ++j) {
      h[j] += c * std::exp(-(t[j] - mid) * (t[j] - mid) / (4.0 * sigma * sigma));
    }
  }
  for (auto& v : h) v *= v;
  return std::sqrt(trapezoid(h, t_range));
}

LifetimeStats lifetime_stats(const PersistenceDiagram& d, int dim) {
  auto life = lifetimes(d, dim);
  LifetimeStats s;
  if (life.empty()) return s;
  s.empty = false;
  const double n = static_cast<double>(life.size());
  s.sum = std::accumulate(life.begin(), life.end(), 0.0);
  s.mean = s.sum / n;
  for (double l : life) s.variance += (l - s.mean) * (l - s.mean);
  s.variance /= n;
  s.std = std::sqrt(s.variance);
  s.max = *std::max_element(life.begin(), life.end());
  s.min = *std::min_element(life.begin(), life.end());
  s.median = quantile(life, 0.5);
  return s;
}

PersistenceDiagram window_diagram(std::span<const double> window, const TdaParams& params) {
  return vr_persistence(takens_embed(window, params.delay, params.embed_dim), 1);
}

double diagram_scale(std::span<const double> values, const TdaParams& params, std::size_t end_index) {
  params.validate();
  double m = 0.0;
  for (std::size_t b = 0; b + params.window <= values.size(); b += params.stride) {
    if (b + params.window - 1 >= end_index) break;
    const auto dgm = window_diagram(values.subspan(b, params.window), params);
    for (const auto& p : dgm.pairs) m = std::max(m, p.death);
  }
  return m > 0 ? m : 1.0;
}

std::vector<std::string> tda_feature_names(const TdaParams& params) {
  std::vector<std::string> names;
  for (int h : params.homology_dims) {
    const std::string b = "tda.H" + std::to_string(h) + ".";
    names.push_back(b + "persistence_entropy");
    names.push_back(b + "n_points");
    for (const char* a : {"bottleneck", "wasserstein_p1", "wasserstein_p2", "landscape_p1", "landscape_p2", "betti_l2",
                          "silhouette_l2", "heat_l2"}) {
      names.push_back(b + "amplitude." + a);
    }
    for (int j = 0; j < params.betti_bins; ++j) names.push_back(b + "betti.bin" + std::to_string(j));
    for (int k = 0; k < params.landscape_layers; ++k) {
      for (int j = 0; j < params.landscape_samples; ++j) {
        names.push_back(b + "landscape.layer" + std::to_string(k + 1) + ".t" + std::to_string(j));
      }
    }
    for (const char* pw : {"alpha1", "alpha2"}) {
      for (int j = 0; j < params.landscape_samples; ++j) {
        names.push_back(b + "silhouette." + pw + ".t" + std::to_string(j));
      }
    }
    for (const char* s : {"sum", "mean", "median", "variance", "std", "max", "min"}) {
      names.push_back(b + "lifetime." + s);
    }
    for (const char* s : {"birth_mean", "birth_std", "death_mean", "death_std", "death_max"}) names.push_back(b + s);
  }
  return names;
}

std::vector<double> tda_features_of_window(std::span<const double> window, const TdaParams& params, double scale) {
  const auto dgm = scale_diagram(window_diagram(window, params), scale);
  const std::pair<double, double> unit{0.0, 1.0};
  std::vector<double> out;
  for (int h : params.homology_dims) {
    const auto pairs = dgm.restricted(h);
    out.push_back(persistence_entropy(dgm, h).value);
    out.push_back(static_cast<double>(pairs.size()));
    out.push_back(bottleneck_amplitude(dgm, h));
    out.push_back(wasserstein_amplitude(dgm, h, 1.0));
    out.push_back(wasserstein_amplitude(dgm, h, params.wasserstein_order));
    const auto fine = landscape(dgm, h, params.landscape_layers, kAmplitudeSamples, unit);
    out.push_back(landscape_norm(fine, 1.0, unit));
    out.push_back(landscape_norm(fine, 2.0, unit));
    {
      const auto bc = betti_curve(dgm, h, kAmplitudeSamples, unit);
      double s = 0.0;
      for (double v : bc) s += v * v;
      out.push_back(std::sqrt(s / kAmplitudeSamples));
    }
    {
      auto sil = silhouette(dgm, h, params.silhouette_power, kAmplitudeSamples, unit);
      for (auto& v : sil) v *= v;
      out.push_back(std::sqrt(trapezoid(sil, unit)));
    }
    out.push_back(heat_kernel_norm(dgm, h, params.heat_sigma, kAmplitudeSamples, unit));
    for (double v : betti_curve(dgm, h, params.betti_bins, unit)) out.push_back(v);
    for (const auto& layer : landscape(dgm, h, params.landscape_layers, params.landscape_samples, unit)) {
      out.insert(out.end(), layer.begin(), layer.end());
    }
    for (double alpha : {1.0, 2.0}) {
      const auto sil = silhouette(dgm, h, alpha, params.landscape_samples, unit);
      out.insert(out.end(), sil.begin(), sil.end());
    }
    const auto ls = lifetime_stats(dgm, h);
    for (double v : {ls.sum, ls.mean, ls.median, ls.variance, ls.std, ls.max, ls.min}) out.push_back(v);
    double bm = 0, dm = 0, dmax = 0;
    for (const auto& p : pairs) {
      bm += p.birth;
      dm += p.death;
      dmax = std::max(dmax, p.death);
    }
    const double np = static_cast<double>(pairs.size());
    double bs = 0, ds = 0;
    if (np > 0) {
      bm /= np;
      dm /= np;
      for (const auto& p : pairs) {
        bs += (p.birth - bm) * (p.birth - bm);
        ds += (p.death - dm) * (p.death - dm);
      }
      bs = std::sqrt(bs / np);
      ds = std::sqrt(ds / np);
    }
    for (double v : {bm, bs, dm, ds, dmax}) out.push_back(v);
  }
  return out;
}

FeatureMatrix extract_tda_features(std::span<const double> values, const TdaParams& params) {
  params.validate();
  if (values.size() < params.window) {
    throw InvalidArgument("window " + std::to_string(params.window) + " exceeds series length " +
                          std::to_string(values.size()));
  }
  const double scale = params.scale ? *params.scale : diagram_scale(values, params, values.size());
  const std::size_t rows = (values.size() - params.window) / params.stride + 1;
  std::vector<std::vector<double>> out(rows);
  parallel_for(rows, [&](std::size_t r) {
    out[r] = tda_features_of_window(values.subspan(r * params.stride, params.window), params, scale);
  });
  FeatureMatrix fm(tda_feature_names(params));
  for (std::size_t r = 0; r < rows; ++r) fm.append_row(r * params.stride + params.window - 1, out[r]);
  return fm;
}

void save_diagrams_csv(const std::filesystem::path& path,
                       const std::vector<std::pair<std::size_t, PersistenceDiagram>>& diagrams) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out.precision(17);
  out << "birth,death,dim,window_index\n";
  for (const auto& [w, d] : diagrams) {
    for (const auto& p : d.pairs) out << p.birth << ',' << p.death << ',' << p.dim << ',' << w << '\n';
  }
}

}  // namespace oeecast::tda
