#include "oeecast/feat_select.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>

#include "oeecast/errors.hpp"
#include "oeecast/parallel.hpp"

namespace oeecast {

namespace {

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0) || !(sbb > 0)) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

// Average ranks for ties.
std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

std::vector<double> head(const FeatureMatrix& fm, std::size_t c, std::size_t rows) {
  std::vector<double> v(rows);
  for (std::size_t r = 0; r < rows; ++r) v[r] = fm.at(r, c);
  return v;
}

SelectionReport make_report(std::string stage, const FeatureMatrix& fm, const std::vector<bool>& keep,
                            const std::vector<std::string>& reasons) {
  SelectionReport rep;
  rep.stage = std::move(stage);
  rep.input_columns = fm.column_names();
  for (std::size_t c = 0; c < fm.cols(); ++c) {
    if (keep[c]) {
      rep.kept_columns.push_back(fm.column_names()[c]);
    } else {
      rep.dropped_columns.push_back({fm.column_names()[c], reasons[c]});
    }
  }
  return rep;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

nlohmann::json SelectionReport::to_json() const {
  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& d : dropped_columns) dropped.push_back({{"name", d.name}, {"reason", d.reason}});
  nlohmann::json m = nlohmann::json::object();
  for (const auto& [k, v] : metrics) m[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  return {{"stage", stage},
          {"input_count", input_columns.size()},
          {"kept_count", kept_columns.size()},
          {"kept_columns", kept_columns},
          {"dropped_columns", dropped},
          {"metrics", m}};
}

std::pair<FeatureMatrix, SelectionReport> variance_filter(const FeatureMatrix& fm, double threshold,
                                                          std::size_t train_rows) {
  if (fm.rows() == 0) throw InvalidArgument("variance_filter needs at least one row");
  const std::size_t rows = train_rows == 0 ? fm.rows() : std::min(train_rows, fm.rows());
  std::vector<bool> keep(fm.cols());
  std::vector<std::string> reasons(fm.cols());
  std::map<std::string, double> metrics;
  for (std::size_t c = 0; c < fm.cols(); ++c) {
    const double v = sample_variance(head(fm, c, rows));
    metrics["variance." + fm.column_names()[c]] = v;
    keep[c] = !(v < threshold);
    if (!keep[c]) reasons[c] = "variance " + fmt(v) + " < " + fmt(threshold);
  }
  auto rep = make_report("variance", fm, keep, reasons);
  rep.metrics = std::move(metrics);
  if (rep.kept_columns.empty()) {
    std::string names;
    for (const auto& n : fm.column_names()) names += (names.empty() ? "" : ", ") + n;
    throw InvalidArgument("variance filter removed every column: " + names);
  }
  return {fm.select_columns(rep.kept_columns), rep};
}

std::vector<double> spearman_importance(const FeatureMatrix& fm, std::span<const double> target) {
  if (target.size() > fm.rows()) throw InvalidArgument("target longer than the feature matrix");
  const auto rt = ranks(target);
  std::vector<double> out(fm.cols());
  for (std::size_t c = 0; c < fm.cols(); ++c) {
    const auto col = head(fm, c, target.size());
    out[c] = std::abs(pearson(ranks(col), rt));
  }
  return out;
}

std::pair<FeatureMatrix, SelectionReport> correlation_filter(const FeatureMatrix& fm, std::span<const double> target,
                                                             double rho_threshold) {
  if (target.size() != fm.rows() && target.size() > fm.rows()) {
    throw InvalidArgument("correlation_filter: target length exceeds row count");
  }
  const std::size_t rows = target.size();
  const auto importance = spearman_importance(fm, target);
  std::vector<std::vector<double>> cols(fm.cols());
  for (std::size_t c = 0; c < fm.cols(); ++c) cols[c] = head(fm, c, rows);

  struct Pair {
    double rho;
    std::size_t a, b;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < fm.cols(); ++a) {
    for (std::size_t b = a + 1; b < fm.cols(); ++b) {
      const double r = std::abs(pearson(cols[a], cols[b]));
      if (r > rho_threshold) pairs.push_back({r, a, b});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.rho > y.rho; });
  std::vector<bool> keep(fm.cols(), true);
  std::vector<std::string> reasons(fm.cols());
  for (const auto& p : pairs) {
    if (!keep[p.a] || !keep[p.b]) continue;
    const std::size_t loser = importance[p.b] > importance[p.a] ? p.a : p.b;
    const std::size_t winner = loser == p.a ? p.b : p.a;
    keep[loser] = false;
    reasons[loser] = "|rho| " + fmt(p.rho) + " with " + fm.column_names()[winner];
  }
  auto rep = make_report("correlation", fm, keep, reasons);
  for (std::size_t c = 0; c < fm.cols(); ++c) rep.metrics["importance." + fm.column_names()[c]] = importance[c];
  return {fm.select_columns(rep.kept_columns), rep};
}

std::pair<FeatureMatrix, SelectionReport> cap_by_importance(const FeatureMatrix& fm, std::span<const double> target,
                                                            std::size_t max_columns) {
  const auto importance = spearman_importance(fm, target);
  std::vector<std::size_t> order(fm.cols());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
  std::vector<bool> keep(fm.cols(), false);
  std::vector<std::string> reasons(fm.cols(), "importance rank beyond capacity " + std::to_string(max_columns));
  for (std::size_t i = 0; i < std::min(max_columns, order.size()); ++i) keep[order[i]] = true;
  auto rep = make_report("capacity", fm, keep, reasons);
  for (std::size_t c = 0; c < fm.cols(); ++c) rep.metrics["importance." + fm.column_names()[c]] = importance[c];
  return {fm.select_columns(rep.kept_columns), rep};
}

std::pair<FeatureMatrix, SelectionReport> prune_collinear(const FeatureMatrix& fm, std::size_t rows,
                                                          double max_condition) {
  rows = std::min(rows, fm.rows());
  std::vector<std::size_t> alive(fm.cols());
  std::iota(alive.begin(), alive.end(), 0);
  std::vector<bool> keep(fm.cols(), true);
  std::vector<std::string> reasons(fm.cols());
  // Exactly constant columns cannot be z-scored.
  for (std::size_t c = 0; c < fm.cols(); ++c) {
    if (!(sample_variance(head(fm, c, rows)) > 1e-24)) {
      keep[c] = false;
      reasons[c] = "constant over the fitting span";
    }
  }
  alive.erase(std::remove_if(alive.begin(), alive.end(), [&](std::size_t c) { return !keep[c]; }), alive.end());
  double cond = 1.0;
  while (!alive.empty() && rows > 1) {
    Eigen::MatrixXd X(static_cast<long>(rows), static_cast<long>(alive.size()));
    for (std::size_t j = 0; j < alive.size(); ++j) {
      const auto col = head(fm, alive[j], rows);
      const double m = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(rows);
      const double sd = std::sqrt(sample_variance(col));
      for (std::size_t r = 0; r < rows; ++r) X(static_cast<long>(r), static_cast<long>(j)) = (col[r] - m) / sd;
    }
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(X);
    const auto& sv = svd.singularValues();
    cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    if (cond <= max_condition && alive.size() <= rows) break;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    const auto worst_pos =
        static_cast<std::size_t>(qr.colsPermutation().indices()(static_cast<long>(alive.size()) - 1));
    const std::size_t victim = alive[worst_pos];
    keep[victim] = false;
    reasons[victim] = "near-linear dependence (condition " + fmt(cond) + ")";
    alive.erase(alive.begin() + static_cast<long>(worst_pos));
  }
  auto rep = make_report("collinearity", fm, keep, reasons);
  rep.metrics["condition_number"] = cond;
  return {fm.select_columns(rep.kept_columns), rep};
}

RfeResult rfe_sarimax(std::span<const double> y, const FeatureMatrix& fm, const sarimax::SarimaxSpec& spec,
                      double alpha, std::size_t min_features, const sarimax::FitOptions& options) {
  if (fm.cols() < 1) throw InvalidArgument("rfe_sarimax needs at least one column");
  if (fm.rows() != y.size()) throw InvalidArgument("rfe_sarimax: feature rows must align with the series");
  sarimax::FitOptions opts = options;
  opts.compute_stderr = true;
  std::vector<std::string> current = fm.column_names();
  std::map<std::string, std::string> why;
  RfeResult res;
  while (true) {
    const FeatureMatrix x = fm.select_columns(current);
    try {
      res.final_fit = sarimax::fit(y, spec, x, opts);
    } catch (const Error& e) {
      std::string names;
      for (const auto& n : current) names += (names.empty() ? "" : ",") + n;
      throw NumericalError(std::string("RFE fit failed (") + e.what() + "); surviving columns: " + names);
    }
    ++res.fits;
    const auto p = res.final_fit.exog_p_values();
    std::vector<std::size_t> offending;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] > alpha) offending.push_back(j);
    }
    if (offending.empty() || current.size() < min_features) break;
    std::stable_sort(offending.begin(), offending.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
    const std::size_t k = std::max<std::size_t>(1, (offending.size() + 9) / 10);
    std::set<std::string> drop;
    for (std::size_t i = 0; i < k; ++i) {
      drop.insert(current[offending[i]]);
      why[current[offending[i]]] = "p-value " + fmt(p[offending[i]]) + " > " + fmt(alpha);
    }
    std::vector<std::string> next;
    for (const auto& n : current) {
      if (!drop.count(n)) next.push_back(n);
    }
    current = std::move(next);
    if (current.empty()) {
      res.final_fit = sarimax::fit(y, spec, FeatureMatrix{}, opts);
      ++res.fits;
      break;
    }
  }
  res.features = fm.select_columns(current);
  std::set<std::string> kept(current.begin(), current.end());
  std::vector<bool> keep(fm.cols());
  std::vector<std::string> reasons(fm.cols());
  for (std::size_t c = 0; c < fm.cols(); ++c) {
    keep[c] = kept.count(fm.column_names()[c]) > 0;
    if (!keep[c]) reasons[c] = why[fm.column_names()[c]];
  }
  res.report = make_report("rfe", fm, keep, reasons);
  const auto p = res.final_fit.exog_p_values();
  for (std::size_t j = 0; j < current.size() && j < p.size(); ++j) res.report.metrics["p_value." + current[j]] = p[j];
  res.report.metrics["bic"] = res.final_fit.bic;
  res.report.metrics["fits"] = res.fits;
  return res;
}

void PsoConfig::validate() const {
  if (swarm_size < 2) throw InvalidArgument("PSO swarm size must be >= 2");
  if (!(inertia > 0 && inertia < 1)) throw InvalidArgument("PSO inertia must lie in (0, 1)");
  if (runs < 1) throw InvalidArgument("PSO needs at least one run");
  if (stability_threshold > runs) throw InvalidArgument("stability threshold exceeds the number of runs");
  if (max_iterations < 1) throw InvalidArgument("PSO needs at least one iteration");
}

nlohmann::json PsoResult::to_json() const {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : per_run) {
    runs.push_back({{"selected", r.selected}, {"bic", r.bic}, {"iterations", r.iterations},
                    {"gbest_history", r.gbest_history}});
  }
  return {{"best_subset", best_subset}, {"stable_subset", stable_subset}, {"best_bic", best_bic},
          {"empty_bic", empty_bic},     {"distinct_fits", distinct_fits}, {"per_run", runs}};
}

PsoResult pso_bic(std::span<const double> y, const FeatureMatrix& fm, const sarimax::SarimaxSpec& spec,
                  const PsoConfig& cfg, const sarimax::FitOptions& options) {
  cfg.validate();
  if (fm.cols() < 1) throw InvalidArgument("pso_bic needs at least one column");
  if (fm.rows() != y.size()) throw InvalidArgument("pso_bic: feature rows must align with the series");
  const std::size_t n = fm.cols();
  sarimax::FitOptions opts = options;
  opts.compute_stderr = false;

  std::unordered_map<std::string, double> cache;
  const auto subset_of = [&](const std::string& mask) {
    std::vector<std::string> cols;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask[j] == '1') cols.push_back(fm.column_names()[j]);
    }
    return cols;
  };
  const auto bic_of_mask = [&](const std::string& mask) {
    try {
      const auto cols = subset_of(mask);
      return sarimax::fit(y, spec, cols.empty() ? FeatureMatrix{} : fm.select_columns(cols), opts).bic;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  // Evaluates every uncached mask in one parallel batch; results land in
  // fixed slots so the cache contents never depend on thread timing.
  const auto evaluate = [&](const std::vector<std::string>& masks) {
    std::vector<std::string> todo;
    std::set<std::string> queued;
    for (const auto& m : masks) {
      if (!cache.count(m) && queued.insert(m).second) todo.push_back(m);
    }
    std::vector<double> vals(todo.size());
    parallel_for(todo.size(), [&](std::size_t i) { vals[i] = bic_of_mask(todo[i]); });
    for (std::size_t i = 0; i < todo.size(); ++i) cache[todo[i]] = vals[i];
  };

  PsoResult res;
  const std::string empty(n, '0');
  evaluate({empty});
  res.empty_bic = cache[empty];

  const auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  for (int run = 0; run < cfg.runs; ++run) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(run));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto S = static_cast<std::size_t>(cfg.swarm_size);
    std::vector<std::vector<double>> vel(S, std::vector<double>(n));
    std::vector<std::string> pos(S, empty);
    for (std::size_t i = 0; i < S; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        vel[i][j] = 2.0 * unit(rng) - 1.0;
        pos[i][j] = unit(rng) < sigmoid(vel[i][j]) ? '1' : '0';
      }
    }
    std::vector<std::string> pbest = pos;
    std::vector<double> pbest_f(S, std::numeric_limits<double>::infinity());
    std::string gbest = empty;
    double gbest_f = res.empty_bic;
    PsoRun pr;
    int stagnant = 0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
      evaluate(pos);
      bool improved = false;
      for (std::size_t i = 0; i < S; ++i) {
        const double f = cache[pos[i]];
        if (f < pbest_f[i]) {
          pbest_f[i] = f;
          pbest[i] = pos[i];
        }
        if (f < gbest_f - 1e-9) {
          gbest_f = f;
          gbest = pos[i];
          improved = true;
        }
      }
      pr.gbest_history.push_back(gbest_f);
      pr.iterations = it + 1;
      stagnant = improved ? 0 : stagnant + 1;
      if (stagnant >= cfg.stagnation_limit) break;
      for (std::size_t i = 0; i < S; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double x = pos[i][j] == '1' ? 1.0 : 0.0;
          const double pb = pbest[i][j] == '1' ? 1.0 : 0.0;
          const double gb = gbest[j] == '1' ? 1.0 : 0.0;
          double v = cfg.inertia * vel[i][j] + cfg.cognitive * unit(rng) * (pb - x) + cfg.social * unit(rng) * (gb - x);
          v = std::clamp(v, -cfg.velocity_clamp, cfg.velocity_clamp);
          vel[i][j] = v;
          pos[i][j] = unit(rng) < sigmoid(v) ? '1' : '0';
        }
      }
    }
    pr.selected = subset_of(gbest);
    pr.bic = gbest_f;
    res.per_run.push_back(std::move(pr));
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < res.per_run.size(); ++r) {
    if (res.per_run[r].bic < res.per_run[best].bic) best = r;
  }
  res.best_subset = res.per_run[best].selected;
  res.best_bic = res.per_run[best].bic;
  if (!std::isfinite(res.best_bic)) throw NumericalError("every PSO candidate fit failed");
  std::map<std::string, int> votes;
  for (const auto& r : res.per_run) {
    for (const auto& c : r.selected) ++votes[c];
  }
  for (const auto& name : fm.column_names()) {
    if (votes[name] >= cfg.stability_threshold) res.stable_subset.push_back(name);
  }
  res.distinct_fits = cache.size();
  return res;
}

void save_manifest(const std::filesystem::path& path, const std::vector<std::string>& columns,
                   const std::vector<SelectionReport>& stages) {
  nlohmann::json j;
  j["columns"] = columns;
  j["stages"] = nlohmann::json::array();
  for (const auto& s : stages) j["stages"].push_back(s.to_json());
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

std::vector<std::string> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open manifest '" + path.string() + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    return j.at("columns").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed manifest '" + path.string() + "': " + e.what());
  }
}

}  // namespace oeecast
