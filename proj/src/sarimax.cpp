#include "oeecast/sarimax.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "oeecast/errors.hpp"
#include "oeecast/nelder_mead.hpp"

namespace oeecast::sarimax {

namespace {

constexpr int kMaxOrder = 8;
constexpr std::size_t kSimulationBurnIn = 200;

using Lags = std::vector<std::pair<int, double>>;

// Polynomial product of (1 + sum a_i B^i) and (1 + sum b_j B^{s j}) in
// "plus" convention. Returns coefficients for lags 1..len.
std::vector<double> multiply(std::span<const double> a, std::span<const double> b, int s) {
  const int la = static_cast<int>(a.size());
  const int lb = static_cast<int>(b.size()) * s;
  std::vector<double> pa(la + 1, 0.0), pb(lb + 1, 0.0), out(la + lb + 1, 0.0);
  pa[0] = pb[0] = 1.0;
  for (int i = 0; i < la; ++i) pa[i + 1] = a[i];
  for (int j = 0; j < static_cast<int>(b.size()); ++j) pb[(j + 1) * s] = b[j];
  for (int i = 0; i <= la; ++i) {
    for (int j = 0; j <= lb; ++j) out[i + j] += pa[i] * pb[j];
  }
  return {out.begin() + 1, out.end()};
}

struct Polys {
  Lags ar;  // e_t = sum ar_k e_{t-k} + ...
  Lags ma;  // ... + eps_t + sum ma_k eps_{t-k}
};

Polys expand(const SarimaxSpec& spec, std::span<const double> ar, std::span<const double> ma,
             std::span<const double> sar, std::span<const double> sma) {
  // AR side: (1 - sum phi B^i)(1 - sum Phi B^{sj}) = 1 - sum A_k B^k.
  std::vector<double> nar(ar.begin(), ar.end()), nsar(sar.begin(), sar.end());
  for (auto& v : nar) v = -v;
  for (auto& v : nsar) v = -v;
  const auto a = multiply(nar, nsar, spec.s);
  const auto m = multiply(ma, sma, spec.s);
  Polys out;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] != 0.0) out.ar.emplace_back(static_cast<int>(k + 1), -a[k]);
  }
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] != 0.0) out.ma.emplace_back(static_cast<int>(k + 1), m[k]);
  }
  return out;
}

// Conditional residuals: eps_t = 0 for t < start, otherwise
// eps_t = u_t - sum A_k u_{t-k} - sum M_k eps_{t-k}.
void css_filter(const double* u, double* eps, std::size_t n, std::size_t start, const Polys& poly) {
  for (std::size_t t = 0; t < std::min(start, n); ++t) eps[t] = 0.0;
  for (std::size_t t = start; t < n; ++t) {
    double v = u[t];
    for (const auto& [k, c] : poly.ar) v -= c * u[t - static_cast<std::size_t>(k)];
    for (const auto& [k, c] : poly.ma) {
      if (t >= static_cast<std::size_t>(k)) v -= c * eps[t - static_cast<std::size_t>(k)];
    }
    eps[t] = v;
  }
}

struct Split {
  std::vector<double> ar, ma, sar, sma;
};

Split split_arma(const SarimaxSpec& spec, std::span<const double> v) {
  Split s;
  std::size_t i = 0;
  const auto take = [&](int n, std::vector<double>& out) {
    out.assign(v.begin() + static_cast<long>(i), v.begin() + static_cast<long>(i + static_cast<std::size_t>(n)));
    i += static_cast<std::size_t>(n);
  };
  take(spec.p, s.ar);
  take(spec.q, s.ma);
  take(spec.P, s.sar);
  take(spec.Q, s.sma);
  return s;
}

// Unconstrained search vector -> stationary / invertible coefficients.
Split transform(const SarimaxSpec& spec, std::span<const double> u) {
  Split raw = split_arma(spec, u);
  Split out;
  out.ar = constrain_stationary(raw.ar);
  out.sar = constrain_stationary(raw.sar);
  out.ma = constrain_stationary(raw.ma);
  out.sma = constrain_stationary(raw.sma);
  for (auto& v : out.ma) v = -v;
  for (auto& v : out.sma) v = -v;
  return out;
}

bool try_unconstrain(std::span<const double> coefs, std::vector<double>& out, double bound = 0.995) {
  const std::size_t p = coefs.size();
  std::vector<double> phi(coefs.begin(), coefs.end());
  std::vector<double> r(p);
  for (std::size_t k = p; k-- > 0;) {
    const double rk = phi[k];
    if (!(std::abs(rk) < bound)) return false;
    r[k] = rk;
    std::vector<double> prev(k);
    for (std::size_t j = 0; j < k; ++j) prev[j] = (phi[j] + rk * phi[k - 1 - j]) / (1.0 - rk * rk);
    phi = std::move(prev);
  }
  out.resize(p);
  for (std::size_t k = 0; k < p; ++k) out[k] = std::atanh(r[k]);
  return true;
}

// Shrinks toward zero until the coefficients map into the search space.
std::vector<double> unconstrain_shrunk(std::vector<double> coefs) {
  std::vector<double> out;
  for (int attempt = 0; attempt < 60; ++attempt) {
    if (try_unconstrain(coefs, out)) return out;
    for (auto& c : coefs) c *= 0.85;
  }
  return std::vector<double>(coefs.size(), 0.0);
}

struct Problem {
  SarimaxSpec spec;
  std::size_t n = 0;
  std::size_t start = 0;
  Eigen::MatrixXd data;  // column 0 = y, then regressors (intercept first)
  std::size_t n_reg = 0;
};

struct Profile {
  double loglik = -std::numeric_limits<double>::infinity();
  double sigma2 = 0.0;
  Eigen::VectorXd gamma;
  Eigen::MatrixXd filtered;  // css_filter applied to every data column
  bool ok = false;
};

Profile evaluate(const Problem& pr, const Polys& poly) {
  Profile out;
  const std::size_t n = pr.n;
  out.filtered.resize(static_cast<long>(n), pr.data.cols());
  for (long c = 0; c < pr.data.cols(); ++c) {
    css_filter(pr.data.col(c).data(), out.filtered.col(c).data(), n, pr.start, poly);
  }
  const long n_eff = static_cast<long>(n - pr.start);
  const auto fy = out.filtered.col(0).tail(n_eff);
  Eigen::VectorXd r;
  if (pr.n_reg > 0) {
    const auto fz = out.filtered.rightCols(static_cast<long>(pr.n_reg)).bottomRows(n_eff);
    const Eigen::MatrixXd gram = fz.transpose() * fz;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) return out;
    out.gamma = ldlt.solve(fz.transpose() * fy);
    r = fy - fz * out.gamma;
  } else {
    r = fy;
  }
  const double ss = r.squaredNorm();
  if (!std::isfinite(ss) || ss <= 0.0) return out;
  out.sigma2 = ss / static_cast<double>(n_eff);
  out.loglik = -0.5 * static_cast<double>(n_eff) * (std::log(2.0 * M_PI * out.sigma2) + 1.0);
  out.ok = true;
  return out;
}

Eigen::VectorXd ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return X.colPivHouseholderQr().solve(y);
}

// Hannan-Rissanen starting values for the ARMA block (search-space coordinates).
std::vector<double> hannan_rissanen(const Problem& pr) {
  const SarimaxSpec& spec = pr.spec;
  const std::size_t n = pr.n;
  if (spec.n_arma() == 0) return {};

  Eigen::VectorXd e = pr.data.col(0);
  if (pr.n_reg > 0) {
    const Eigen::MatrixXd Z = pr.data.rightCols(static_cast<long>(pr.n_reg));
    e -= Z * ols(Z, e);
  }

  std::vector<double> eps_hat(n, 0.0);
  std::size_t first = static_cast<std::size_t>(spec.ar_lags());
  const bool has_ma = spec.q + spec.Q > 0;
  if (has_ma) {
    std::size_t long_order = std::max<std::size_t>(20, 2 * static_cast<std::size_t>(spec.burn_in()));
    long_order = std::min(long_order, (n - 1) / 3);
    std::vector<double> ev(e.data(), e.data() + n);
    const double mean = e.mean();
    for (auto& v : ev) v -= mean;
    std::vector<double> rho;
    try {
      rho = acf(ev, long_order);
    } catch (const InvalidArgument&) {
      return std::vector<double>(spec.n_arma(), 0.0);
    }
    // Yule-Walker by Durbin-Levinson, keeping the full coefficient vector.
    std::vector<double> phi(long_order + 1, 0.0), prev(long_order + 1, 0.0);
    double v = 1.0;
    for (std::size_t k = 1; k <= long_order; ++k) {
      double num = rho[k];
      for (std::size_t j = 1; j < k; ++j) num -= prev[j] * rho[k - j];
      const double a = num / v;
      phi[k] = a;
      for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - a * prev[k - j];
      v *= (1.0 - a * a);
      prev = phi;
    }
    for (std::size_t t = long_order; t < n; ++t) {
      double r = ev[t];
      for (std::size_t k = 1; k <= long_order; ++k) r -= phi[k] * ev[t - k];
      eps_hat[t] = r;
    }
    first = long_order + static_cast<std::size_t>(spec.burn_in());
  }
  if (first + spec.n_arma() + 5 >= n) return std::vector<double>(spec.n_arma(), 0.0);

  const long rows = static_cast<long>(n - first);
  Eigen::MatrixXd X(rows, static_cast<long>(spec.n_arma()));
  Eigen::VectorXd target(rows);
  for (long r = 0; r < rows; ++r) {
    const std::size_t t = first + static_cast<std::size_t>(r);
    target(r) = e(static_cast<long>(t));
    long c = 0;
    for (int i = 1; i <= spec.p; ++i) X(r, c++) = e(static_cast<long>(t) - i);
    for (int i = 1; i <= spec.q; ++i) X(r, c++) = eps_hat[t - static_cast<std::size_t>(i)];
    for (int j = 1; j <= spec.P; ++j) X(r, c++) = e(static_cast<long>(t) - j * spec.s);
    for (int j = 1; j <= spec.Q; ++j) X(r, c++) = eps_hat[t - static_cast<std::size_t>(j * spec.s)];
  }
  const Eigen::VectorXd coef = ols(X, target);
  std::vector<double> all(coef.data(), coef.data() + coef.size());
  for (double c : all) {
    if (!std::isfinite(c)) return std::vector<double>(spec.n_arma(), 0.0);
  }
  Split sp = split_arma(spec, all);
  for (auto& v : sp.ma) v = -v;
  for (auto& v : sp.sma) v = -v;
  std::vector<double> u;
  for (const auto* part : {&sp.ar, &sp.ma, &sp.sar, &sp.sma}) {
    const auto t = unconstrain_shrunk(*part);
    u.insert(u.end(), t.begin(), t.end());
  }
  return u;
}

double normal_two_sided_p(double z) {
  return std::clamp(std::erfc(std::abs(z) / std::sqrt(2.0)), 0.0, 1.0);
}

std::vector<double> standardize_row(const SarimaxFit& fit, std::span<const double> row) {
  std::vector<double> z(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    z[j] = (row[j] - fit.scaling.mean[j]) / fit.scaling.scale[j];
  }
  return z;
}

double regression_mean(const SarimaxFit& fit, std::span<const double> raw_row) {
  double v = fit.has_intercept ? fit.intercept : 0.0;
  if (!fit.exog_beta.empty()) {
    if (raw_row.size() != fit.exog_beta.size()) {
      throw InvalidArgument("exogenous row has " + std::to_string(raw_row.size()) +
                            " values, model expects " + std::to_string(fit.exog_beta.size()));
    }
    const auto z = standardize_row(fit, raw_row);
    for (std::size_t j = 0; j < z.size(); ++j) v += fit.exog_beta[j] * z[j];
  }
  return v;
}

Polys polys_of(const SarimaxFit& fit) { return expand(fit.spec, fit.ar, fit.ma, fit.sar, fit.sma); }

}  // namespace

void SarimaxSpec::validate() const {
  for (int v : {p, q, P, Q}) {
    if (v < 0 || v > kMaxOrder) throw InvalidArgument("ARMA orders must lie in [0, 8]");
  }
  if (d != 0 || D != 0) throw InvalidArgument("integrated models (d or D > 0) are not supported");
  if (s < 1) throw InvalidArgument("seasonal period must be >= 1");
  if ((P > 0 || Q > 0) && s < 2) throw InvalidArgument("seasonal terms need a period >= 2");
}

std::string SarimaxSpec::label() const {
  std::ostringstream os;
  os << '(' << p << ',' << d << ',' << q << ")(" << P << ',' << D << ',' << Q << ")_" << s;
  return os.str();
}

SarimaxSpec parse_spec(const std::string& text) {
  std::string digits;
  for (char c : text) digits.push_back(std::isdigit(static_cast<unsigned char>(c)) ? c : ' ');
  std::istringstream is(digits);
  std::vector<int> v;
  int x = 0;
  while (is >> x) v.push_back(x);
  if (v.size() != 7) throw ParseError("model spec '" + text + "' needs seven integers p,d,q,P,D,Q,s");
  SarimaxSpec spec{v[0], v[1], v[2], v[3], v[4], v[5], v[6], 0};
  spec.validate();
  return spec;
}

std::vector<double> constrain_stationary(std::span<const double> unconstrained) {
  const std::size_t p = unconstrained.size();
  std::vector<double> phi, prev;
  for (std::size_t k = 0; k < p; ++k) {
    const double r = std::tanh(unconstrained[k]);
    prev = phi;
    phi.assign(k + 1, 0.0);
    for (std::size_t j = 0; j < k; ++j) phi[j] = prev[j] - r * prev[k - 1 - j];
    phi[k] = r;
  }
  return phi;
}

std::vector<double> unconstrain_stationary(std::span<const double> coefficients) {
  std::vector<double> out;
  if (!try_unconstrain(coefficients, out, 1.0)) {
    throw InvalidArgument("coefficients are not stationary");
  }
  return out;
}

bool is_stationary(std::span<const double> coefficients) {
  std::vector<double> phi(coefficients.begin(), coefficients.end());
  for (std::size_t k = phi.size(); k-- > 0;) {
    const double rk = phi[k];
    if (!(std::abs(rk) < 1.0)) return false;
    std::vector<double> prev(k);
    for (std::size_t j = 0; j < k; ++j) prev[j] = (phi[j] + rk * phi[k - 1 - j]) / (1.0 - rk * rk);
    phi = std::move(prev);
  }
  return true;
}

std::size_t SarimaxFit::n_params() const {
  return spec.n_arma() + (has_intercept ? 1 : 0) + exog_beta.size() + 1;
}

std::vector<double> SarimaxFit::exog_p_values() const {
  const std::size_t off = spec.n_arma() + (has_intercept ? 1 : 0);
  return {p_values.begin() + static_cast<long>(off),
          p_values.begin() + static_cast<long>(off + exog_beta.size())};
}

std::vector<double> SarimaxFit::exog_stderr() const {
  const std::size_t off = spec.n_arma() + (has_intercept ? 1 : 0);
  return {stderrs.begin() + static_cast<long>(off),
          stderrs.begin() + static_cast<long>(off + exog_beta.size())};
}

std::vector<double> SarimaxFit::exog_beta_raw() const {
  std::vector<double> out(exog_beta.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = exog_beta[j] / scaling.scale[j];
  return out;
}

SarimaxFit fit(std::span<const double> y, const SarimaxSpec& spec_in, const FeatureMatrix& exog,
               const FitOptions& options) {
  SarimaxSpec spec = spec_in;
  spec.validate();
  const std::size_t n = y.size();
  const std::size_t k_exog = exog.cols();
  if (k_exog > 0 && exog.rows() != n) {
    throw InvalidArgument("exogenous matrix has " + std::to_string(exog.rows()) +
                          " rows for " + std::to_string(n) + " observations");
  }
  spec.n_exog = k_exog;
  const std::size_t n_reg = (options.intercept ? 1 : 0) + k_exog;
  const std::size_t n_params = spec.n_arma() + n_reg + 1;
  if (n <= 10 * n_params) {
    throw InvalidArgument("series of length " + std::to_string(n) + " too short for " +
                          std::to_string(n_params) + " parameters (need > 10 per parameter)");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite observation");
  }

  SarimaxFit out;
  out.spec = spec;
  out.has_intercept = options.intercept;
  out.exog_names = exog.column_names();
  out.scaling.mean.assign(k_exog, 0.0);
  out.scaling.scale.assign(k_exog, 1.0);

  Problem pr;
  pr.spec = spec;
  pr.n = n;
  pr.start = static_cast<std::size_t>(spec.burn_in());
  pr.n_reg = n_reg;
  pr.data.resize(static_cast<long>(n), static_cast<long>(1 + n_reg));
  for (std::size_t t = 0; t < n; ++t) pr.data(static_cast<long>(t), 0) = y[t];
  long col = 1;
  if (options.intercept) pr.data.col(col++).setOnes();
  if (k_exog > 0) {
    Eigen::MatrixXd X(static_cast<long>(n), static_cast<long>(k_exog));
    for (std::size_t j = 0; j < k_exog; ++j) {
      double m = 0.0;
      for (std::size_t t = 0; t < n; ++t) m += exog.at(t, j);
      m /= static_cast<double>(n);
      double ss = 0.0;
      for (std::size_t t = 0; t < n; ++t) ss += (exog.at(t, j) - m) * (exog.at(t, j) - m);
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      if (!(sd > 1e-12 * (1.0 + std::abs(m)))) {
        throw NumericalError("exogenous column '" + exog.column_names()[j] +
                             "' is constant (collinear with the intercept)");
      }
      out.scaling.mean[j] = m;
      out.scaling.scale[j] = sd;
      for (std::size_t t = 0; t < n; ++t) X(static_cast<long>(t), static_cast<long>(j)) = (exog.at(t, j) - m) / sd;
    }
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(X);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                 : std::numeric_limits<double>::infinity();
    if (cond > options.max_condition) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3g", cond);
      throw NumericalError(std::string("exogenous regressors are collinear (condition number ") + buf + ")");
    }
    pr.data.rightCols(static_cast<long>(k_exog)) = X;
  }

  const auto objective = [&](std::span<const double> u) {
    const Split c = transform(spec, u);
    const Profile prof = evaluate(pr, expand(spec, c.ar, c.ma, c.sar, c.sma));
    return prof.ok ? -prof.loglik : std::numeric_limits<double>::infinity();
  };

  const std::vector<double> u0 = hannan_rissanen(pr);
  out.initial_loglik = -objective(u0);

  NelderMeadOptions nm;
  nm.max_iterations = options.max_iterations;
  nm.f_tolerance = options.tolerance;
  NelderMeadResult best = nelder_mead(objective, u0, nm);
  out.iterations = best.iterations;
  out.converged = best.converged;
  if (spec.n_arma() > 0) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> jitter(0.0, 0.5);
    for (int r = 0; r < options.restarts; ++r) {
      std::vector<double> start = best.x;
      for (auto& v : start) v += jitter(rng);
      NelderMeadResult cand = nelder_mead(objective, start, nm);
      out.iterations += cand.iterations;
      if (cand.f < best.f) {
        best = std::move(cand);
        out.converged = best.converged;
      }
    }
  }
  if (!(best.f < std::numeric_limits<double>::max())) {
    throw NumericalError("likelihood evaluation failed at every search point");
  }

  const Split c = transform(spec, best.x);
  out.ar = c.ar;
  out.ma = c.ma;
  out.sar = c.sar;
  out.sma = c.sma;
  const Polys poly = expand(spec, c.ar, c.ma, c.sar, c.sma);
  const Profile prof = evaluate(pr, poly);
  if (!prof.ok) throw NumericalError("degenerate fit: zero residual variance");
  out.sigma2 = prof.sigma2;
  out.loglik = prof.loglik;
  long g = 0;
  if (options.intercept) out.intercept = prof.gamma(g++);
  for (std::size_t j = 0; j < k_exog; ++j) out.exog_beta.push_back(prof.gamma(g++));

  const std::size_t n_eff = n - pr.start;
  out.n_obs = n;
  out.bic = -2.0 * out.loglik + static_cast<double>(n_params) * std::log(static_cast<double>(n_eff));

  // Filter state in terms of the regression error e_t.
  out.e_history.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    double m = 0.0;
    for (long j = 0; j < static_cast<long>(n_reg); ++j) m += pr.data(static_cast<long>(t), 1 + j) * prof.gamma(j);
    out.e_history[t] = y[t] - m;
  }
  out.eps_history.resize(n);
  css_filter(out.e_history.data(), out.eps_history.data(), n, pr.start, poly);
  out.residuals.assign(out.eps_history.begin() + static_cast<long>(pr.start), out.eps_history.end());

  // Coefficient table.
  for (int i = 1; i <= spec.p; ++i) out.param_names.push_back("ar.L" + std::to_string(i));
  for (int i = 1; i <= spec.q; ++i) out.param_names.push_back("ma.L" + std::to_string(i));
  for (int i = 1; i <= spec.P; ++i) out.param_names.push_back("ar.S.L" + std::to_string(i * spec.s));
  for (int i = 1; i <= spec.Q; ++i) out.param_names.push_back("ma.S.L" + std::to_string(i * spec.s));
  if (options.intercept) out.param_names.push_back("intercept");
  for (const auto& nme : out.exog_names) out.param_names.push_back(nme);
  out.param_names.push_back("sigma2");
  for (const auto* part : {&out.ar, &out.ma, &out.sar, &out.sma}) {
    out.estimates.insert(out.estimates.end(), part->begin(), part->end());
  }
  if (options.intercept) out.estimates.push_back(out.intercept);
  out.estimates.insert(out.estimates.end(), out.exog_beta.begin(), out.exog_beta.end());
  out.estimates.push_back(out.sigma2);

  const std::size_t n_mean = spec.n_arma() + n_reg;
  out.stderrs.assign(n_params, std::numeric_limits<double>::quiet_NaN());
  out.p_values.assign(n_params, 1.0);
  if (options.compute_stderr) {
    // Gauss-Newton information from the Jacobian of the conditional residuals:
    // numeric for the ARMA block, exact for the regression block.
    const long n_eff_l = static_cast<long>(n_eff);
    Eigen::MatrixXd J(n_eff_l, static_cast<long>(n_mean));
    std::vector<double> arma = out.estimates;
    arma.resize(spec.n_arma());
    std::vector<double> ep(n), em(n);
    for (std::size_t i = 0; i < spec.n_arma(); ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(arma[i]));
      auto plus = arma, minus = arma;
      plus[i] += h;
      minus[i] -= h;
      const Split sp = split_arma(spec, plus), sm = split_arma(spec, minus);
      css_filter(out.e_history.data(), ep.data(), n, pr.start, expand(spec, sp.ar, sp.ma, sp.sar, sp.sma));
      css_filter(out.e_history.data(), em.data(), n, pr.start, expand(spec, sm.ar, sm.ma, sm.sar, sm.sma));
      for (long r = 0; r < n_eff_l; ++r) {
        const std::size_t t = pr.start + static_cast<std::size_t>(r);
        J(r, static_cast<long>(i)) = (ep[t] - em[t]) / (2.0 * h);
      }
    }
    if (n_reg > 0) {
      J.rightCols(static_cast<long>(n_reg)) =
          -prof.filtered.rightCols(static_cast<long>(n_reg)).bottomRows(n_eff_l);
    }
    const Eigen::MatrixXd info = J.transpose() * J / out.sigma2;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
    const double emax = es.eigenvalues().maxCoeff();
    const double emin = es.eigenvalues().minCoeff();
    if (es.info() == Eigen::Success && emin > 1e-12 * std::max(1.0, emax)) {
      const Eigen::MatrixXd cov = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                                  es.eigenvectors().transpose();
      for (std::size_t i = 0; i < n_mean; ++i) {
        out.stderrs[i] = std::sqrt(cov(static_cast<long>(i), static_cast<long>(i)));
        out.p_values[i] = normal_two_sided_p(out.estimates[i] / out.stderrs[i]);
      }
      out.stderr_available = true;
    }
    const double se_sigma = out.sigma2 * std::sqrt(2.0 / static_cast<double>(n_eff));
    out.stderrs.back() = se_sigma;
    out.p_values.back() = normal_two_sided_p(out.sigma2 / se_sigma);
  }
  return out;
}

double profile_loglik(std::span<const double> y, const SarimaxSpec& spec, const FeatureMatrix& exog,
                      const SarimaxParams& arma, bool intercept) {
  spec.validate();
  const std::size_t n = y.size();
  Problem pr;
  pr.spec = spec;
  pr.n = n;
  pr.start = static_cast<std::size_t>(spec.burn_in());
  pr.n_reg = (intercept ? 1 : 0) + exog.cols();
  pr.data.resize(static_cast<long>(n), static_cast<long>(1 + pr.n_reg));
  for (std::size_t t = 0; t < n; ++t) {
    pr.data(static_cast<long>(t), 0) = y[t];
    long c = 1;
    if (intercept) pr.data(static_cast<long>(t), c++) = 1.0;
    for (std::size_t j = 0; j < exog.cols(); ++j) pr.data(static_cast<long>(t), c++) = exog.at(t, j);
  }
  const Profile p = evaluate(pr, expand(spec, arma.ar, arma.ma, arma.sar, arma.sma));
  return p.loglik;
}

ForecastResult forecast(const SarimaxFit& fit, std::size_t horizon, const FeatureMatrix& exog_future) {
  if (horizon < 1) throw InvalidArgument("forecast horizon must be >= 1");
  if (!fit.exog_beta.empty() && exog_future.rows() < horizon) {
    throw InvalidArgument("forecast needs " + std::to_string(horizon) + " future exogenous rows, got " +
                          std::to_string(exog_future.rows()));
  }
  const Polys poly = polys_of(fit);
  std::vector<double> e = fit.e_history, eps = fit.eps_history;
  const std::size_t n = e.size();
  ForecastResult r{n == 0 ? 0 : n - 1, horizon, std::vector<double>(horizon),
                   "sarimax" + fit.spec.label()};
  for (std::size_t h = 0; h < horizon; ++h) {
    const std::size_t t = n + h;
    double v = 0.0;
    for (const auto& [k, c] : poly.ar) {
      if (t >= static_cast<std::size_t>(k)) v += c * e[t - static_cast<std::size_t>(k)];
    }
    for (const auto& [k, c] : poly.ma) {
      if (t >= static_cast<std::size_t>(k)) v += c * eps[t - static_cast<std::size_t>(k)];
    }
    e.push_back(v);
    eps.push_back(0.0);
    const std::span<const double> row = fit.exog_beta.empty() ? std::span<const double>{} : exog_future.row(h);
    r.values[h] = regression_mean(fit, row) + v;
  }
  return r;
}

SarimaxFit refilter(const SarimaxFit& fit, std::span<const double> y, const FeatureMatrix& exog) {
  if (!fit.exog_beta.empty() && exog.rows() != y.size()) {
    throw InvalidArgument("refilter: exogenous rows do not match the history length");
  }
  SarimaxFit out = fit;
  out.e_history.clear();
  out.eps_history.clear();
  for (std::size_t t = 0; t < y.size(); ++t) {
    extend(out, y[t], fit.exog_beta.empty() ? std::span<const double>{} : exog.row(t));
  }
  return out;
}

void extend(SarimaxFit& fit, double y, std::span<const double> exog_row) {
  const Polys poly = polys_of(fit);
  const double e = y - regression_mean(fit, exog_row);
  const std::size_t t = fit.e_history.size();
  double eps = 0.0;
  if (t >= static_cast<std::size_t>(fit.spec.burn_in())) {
    eps = e;
    for (const auto& [k, c] : poly.ar) eps -= c * fit.e_history[t - static_cast<std::size_t>(k)];
    for (const auto& [k, c] : poly.ma) eps -= c * fit.eps_history[t - static_cast<std::size_t>(k)];
  }
  fit.e_history.push_back(e);
  fit.eps_history.push_back(eps);
}

std::vector<double> in_sample_predictions(const SarimaxFit& fit, std::span<const double> y) {
  if (y.size() != fit.eps_history.size()) {
    throw InvalidArgument("in_sample_predictions: history length mismatch");
  }
  const auto start = static_cast<std::size_t>(fit.spec.burn_in());
  std::vector<double> out;
  for (std::size_t t = start; t < y.size(); ++t) out.push_back(y[t] - fit.eps_history[t]);
  return out;
}

TimeSeries simulate(const SarimaxSpec& spec_in, const SarimaxParams& params, std::size_t n,
                    std::uint64_t seed, const FeatureMatrix& exog) {
  SarimaxSpec spec = spec_in;
  spec.validate();
  if (params.ar.size() != static_cast<std::size_t>(spec.p) || params.ma.size() != static_cast<std::size_t>(spec.q) ||
      params.sar.size() != static_cast<std::size_t>(spec.P) || params.sma.size() != static_cast<std::size_t>(spec.Q)) {
    throw InvalidArgument("simulate: parameter lengths do not match the spec");
  }
  if (!is_stationary(params.ar) || !is_stationary(params.sar)) {
    throw InvalidArgument("simulate: autoregressive parameters are not stationary");
  }
  std::vector<double> nma(params.ma.begin(), params.ma.end()), nsma(params.sma.begin(), params.sma.end());
  for (auto& v : nma) v = -v;
  for (auto& v : nsma) v = -v;
  if (!is_stationary(nma) || !is_stationary(nsma)) {
    throw InvalidArgument("simulate: moving-average parameters are not invertible");
  }
  if (!(params.sigma2 > 0.0)) throw InvalidArgument("simulate: sigma2 must be positive");
  if (n < 1) throw InvalidArgument("simulate: n must be positive");
  if (exog.cols() != params.exog_beta.size() || (exog.cols() > 0 && exog.rows() != n)) {
    throw InvalidArgument("simulate: exogenous matrix does not match beta/n");
  }

  const Polys poly = expand(spec, params.ar, params.ma, params.sar, params.sma);
  const std::size_t total = n + kSimulationBurnIn;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(params.sigma2));
  std::vector<double> e(total, 0.0), eps(total, 0.0);
  for (std::size_t t = 0; t < total; ++t) {
    eps[t] = noise(rng);
    double v = eps[t];
    for (const auto& [k, c] : poly.ar) {
      if (t >= static_cast<std::size_t>(k)) v += c * e[t - static_cast<std::size_t>(k)];
    }
    for (const auto& [k, c] : poly.ma) {
      if (t >= static_cast<std::size_t>(k)) v += c * eps[t - static_cast<std::size_t>(k)];
    }
    e[t] = v;
  }
  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) {
    double v = params.intercept + e[t + kSimulationBurnIn];
    for (std::size_t j = 0; j < exog.cols(); ++j) v += params.exog_beta[j] * exog.at(t, j);
    y[t] = v;
  }
  return TimeSeries(std::move(y), Hour{}, "simulated" + spec.label());
}

double bic_of(const SarimaxFit& fit) { return fit.bic; }

nlohmann::json to_json(const SarimaxFit& fit) {
  nlohmann::json coefs = nlohmann::json::array();
  for (std::size_t i = 0; i < fit.param_names.size(); ++i) {
    nlohmann::json row{{"name", fit.param_names[i]}, {"estimate", fit.estimates[i]}};
    row["stderr"] = std::isfinite(fit.stderrs[i]) ? nlohmann::json(fit.stderrs[i]) : nlohmann::json(nullptr);
    row["p_value"] = fit.p_values[i];
    coefs.push_back(std::move(row));
  }
  return {
      {"spec", fit.spec.label()},
      {"orders", {{"p", fit.spec.p}, {"d", fit.spec.d}, {"q", fit.spec.q},
                  {"P", fit.spec.P}, {"D", fit.spec.D}, {"Q", fit.spec.Q}, {"s", fit.spec.s}}},
      {"n_obs", fit.n_obs},
      {"n_effective", fit.residuals.size()},
      {"loglik", fit.loglik},
      {"bic", fit.bic},
      {"converged", fit.converged},
      {"stderr_available", fit.stderr_available},
      {"exog_units", "standardized"},
      {"coefficients", std::move(coefs)},
  };
}

}  // namespace oeecast::sarimax
