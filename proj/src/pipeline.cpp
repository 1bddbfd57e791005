#include "oeecast/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "oeecast/decompose.hpp"
#include "oeecast/errors.hpp"
#include "oeecast/parallel.hpp"
#include "oeecast/stat_features.hpp"

namespace oeecast {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool uses_tda(FeatureMode m) { return m == FeatureMode::Topological || m == FeatureMode::Both; }

tda::TdaParams pipeline_tda(const PipelineConfig& cfg, double scale) {
  tda::TdaParams p = cfg.tda;
  p.window = cfg.window;
  p.stride = 1;
  p.scale = scale;
  return p;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Where a selected column comes from: the statistical or the topological
// catalog, at a given position.
struct ColumnSource {
  bool topological = false;
  std::size_t position = 0;
};

// Forecasting state for one configuration across rolling origins.
class Runner {
 public:
  explicit Runner(const PipelineConfig& cfg) : cfg_(cfg) {
    fit_options_.seed = cfg.seed;
    fit_options_.compute_stderr = false;
  }

  void prepare(std::span<const double> history);
  void prepare_selection(std::span<const double> history);
  double tda_scale() const { return tda_scale_; }
  std::vector<double> forecast(std::span<const double> history, std::size_t horizon);

  double train_mae = 0.0;
  double train_mape = 0.0;
  std::vector<std::string> selected;
  std::vector<SelectionReport> selection;
  std::vector<std::string> failures;

 private:
  void select_features(std::span<const double> residual);
  void train_metrics(std::span<const double> history);
  void update_ets(EtsFit& state, bool& have, std::span<const double> y, bool refit);
  void update_sarima(std::span<const double> y, const FeatureMatrix& x, bool refit);
  FeatureMatrix residual_design(std::span<const double> r) const;
  std::vector<double> feature_row(std::span<const double> window) const;
  std::vector<double> residual_forecast(std::span<const double> r, std::size_t horizon, bool refit);
  void fail(const std::string& what, const Error& e) { failures.push_back(what + ": " + e.what()); }

  const PipelineConfig& cfg_;
  sarimax::FitOptions fit_options_;
  std::size_t calls_ = 0;
  std::optional<sarimax::SarimaxFit> fit_;
  EtsFit ets_;
  bool have_ets_ = false;
  double tda_scale_ = 1.0;
  std::vector<ColumnSource> sources_;
  bool need_stat_ = false;
  bool need_tda_ = false;
};

void Runner::prepare(std::span<const double> history) {
  prepare_selection(history);
  train_metrics(history);
}

void Runner::prepare_selection(std::span<const double> history) {
  if (cfg_.model == ModelKind::Decomposed && cfg_.feature_mode != FeatureMode::None) {
    const auto dec = decompose(TimeSeries(std::vector<double>(history.begin(), history.end())), cfg_.periods,
                               cfg_.decompose_passes);
    select_features(dec.residual.values());
  }
}

void Runner::select_features(std::span<const double> r) {
  const std::size_t w = cfg_.window;
  if (uses_tda(cfg_.feature_mode)) tda_scale_ = tda::diagram_scale(r, pipeline_tda(cfg_, 1.0), r.size());
  const FeatureMatrix full = pipeline_feature_builder(cfg_, cfg_.feature_mode, tda_scale_)(r);
  FeatureMatrix x = full.shifted(1).rows_by_index(w, r.size() - 1);
  const auto yr = r.subspan(w);

  auto [xv, rv] = variance_filter(x, cfg_.variance_threshold);
  selection.push_back(rv);
  auto [xc, rc] = correlation_filter(xv, yr, cfg_.rho_threshold);
  selection.push_back(rc);
  auto [xp, rp] = prune_collinear(xc, xc.rows());
  selection.push_back(rp);
  x = std::move(xp);

  const long cap = static_cast<long>((yr.size() - 1) / 10) - static_cast<long>(cfg_.spec.n_arma()) - 2;
  if (cap < 1) throw InvalidArgument("training span too short for any exogenous column");
  if (x.cols() > static_cast<std::size_t>(cap)) {
    auto [xk, rk] = cap_by_importance(x, yr, static_cast<std::size_t>(cap));
    rk.stage = "capacity";
    selection.push_back(rk);
    x = std::move(xk);
  }

  if (cfg_.selection_mode != SelectionMode::None) {
    sarimax::FitOptions opts = fit_options_;
    auto rfe = rfe_sarimax(yr, x, cfg_.spec, cfg_.rfe_alpha, cfg_.rfe_min_features, opts);
    selection.push_back(rfe.report);
    x = std::move(rfe.features);
  }
  if (cfg_.selection_mode == SelectionMode::RfePso && x.cols() > 0) {
    PsoConfig pc = cfg_.pso;
    pc.seed = cfg_.seed;
    const auto pso = pso_bic(yr, x, cfg_.spec, pc, fit_options_);
    const auto& chosen = cfg_.pso_use_stable_subset ? pso.stable_subset : pso.best_subset;
    SelectionReport rep;
    rep.stage = "pso";
    rep.input_columns = x.column_names();
    rep.kept_columns = chosen;
    for (const auto& c : x.column_names()) {
      if (std::find(chosen.begin(), chosen.end(), c) == chosen.end()) {
        rep.dropped_columns.push_back({c, cfg_.pso_use_stable_subset ? "selected in fewer than the threshold runs"
                                                                     : "not in the lowest-BIC subset"});
      }
    }
    rep.metrics["best_bic"] = pso.best_bic;
    rep.metrics["empty_bic"] = pso.empty_bic;
    rep.metrics["distinct_fits"] = static_cast<double>(pso.distinct_fits);
    selection.push_back(rep);
    x = chosen.empty() ? FeatureMatrix{} : x.select_columns(chosen);
  }
  selected = x.column_names();

  const auto stat_names = stat_feature_names();
  const auto tda_names = tda::tda_feature_names(pipeline_tda(cfg_, tda_scale_));
  for (const auto& name : selected) {
    auto it = std::find(stat_names.begin(), stat_names.end(), name);
    if (it != stat_names.end()) {
      sources_.push_back({false, static_cast<std::size_t>(it - stat_names.begin())});
      need_stat_ = true;
      continue;
    }
    it = std::find(tda_names.begin(), tda_names.end(), name);
    if (it == tda_names.end()) throw InvalidArgument("unknown feature column " + name);
    sources_.push_back({true, static_cast<std::size_t>(it - tda_names.begin())});
    need_tda_ = true;
  }
}

void Runner::train_metrics(std::span<const double> y) {
  const std::size_t n = y.size();
  std::vector<double> pred(n, 0.0);
  std::size_t start = 0;
  switch (cfg_.model) {
    case ModelKind::SeasonalNaive: {
      start = static_cast<std::size_t>(cfg_.naive_period);
      for (std::size_t t = start; t < n; ++t) pred[t] = y[t - start];
      break;
    }
    case ModelKind::EtsRaw: {
      const auto e = ets_fit(y);
      pred = ets_one_step_predictions(y, e.alpha, e.beta);
      start = 1;
      break;
    }
    case ModelKind::SarimaRaw: {
      start = static_cast<std::size_t>(cfg_.spec.burn_in());
      try {
        const auto f = sarimax::fit(y, cfg_.spec, {}, fit_options_);
        const auto ins = sarimax::in_sample_predictions(f, y);
        for (std::size_t i = 0; i < ins.size(); ++i) pred[start + i] = ins[i];
      } catch (const Error& e) {
        fail("train fit", e);
        for (std::size_t t = start; t < n; ++t) pred[t] = t > 0 ? y[t - 1] : y[t];
      }
      break;
    }
    case ModelKind::Decomposed: {
      const auto dec = decompose(TimeSeries(std::vector<double>(y.begin(), y.end())), cfg_.periods,
                                 cfg_.decompose_passes);
      const auto trend = dec.trend.values();
      const auto e = ets_fit(trend);
      pred = ets_one_step_predictions(trend, e.alpha, e.beta);
      for (int p : cfg_.periods) {
        const auto s = dec.seasonal.at(p).values();
        for (std::size_t t = static_cast<std::size_t>(p); t < n; ++t) pred[t] += s[t - static_cast<std::size_t>(p)];
      }
      const auto r = dec.residual.values();
      const std::size_t off = selected.empty() ? 0 : cfg_.window;
      const auto burn = static_cast<std::size_t>(cfg_.spec.burn_in());
      start = std::max(static_cast<std::size_t>(cfg_.periods.back()), off + burn);
      try {
        const auto yr = r.subspan(off);
        const auto f = sarimax::fit(yr, cfg_.spec, residual_design(r), fit_options_);
        const auto ins = sarimax::in_sample_predictions(f, yr);
        for (std::size_t i = 0; i < ins.size(); ++i) pred[off + burn + i] += ins[i];
      } catch (const Error& err) {
        fail("train fit", err);
      }
      break;
    }
  }
  if (start >= n) throw InvalidArgument("training span too short for train metrics");
  std::vector<double> actual(y.begin() + static_cast<long>(start), y.end());
  std::vector<double> fitted;
  for (std::size_t t = start; t < n; ++t) fitted.push_back(std::clamp(pred[t], kOeeFloor, kOeeCeiling));
  train_mae = mae(actual, fitted);
  train_mape = mape(actual, fitted);
}

void Runner::update_ets(EtsFit& state, bool& have, std::span<const double> y, bool refit) {
  if (refit || !have) {
    state = ets_fit(y);
  } else {
    state = ets_filter(y, state.alpha, state.beta);
  }
  have = true;
}

void Runner::update_sarima(std::span<const double> y, const FeatureMatrix& x, bool refit) {
  if (refit || !fit_) {
    try {
      fit_ = sarimax::fit(y, cfg_.spec, x, fit_options_);
      return;
    } catch (const Error& e) {
      fail("refit at history length " + std::to_string(y.size()), e);
    }
  }
  if (fit_) {
    try {
      fit_ = sarimax::refilter(*fit_, y, x);
    } catch (const Error& e) {
      fail("refilter at history length " + std::to_string(y.size()), e);
      fit_.reset();
    }
  }
}

// Selected columns, shifted so row i holds the window ending at i - 1, over
// targets window .. r.size() - 1. Empty when nothing is selected.
FeatureMatrix Runner::residual_design(std::span<const double> r) const {
  if (selected.empty()) return {};
  FeatureMode mode = need_stat_ && need_tda_ ? FeatureMode::Both
                     : need_tda_            ? FeatureMode::Topological
                                            : FeatureMode::Statistical;
  const auto fm = pipeline_feature_builder(cfg_, mode, tda_scale_)(r).select_columns(selected);
  return fm.shifted(1).rows_by_index(cfg_.window, r.size() - 1);
}

std::vector<double> Runner::feature_row(std::span<const double> window) const {
  std::vector<double> s, t;
  if (need_stat_) s = stat_features_of_window(window);
  if (need_tda_) t = tda::tda_features_of_window(window, pipeline_tda(cfg_, tda_scale_), tda_scale_);
  std::vector<double> out;
  out.reserve(sources_.size());
  for (const auto& src : sources_) out.push_back(src.topological ? t[src.position] : s[src.position]);
  return out;
}

std::vector<double> Runner::residual_forecast(std::span<const double> r, std::size_t horizon, bool refit) {
  if (selected.empty()) {
    update_sarima(r, {}, refit);
    if (!fit_) return std::vector<double>(horizon, 0.0);
    return sarimax::forecast(*fit_, horizon).values;
  }
  const std::size_t w = cfg_.window;
  const std::size_t t = r.size() - 1;
  update_sarima(r.subspan(w), residual_design(r), refit);
  if (!fit_) return std::vector<double>(horizon, 0.0);
  std::vector<double> path(r.begin(), r.end());
  FeatureMatrix future(selected);
  std::vector<double> out;
  for (std::size_t k = 1; k <= horizon; ++k) {
    const std::span<const double> window(path.data() + path.size() - w, w);
    future.append_row(t + k, feature_row(window));
    const double v = sarimax::forecast(*fit_, k, future).values.back();
    out.push_back(v);
    path.push_back(v);
  }
  return out;
}

std::vector<double> Runner::forecast(std::span<const double> history, std::size_t horizon) {
  const bool refit = calls_ % cfg_.refit_interval == 0;
  ++calls_;
  std::vector<double> values;
  switch (cfg_.model) {
    case ModelKind::SeasonalNaive:
      values = seasonal_naive_forecast(history, cfg_.naive_period, horizon).values;
      break;
    case ModelKind::EtsRaw:
      update_ets(ets_, have_ets_, history, refit);
      values = ets_forecast(ets_, horizon).values;
      break;
    case ModelKind::SarimaRaw:
      update_sarima(history, {}, refit);
      if (fit_) {
        values = sarimax::forecast(*fit_, horizon).values;
      } else {
        values.assign(horizon, history.back());
      }
      break;
    case ModelKind::Decomposed: {
      const auto dec = decompose(TimeSeries(std::vector<double>(history.begin(), history.end())), cfg_.periods,
                                 cfg_.decompose_passes);
      update_ets(ets_, have_ets_, dec.trend.values(), refit);
      const auto trend = ets_forecast(ets_, horizon);
      std::vector<ForecastResult> seasonals;
      for (int p : cfg_.periods) seasonals.push_back(seasonal_naive_forecast(dec.seasonal.at(p), p, horizon));
      ForecastResult resid{history.size() - 1, horizon, residual_forecast(dec.residual.values(), horizon, refit),
                           cfg_.model_label()};
      return recombine_forecasts(trend, seasonals, resid).values;
    }
  }
  for (double& v : values) v = std::clamp(v, kOeeFloor, kOeeCeiling);
  return values;
}

TimeSeries load_dataset(const PipelineConfig& cfg) {
  if (cfg.dataset.empty()) throw InvalidArgument("no dataset path configured");
  CsvOptions opts;
  opts.timestamp_column = cfg.timestamp_column;
  return load_csv(cfg.dataset, cfg.value_column, Hour{}, opts);
}

void perturb_tail(std::vector<double>& v, std::size_t from, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = from; i < v.size(); ++i) v[i] += 1.0 + 5.0 * std::abs(noise(rng));
}

}  // namespace

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::SeasonalNaive: return "seasonal-naive";
    case ModelKind::EtsRaw: return "ets";
    case ModelKind::SarimaRaw: return "sarima";
    case ModelKind::Decomposed: return "decomposed";
  }
  return "?";
}

std::string to_string(FeatureMode m) {
  switch (m) {
    case FeatureMode::None: return "none";
    case FeatureMode::Statistical: return "statistical";
    case FeatureMode::Topological: return "topological";
    case FeatureMode::Both: return "both";
  }
  return "?";
}

std::string to_string(SelectionMode m) {
  switch (m) {
    case SelectionMode::None: return "none";
    case SelectionMode::Rfe: return "rfe";
    case SelectionMode::RfePso: return "rfe+pso";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  const auto v = lower(s);
  if (v == "seasonal-naive" || v == "naive") return ModelKind::SeasonalNaive;
  if (v == "ets") return ModelKind::EtsRaw;
  if (v == "sarima") return ModelKind::SarimaRaw;
  if (v == "decomposed") return ModelKind::Decomposed;
  throw InvalidArgument("unknown model '" + s + "' (seasonal-naive, ets, sarima, decomposed)");
}

FeatureMode parse_feature_mode(const std::string& s) {
  const auto v = lower(s);
  if (v == "none") return FeatureMode::None;
  if (v == "statistical" || v == "stat") return FeatureMode::Statistical;
  if (v == "topological" || v == "tda") return FeatureMode::Topological;
  if (v == "both") return FeatureMode::Both;
  throw InvalidArgument("unknown feature mode '" + s + "' (none, statistical, topological, both)");
}

SelectionMode parse_selection_mode(const std::string& s) {
  const auto v = lower(s);
  if (v == "none") return SelectionMode::None;
  if (v == "rfe") return SelectionMode::Rfe;
  if (v == "rfe+pso" || v == "rfe-pso" || v == "pso") return SelectionMode::RfePso;
  throw InvalidArgument("unknown selection mode '" + s + "' (none, rfe, rfe+pso)");
}

void PipelineConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 0.5)) throw InvalidArgument("test_fraction must lie in (0, 0.5)");
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  if (refit_interval < 1) throw InvalidArgument("refit_interval must be >= 1");
  if (periods.empty()) throw InvalidArgument("at least one seasonal period is required");
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (periods[i] < 2) throw InvalidArgument("seasonal periods must be >= 2");
    if (i > 0 && periods[i] <= periods[i - 1]) throw InvalidArgument("seasonal periods must increase");
  }
  if (decompose_passes < 1) throw InvalidArgument("decompose_passes must be >= 1");
  if (naive_period < 1) throw InvalidArgument("naive_period must be >= 1");
  if (!(variance_threshold >= 0.0)) throw InvalidArgument("variance_threshold must be >= 0");
  if (!(rho_threshold > 0.0 && rho_threshold <= 1.0)) throw InvalidArgument("rho_threshold must lie in (0, 1]");
  if (!(rfe_alpha > 0.0 && rfe_alpha < 1.0)) throw InvalidArgument("rfe_alpha must lie in (0, 1)");
  spec.validate();
  pso.validate();
  pipeline_tda(*this, 1.0).validate();
}

std::string PipelineConfig::model_label() const {
  if (!label.empty()) return label;
  switch (model) {
    case ModelKind::SeasonalNaive: return "seasonal-naive(" + std::to_string(naive_period) + ")";
    case ModelKind::EtsRaw: return "ets-raw";
    case ModelKind::SarimaRaw: return "sarima-raw" + spec.label();
    case ModelKind::Decomposed: break;
  }
  if (feature_mode == FeatureMode::None) return "decomposed-sarima" + spec.label();
  std::string s = "decomposed-sarimax" + spec.label() + "+" + to_string(feature_mode);
  if (selection_mode != SelectionMode::None) s += "/" + to_string(selection_mode);
  return s;
}

std::size_t PipelineConfig::split_index(std::size_t n) const {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - test_fraction)));
}

nlohmann::json EvaluationReport::to_json() const {
  nlohmann::json sel = nlohmann::json::array();
  for (const auto& s : selection) sel.push_back(s.to_json());
  return {{"model_label", model_label},
          {"mae", mae},
          {"mape", mape},
          {"cost_seconds", cost_seconds},
          {"n_forecasts", n_forecasts},
          {"n_origins", n_origins},
          {"split_index", split_index},
          {"horizon", horizon},
          {"per_step_mae", per_step_mae},
          {"per_step_mape", per_step_mape},
          {"train_mae", train_mae},
          {"train_mape", train_mape},
          {"failed_fits", failed_fits},
          {"fit_failures", fit_failures},
          {"selected_columns", selected_columns},
          {"selection", sel},
          {"origins", origins},
          {"forecasts", forecasts},
          {"actuals", actuals}};
}

void EvaluationReport::save_forecasts_csv(const std::filesystem::path& path, const TimeSeries& ts) const {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << "origin_index,target_index,timestamp,step,actual,predicted\n";
  for (std::size_t i = 0; i < origins.size(); ++i) {
    for (std::size_t k = 0; k < forecasts[i].size(); ++k) {
      const std::size_t target = origins[i] + k + 1;
      out << origins[i] << ',' << target << ',' << format_hour(ts.timestamp(target)) << ',' << (k + 1) << ','
          << fmt_g(actuals[i][k]) << ',' << fmt_g(forecasts[i][k]) << '\n';
    }
  }
}

EvaluationReport evaluate_forecaster(std::span<const double> y, std::size_t split_index, std::size_t horizon,
                                     const ForecastFn& fn, const std::string& label, std::size_t max_origins) {
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  if (split_index < 1 || split_index + horizon > y.size()) {
    throw InvalidArgument("split index leaves no complete test origin");
  }
  EvaluationReport rep;
  rep.model_label = label;
  rep.split_index = split_index;
  rep.horizon = horizon;
  std::vector<double> all_actual, all_pred;
  std::vector<std::vector<double>> step_actual(horizon), step_pred(horizon);
  for (std::size_t t = split_index - 1; t + horizon < y.size(); ++t) {
    if (max_origins > 0 && rep.origins.size() >= max_origins) break;
    auto pred = fn(y.first(t + 1), horizon);
    if (pred.size() != horizon) throw InvalidArgument("forecaster returned the wrong number of values");
    std::vector<double> act(y.begin() + static_cast<long>(t + 1), y.begin() + static_cast<long>(t + 1 + horizon));
    for (std::size_t k = 0; k < horizon; ++k) {
      all_actual.push_back(act[k]);
      all_pred.push_back(pred[k]);
      step_actual[k].push_back(act[k]);
      step_pred[k].push_back(pred[k]);
    }
    rep.origins.push_back(t);
    rep.forecasts.push_back(std::move(pred));
    rep.actuals.push_back(std::move(act));
  }
  rep.n_origins = rep.origins.size();
  rep.n_forecasts = all_actual.size();
  rep.mae = mae(all_actual, all_pred);
  rep.mape = mape(all_actual, all_pred);
  for (std::size_t k = 0; k < horizon; ++k) {
    rep.per_step_mae.push_back(mae(step_actual[k], step_pred[k]));
    rep.per_step_mape.push_back(mape(step_actual[k], step_pred[k]));
  }
  return rep;
}

EvaluationReport rolling_forecast(const PipelineConfig& cfg) { return rolling_forecast(cfg, load_dataset(cfg)); }

EvaluationReport rolling_forecast(const PipelineConfig& cfg, const TimeSeries& ts) {
  cfg.validate();
  const auto y = ts.values();
  const std::size_t split = cfg.split_index(y.size());
  if (split < 2 * static_cast<std::size_t>(cfg.periods.back())) {
    throw InvalidArgument("training span of " + std::to_string(split) + " is shorter than twice the largest period");
  }
  const auto t0 = std::chrono::steady_clock::now();
  Runner runner(cfg);
  runner.prepare(y.first(split));
  auto rep = evaluate_forecaster(
      y, split, cfg.horizon,
      [&](std::span<const double> h, std::size_t k) { return runner.forecast(h, k); }, cfg.model_label(),
      cfg.max_origins);
  rep.cost_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.train_mae = runner.train_mae;
  rep.train_mape = runner.train_mape;
  rep.fit_failures = runner.failures;
  rep.failed_fits = static_cast<int>(runner.failures.size());
  rep.selected_columns = runner.selected;
  rep.selection = runner.selection;
  return rep;
}

ForecastResult forecast_latest(const PipelineConfig& cfg, const TimeSeries& ts, std::size_t horizon) {
  cfg.validate();
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  if (ts.size() < 2 * static_cast<std::size_t>(cfg.periods.back())) {
    throw InvalidArgument("series shorter than twice the largest period");
  }
  Runner runner(cfg);
  runner.prepare(ts.values());
  return {ts.size() - 1, horizon, runner.forecast(ts.values(), horizon), cfg.model_label()};
}

SelectionOutcome select_features(const PipelineConfig& cfg, const TimeSeries& ts) {
  cfg.validate();
  if (cfg.model != ModelKind::Decomposed || cfg.feature_mode == FeatureMode::None) {
    throw InvalidArgument("feature selection needs the decomposed model and a feature mode");
  }
  const std::size_t split = cfg.split_index(ts.size());
  if (split < 2 * static_cast<std::size_t>(cfg.periods.back())) {
    throw InvalidArgument("training span shorter than twice the largest period");
  }
  Runner runner(cfg);
  runner.prepare_selection(ts.values().first(split));
  return {runner.selected, runner.selection, runner.tda_scale()};
}

std::vector<PipelineConfig> benchmark_configs(const PipelineConfig& base, SelectionMode statistical_selection,
                                              SelectionMode topological_selection) {
  std::vector<PipelineConfig> rows;
  const auto row = [&](ModelKind m, FeatureMode f, SelectionMode s) {
    PipelineConfig c = base;
    c.model = m;
    c.feature_mode = f;
    c.selection_mode = s;
    c.label.clear();
    rows.push_back(c);
  };
  row(ModelKind::SeasonalNaive, FeatureMode::None, SelectionMode::None);
  row(ModelKind::EtsRaw, FeatureMode::None, SelectionMode::None);
  row(ModelKind::SarimaRaw, FeatureMode::None, SelectionMode::None);
  row(ModelKind::Decomposed, FeatureMode::None, SelectionMode::None);
  row(ModelKind::Decomposed, FeatureMode::Statistical, statistical_selection);
  row(ModelKind::Decomposed, FeatureMode::Topological, topological_selection);
  return rows;
}

std::vector<EvaluationReport> benchmark(const std::vector<PipelineConfig>& rows, const TimeSeries& ts) {
  if (rows.empty()) throw InvalidArgument("benchmark needs at least one row");
  for (const auto& r : rows) {
    if (r.horizon != rows[0].horizon || r.test_fraction != rows[0].test_fraction ||
        r.max_origins != rows[0].max_origins) {
      throw InvalidArgument("benchmark rows must share horizon and test origins");
    }
  }
  std::vector<EvaluationReport> out(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) { out[i] = rolling_forecast(rows[i], ts); });
  return out;
}

std::vector<EvaluationReport> benchmark(const std::vector<PipelineConfig>& rows) {
  if (rows.empty()) throw InvalidArgument("benchmark needs at least one row");
  for (const auto& r : rows) {
    if (r.dataset != rows[0].dataset || r.value_column != rows[0].value_column) {
      throw InvalidArgument("benchmark rows must share one dataset");
    }
  }
  return benchmark(rows, load_dataset(rows[0]));
}

std::string benchmark_csv(const std::vector<EvaluationReport>& reports) {
  std::ostringstream out;
  const std::size_t h = reports.empty() ? 0 : reports[0].horizon;
  out << "model,mae,mape,train_mae,train_mape,n_origins,n_forecasts,failed_fits";
  for (std::size_t k = 1; k <= h; ++k) out << ",mae_h" << k;
  for (std::size_t k = 1; k <= h; ++k) out << ",mape_h" << k;
  out << '\n';
  for (const auto& r : reports) {
    out << r.model_label << ',' << fmt6(r.mae) << ',' << fmt6(r.mape) << ',' << fmt6(r.train_mae) << ','
        << fmt6(r.train_mape) << ',' << r.n_origins << ',' << r.n_forecasts << ',' << r.failed_fits;
    for (double v : r.per_step_mae) out << ',' << fmt6(v);
    for (double v : r.per_step_mape) out << ',' << fmt6(v);
    out << '\n';
  }
  return out.str();
}

std::string benchmark_table(const std::vector<EvaluationReport>& reports) {
  std::size_t width = 5;
  for (const auto& r : reports) width = std::max(width, r.model_label.size());
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %9s %8s %10s %10s %10s %6s\n", static_cast<int>(width), "model", "MAE", "MAPE",
                "cost (s)", "train MAE", "train MAPE", "failed");
  out << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-*s %9.3f %8.3f %10.2f %10.3f %10.3f %6d\n", static_cast<int>(width),
                  r.model_label.c_str(), r.mae, r.mape, r.cost_seconds, r.train_mae, r.train_mape, r.failed_fits);
    out << buf;
  }
  return out.str();
}

bool leakage_audit(const FeatureMatrix& fm, std::size_t source_length) {
  const auto& idx = fm.row_index();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= source_length) return false;
    if (i > 0 && idx[i] <= idx[i - 1]) return false;
  }
  return true;
}

LeakageAuditResult leakage_audit(std::span<const double> values, const FeatureBuilder& build, std::size_t split_index,
                                 std::uint64_t seed) {
  LeakageAuditResult res;
  const auto flag = [&](bool& which, std::string msg) {
    which = false;
    res.passed = false;
    res.violations.push_back(std::move(msg));
  };
  const std::size_t n = values.size();
  if (split_index >= n) throw InvalidArgument("leakage_audit: split index beyond the series");

  FeatureMatrix base;
  try {
    base = build(values);
  } catch (const InvalidArgument& e) {
    flag(res.row_index_ok, std::string("builder rejected its own rows: ") + e.what());
    return res;
  }
  if (!leakage_audit(base, n)) flag(res.row_index_ok, "row_index not strictly increasing within the source");

  std::vector<std::size_t> probes{split_index, split_index + 1, (split_index + n) / 2, n - 1};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(split_index, n - 1);
  for (int i = 0; i < 3; ++i) probes.push_back(pick(rng));
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  for (std::size_t p : probes) {
    if (p >= n) continue;
    std::vector<double> v(values.begin(), values.end());
    perturb_tail(v, p, rng);
    FeatureMatrix alt;
    try {
      alt = build(v);
    } catch (const InvalidArgument& e) {
      flag(res.row_index_ok, std::string("builder failed on perturbed input: ") + e.what());
      continue;
    }
    std::size_t ia = 0;
    for (std::size_t r = 0; r < base.rows() && base.row_index()[r] < p; ++r) {
      const std::size_t ri = base.row_index()[r];
      while (ia < alt.rows() && alt.row_index()[ia] < ri) ++ia;
      if (ia >= alt.rows() || alt.row_index()[ia] != ri || alt.cols() != base.cols()) {
        flag(res.perturbation_ok, "row " + std::to_string(ri) + " missing after perturbing from " + std::to_string(p));
        break;
      }
      const auto a = base.row(r);
      const auto b = alt.row(ia);
      if (!std::equal(a.begin(), a.end(), b.begin())) {
        flag(res.perturbation_ok,
             "row " + std::to_string(ri) + " changed after perturbing values from " + std::to_string(p));
        break;
      }
    }
  }
  return res;
}

FeatureBuilder pipeline_feature_builder(const PipelineConfig& cfg, FeatureMode mode, double tda_scale) {
  const std::size_t w = cfg.window;
  const tda::TdaParams tp = pipeline_tda(cfg, tda_scale);
  return [w, tp, mode](std::span<const double> v) -> FeatureMatrix {
    switch (mode) {
      case FeatureMode::Statistical: return extract_stat_features(v, w, 1);
      case FeatureMode::Topological: return tda::extract_tda_features(v, tp);
      case FeatureMode::Both:
        return FeatureMatrix::hconcat(extract_stat_features(v, w, 1), tda::extract_tda_features(v, tp));
      case FeatureMode::None: break;
    }
    throw InvalidArgument("feature builder needs a feature mode other than none");
  };
}

bool forecast_perturbation_probe(const PipelineConfig& cfg, const TimeSeries& ts,
                                 const std::vector<std::size_t>& probe_positions, std::string* detail) {
  const auto base = rolling_forecast(cfg, ts);
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t p : probe_positions) {
    if (p >= ts.size()) throw InvalidArgument("probe position beyond the series");
    std::vector<double> v = ts.vector();
    perturb_tail(v, p, rng);
    const auto alt = rolling_forecast(cfg, ts.with_values(std::move(v)));
    for (std::size_t i = 0; i < base.origins.size() && base.origins[i] < p; ++i) {
      if (i >= alt.origins.size() || alt.origins[i] != base.origins[i] || alt.forecasts[i] != base.forecasts[i]) {
        if (detail) {
          *detail = "forecast at origin " + std::to_string(base.origins[i]) + " changed after perturbing from " +
                    std::to_string(p);
        }
        return false;
      }
    }
  }
  return true;
}

}  // namespace oeecast
