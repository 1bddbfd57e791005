#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "oeecast/config.hpp"
#include "oeecast/decompose.hpp"
#include "oeecast/errors.hpp"
#include "oeecast/pipeline.hpp"
#include "oeecast/service.hpp"
#include "oeecast/stat_features.hpp"
#include "oeecast/tda.hpp"

namespace oeecast {

namespace {

struct Common {
  std::string config;
  std::string input;
  std::string column;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c, bool needs_input) {
  cmd->add_option("--config", c.config, "Key-value pipeline config file");
  auto* in = cmd->add_option("--input", c.input, "Input CSV with an OEE column");
  if (needs_input) in->required();
  cmd->add_option("--column", c.column, "Value column (default oee)");
  cmd->add_option("--seed", c.seed, "Seed for randomized stages (default 0)");
}

ConfigFile resolve(const Common& c) {
  ConfigFile f;
  if (!c.config.empty()) f = load_config(c.config);
  if (!c.input.empty()) f.pipeline.dataset = c.input;
  if (!c.column.empty()) f.pipeline.value_column = c.column;
  if (c.seed) f.pipeline.seed = *c.seed;
  return f;
}

TimeSeries load_input(const PipelineConfig& cfg) {
  if (cfg.dataset.empty()) throw InvalidArgument("no input: pass --input or set dataset in --config");
  CsvOptions opts;
  opts.timestamp_column = cfg.timestamp_column;
  return load_csv(cfg.dataset, cfg.value_column, Hour{}, opts);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << text;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int stats_cmd(const Common& c, bool json, std::ostream& out) {
  const auto cfg = resolve(c).pipeline;
  const auto ts = load_input(cfg);
  const auto s = summary_stats(ts);
  const auto kpss = kpss_test(ts, KpssRegression::Level);
  if (json) {
    nlohmann::json j{{"count", s.count}, {"mean", s.mean},     {"std", s.std_dev}, {"min", s.min},
                     {"q25", s.q25},     {"median", s.median}, {"q75", s.q75},     {"max", s.max}};
    j["skewness"] = s.skewness ? nlohmann::json(*s.skewness) : nlohmann::json(nullptr);
    j["kurtosis"] = s.kurtosis ? nlohmann::json(*s.kurtosis) : nlohmann::json(nullptr);
    j["kpss_level"] = {{"statistic", kpss.statistic},
                       {"p_value", std::string(to_string(kpss.p_value_bracket))},
                       {"lags", kpss.lags}};
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%8s %8s %8s %6s %6s %6s %6s %6s\n", "count", "mean", "std", "min", "25%", "50%",
                "75%", "max");
  out << buf;
  std::snprintf(buf, sizeof buf, "%8zu %8.2f %8.2f %6.4g %6.4g %6.4g %6.4g %6.4g\n", s.count, s.mean, s.std_dev, s.min,
                s.q25, s.median, s.q75, s.max);
  out << buf;
  out << "skewness " << (s.skewness ? num(*s.skewness) : "n/a") << "  kurtosis "
      << (s.kurtosis ? num(*s.kurtosis) : "n/a") << '\n';
  out << "KPSS (level) " << num(kpss.statistic) << "  p " << to_string(kpss.p_value_bracket) << "  lags "
      << kpss.lags << '\n';
  return kExitOk;
}

int decompose_cmd(const Common& c, const std::string& output, std::ostream& out) {
  const auto cfg = resolve(c).pipeline;
  const auto ts = load_input(cfg);
  const auto d = decompose(ts, cfg.periods, cfg.decompose_passes);
  save_decomposition_csv(output, d);
  double worst = 0;
  const auto rec = reconstruct(d);
  for (std::size_t i = 0; i < ts.size(); ++i) worst = std::max(worst, std::abs(rec[i] - ts[i]));
  out << "wrote " << output << " (" << ts.size() << " rows, max reconstruction error " << num(worst) << ")\n";
  return kExitOk;
}

int features_cmd(const Common& c, const std::string& mode_text, const std::string& output, bool raw,
                 const std::string& diagrams, std::ostream& out) {
  const auto cfg = resolve(c).pipeline;
  const auto ts = load_input(cfg);
  const auto mode = parse_feature_mode(mode_text);
  if (mode == FeatureMode::None) throw InvalidArgument("--mode must be statistical, topological or both");
  std::vector<double> src = ts.vector();
  if (!raw) src = decompose(ts, cfg.periods, cfg.decompose_passes).residual.vector();
  tda::TdaParams tp = cfg.tda;
  tp.window = cfg.window;
  const std::size_t split = cfg.split_index(src.size());
  const double scale = tda::diagram_scale(src, tp, split);
  const auto fm = pipeline_feature_builder(cfg, mode, scale)(src);
  fm.save_csv(output);
  if (!diagrams.empty()) {
    tp.scale = scale;
    std::vector<std::pair<std::size_t, tda::PersistenceDiagram>> dg;
    for (std::size_t b = 0; b + tp.window <= src.size(); ++b) {
      dg.emplace_back(b + tp.window - 1, tda::scale_diagram(tda::window_diagram(
                                                                std::span<const double>(src).subspan(b, tp.window), tp),
                                                            scale));
    }
    tda::save_diagrams_csv(diagrams, dg);
  }
  out << "wrote " << output << " (" << fm.rows() << " rows x " << fm.cols() << " columns)\n";
  return kExitOk;
}

int select_cmd(const Common& c, const std::string& mode, const std::string& selection, const std::string& output,
               std::ostream& out) {
  auto cfg = resolve(c).pipeline;
  cfg.model = ModelKind::Decomposed;
  if (!mode.empty()) cfg.feature_mode = parse_feature_mode(mode);
  if (!selection.empty()) cfg.selection_mode = parse_selection_mode(selection);
  const auto ts = load_input(cfg);
  const auto res = select_features(cfg, ts);
  for (const auto& st : res.stages) {
    out << st.stage << ": " << st.input_columns.size() << " -> " << st.kept_columns.size() << '\n';
  }
  out << "selected " << res.columns.size() << " columns\n";
  if (!output.empty()) save_manifest(output, res.columns, res.stages);
  return kExitOk;
}

int fit_cmd(const Common& c, const std::string& spec_text, const std::string& exog, bool residual,
            const std::string& output, std::ostream& out) {
  auto cfg = resolve(c).pipeline;
  if (!spec_text.empty()) cfg.spec = sarimax::parse_spec(spec_text);
  const auto ts = load_input(cfg);
  std::vector<double> y = ts.vector();
  if (residual) y = decompose(ts, cfg.periods, cfg.decompose_passes).residual.vector();
  FeatureMatrix x;
  std::span<const double> target(y);
  if (!exog.empty()) {
    // Row i of the file describes the window ending at i; it explains y[i + 1].
    const auto fm = FeatureMatrix::load_csv(exog).shifted(1);
    if (fm.rows() == 0) throw InvalidArgument("exogenous file has no rows");
    const std::size_t first = fm.row_index().front();
    if (first >= y.size()) throw InvalidArgument("exogenous rows lie beyond the series");
    x = fm.rows_by_index(first, y.size() - 1);
    if (x.rows() != y.size() - first) throw InvalidArgument("exogenous rows are not contiguous");
    target = target.subspan(first);
  }
  sarimax::FitOptions opts;
  opts.seed = cfg.seed;
  const auto f = sarimax::fit(target, cfg.spec, x, opts);
  const auto j = sarimax::to_json(f).dump(2);
  if (output.empty()) {
    out << j << '\n';
  } else {
    write_text(output, j + "\n");
    out << "BIC " << num(f.bic) << ", wrote " << output << '\n';
  }
  return kExitOk;
}

int forecast_cmd(const Common& c, std::size_t horizon, const std::string& mode, const std::string& selection,
                 const std::string& model, const std::string& output, std::ostream& out) {
  auto cfg = resolve(c).pipeline;
  if (!model.empty()) cfg.model = parse_model_kind(model);
  if (!mode.empty()) cfg.feature_mode = parse_feature_mode(mode);
  if (!selection.empty()) cfg.selection_mode = parse_selection_mode(selection);
  const auto ts = load_input(cfg);
  const auto fc = forecast_latest(cfg, ts, horizon);
  std::string csv = "step,timestamp,value\n";
  for (std::size_t k = 0; k < fc.values.size(); ++k) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu,%s,%.6f\n", k + 1, format_hour(ts.timestamp(fc.origin_index + k + 1)).c_str(),
                  fc.values[k]);
    csv += buf;
  }
  out << csv;
  if (!output.empty()) write_text(output, csv);
  return kExitOk;
}

int benchmark_cmd(const Common& c, const std::string& csv_path, const std::string& json_path,
                  const std::string& forecasts_dir, std::optional<std::size_t> max_origins, std::ostream& out) {
  auto f = resolve(c);
  if (max_origins) f.pipeline.max_origins = *max_origins;
  const auto ts = load_input(f.pipeline);
  const auto rows = benchmark_configs(f.pipeline, f.statistical_selection, f.topological_selection);
  const auto reports = benchmark(rows, ts);
  out << benchmark_table(reports);
  const auto csv = benchmark_csv(reports);
  if (!csv_path.empty()) write_text(csv_path, csv);
  if (!json_path.empty()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports) j.push_back(r.to_json());
    write_text(json_path, j.dump(2) + "\n");
  }
  if (!forecasts_dir.empty()) {
    std::filesystem::create_directories(forecasts_dir);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      reports[i].save_forecasts_csv(std::filesystem::path(forecasts_dir) / ("row" + std::to_string(i + 1) + ".csv"),
                                    ts);
    }
  }
  return kExitOk;
}

int serve_cmd(std::string registry, std::optional<int> port, const std::string& host, std::ostream& out) {
  if (registry.empty()) {
    if (const char* env = std::getenv("OEE_REGISTRY")) registry = env;
  }
  if (registry.empty()) throw InvalidArgument("no registry: pass --registry or set OEE_REGISTRY");
  int p = 8080;
  if (port) {
    p = *port;
  } else if (const char* env = std::getenv("OEE_PORT")) {
    try {
      p = std::stoi(env);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("OEE_PORT is not a port number: ") + env);
    }
  }
  if (p < 0 || p > 65535) throw InvalidArgument("port out of range");
  ForecastService svc(load_registry(registry));
  out << "serving " << registry << " on " << host << ":" << p << std::endl;
  svc.serve(host, p);
  return kExitOk;
}

}  // namespace

int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hourly OEE forecasting: decomposition, features, selection, SARIMAX, benchmark and service"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Common c;
  bool json = false, raw = false, residual = false;
  std::string output, mode, selection, model, diagrams, spec, exog, csv_path, json_path, forecasts_dir, registry;
  std::string host = "127.0.0.1";
  std::size_t horizon = 4;
  std::optional<std::size_t> max_origins;
  std::optional<int> port;

  auto* stats = app.add_subcommand("stats", "Summary statistics of one series");
  add_common(stats, c, true);
  stats->add_flag("--json", json, "JSON output");

  auto* dec = app.add_subcommand("decompose", "Trend, seasonal and residual components to CSV");
  add_common(dec, c, true);
  dec->add_option("--output", output, "Output CSV")->required();

  auto* feat = app.add_subcommand("features", "Sliding-window feature matrix to CSV");
  add_common(feat, c, true);
  feat->add_option("--mode", mode, "statistical, topological or both")->required();
  feat->add_option("--output", output, "Output CSV")->required();
  feat->add_flag("--raw", raw, "Use the raw series instead of the decomposition residual");
  feat->add_option("--diagrams", diagrams, "Also write per-window persistence diagrams");

  auto* sel = app.add_subcommand("select", "Run the selection stages on the training span");
  add_common(sel, c, false);
  sel->add_option("--mode", mode, "statistical, topological or both");
  sel->add_option("--selection", selection, "none, rfe or rfe+pso");
  sel->add_option("--output", output, "Selection manifest JSON");

  auto* fit = app.add_subcommand("fit", "Fit a SARIMAX model and print its coefficient table");
  add_common(fit, c, true);
  fit->add_option("--spec", spec, "Orders p,d,q,P,D,Q,s or (p,d,q)(P,D,Q)_s");
  fit->add_option("--exog", exog, "Feature matrix CSV used as exogenous regressors (lagged by one)");
  fit->add_flag("--residual", residual, "Fit the decomposition residual");
  fit->add_option("--output", output, "Write JSON here instead of standard output");

  auto* fc = app.add_subcommand("forecast", "Forecast from the last observation");
  add_common(fc, c, false);
  fc->add_option("--horizon", horizon, "Steps ahead")->check(CLI::Range(1, 168));
  fc->add_option("--mode", mode, "Feature mode: none, statistical, topological or both");
  fc->add_option("--selection", selection, "none, rfe or rfe+pso");
  fc->add_option("--model", model, "seasonal-naive, ets, sarima or decomposed");
  fc->add_option("--output", output, "Also write the forecast CSV here");

  auto* bench = app.add_subcommand("benchmark", "Rolling-origin comparison of the six model rows");
  add_common(bench, c, false);
  bench->add_option("--csv", csv_path, "Benchmark CSV (deterministic)");
  bench->add_option("--json", json_path, "Full reports as JSON");
  bench->add_option("--forecasts-dir", forecasts_dir, "Per-row forecast-vs-actual CSV files");
  bench->add_option("--max-origins", max_origins, "Evaluate only the first N test origins");

  auto* serve = app.add_subcommand("serve", "HTTP forecast service over an equipment registry");
  serve->add_option("--registry", registry, "Registry file (env OEE_REGISTRY)");
  serve->add_option("--port", port, "Port (env OEE_PORT, default 8080)");
  serve->add_option("--host", host, "Bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (stats->parsed()) return stats_cmd(c, json, out);
    if (dec->parsed()) return decompose_cmd(c, output, out);
    if (feat->parsed()) return features_cmd(c, mode, output, raw, diagrams, out);
    if (sel->parsed()) return select_cmd(c, mode, selection, output, out);
    if (fit->parsed()) return fit_cmd(c, spec, exog, residual, output, out);
    if (fc->parsed()) return forecast_cmd(c, horizon, mode, selection, model, output, out);
    if (bench->parsed()) return benchmark_cmd(c, csv_path, json_path, forecasts_dir, max_origins, out);
    if (serve->parsed()) return serve_cmd(registry, port, host, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitInvalidArgument;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NotFound& e) {
    err << "not found: " << e.what() << '\n';
    return kExitNotFound;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace oeecast
