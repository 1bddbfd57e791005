#include "oeecast/service.hpp"

#include <iostream>
#include <optional>

#include <httplib.h>

#include "oeecast/decompose.hpp"
#include "oeecast/errors.hpp"
#include "oeecast/pipeline.hpp"

namespace oeecast {

struct ForecastService::Entry {
  std::mutex mutex;
  std::optional<Stamp> stamp;
  std::optional<TimeSeries> series;
  std::optional<nlohmann::json> forecast;  // kMaxHorizon steps
  std::optional<nlohmann::json> decomposition;

  void reset(const Stamp& s) {
    stamp = s;
    series.reset();
    forecast.reset();
    decomposition.reset();
  }
};

struct ForecastService::Http {
  httplib::Server server;
};

namespace {

nlohmann::json error_body(const std::string& kind, const std::string& message) {
  return {{"error", kind}, {"message", message}};
}

TimeSeries load_series(const PipelineConfig& cfg) {
  CsvOptions opts;
  opts.timestamp_column = cfg.timestamp_column;
  return load_csv(cfg.dataset, cfg.value_column, Hour{}, opts);
}

}  // namespace

ForecastService::ForecastService(EquipmentRegistry registry) : registry_(std::move(registry)) {
  for (const auto& e : registry_.entries) entries_.emplace(e.id, std::make_unique<Entry>());
}

ForecastService::~ForecastService() = default;

ForecastService::Entry& ForecastService::entry(const std::string& id) { return *entries_.at(id); }

ForecastService::Stamp ForecastService::stamp_of(const std::filesystem::path& path) {
  std::error_code ec;
  Stamp s{std::filesystem::last_write_time(path, ec), 0};
  if (ec) throw NotFound("dataset missing: " + path.string());
  s.size = std::filesystem::file_size(path, ec);
  if (ec) throw NotFound("dataset missing: " + path.string());
  return s;
}

ServiceResponse ForecastService::server_error(const std::string& id, const std::exception& e) {
  char diag[32];
  std::snprintf(diag, sizeof diag, "E%06u", ++error_counter_);
  std::cerr << "[" << diag << "] " << id << ": " << e.what() << '\n';
  auto body = error_body("pipeline_failure", e.what());
  body["diagnostic_id"] = diag;
  return {500, body};
}

ServiceResponse ForecastService::list() {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& reg : registry_.entries) {
    auto& en = entry(reg.id);
    std::lock_guard lock(en.mutex);
    try {
      const auto s = stamp_of(reg.config.dataset);
      if (!en.stamp || !(*en.stamp == s)) en.reset(s);
      if (!en.series) en.series = load_series(reg.config);
      items.push_back({{"id", reg.id},
                       {"last_observed", format_hour(en.series->timestamp(en.series->size() - 1))},
                       {"n_observations", en.series->size()}});
    } catch (const std::exception& e) {
      return server_error(reg.id, e);
    }
  }
  return {200, {{"equipment", items}}};
}

ServiceResponse ForecastService::forecast(const std::string& id, const std::string& horizon_text) {
  const auto* reg = registry_.find(id);
  if (!reg) return {404, error_body("not_found", "unknown equipment id '" + id + "'")};
  std::size_t horizon = kDefaultHorizon;
  if (!horizon_text.empty()) {
    std::size_t used = 0;
    long h = 0;
    try {
      h = std::stol(horizon_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != horizon_text.size() || h < 1 || h > static_cast<long>(kMaxHorizon)) {
      return {400, error_body("bad_request", "horizon must be an integer in 1.." + std::to_string(kMaxHorizon))};
    }
    horizon = static_cast<std::size_t>(h);
  }
  auto& en = entry(id);
  std::lock_guard lock(en.mutex);
  try {
    const auto s = stamp_of(reg->config.dataset);
    if (!en.stamp || !(*en.stamp == s)) en.reset(s);
    if (!en.series) en.series = load_series(reg->config);
    if (!en.forecast) {
      // Recursive forecasts: the first h steps of the longest horizon equal
      // an h-step forecast, so one computation serves every horizon.
      const auto fc = forecast_latest(reg->config, *en.series, kMaxHorizon);
      const auto backtest = rolling_forecast(reg->config, *en.series);
      en.forecast = nlohmann::json{{"origin", format_hour(en.series->timestamp(fc.origin_index))},
                                   {"origin_index", fc.origin_index},
                                   {"values", fc.values},
                                   {"model_label", fc.model_label},
                                   {"mae_backtest", backtest.mae}};
    }
    const auto& cached = *en.forecast;
    std::vector<double> values = cached["values"].get<std::vector<double>>();
    values.resize(horizon);
    return {200,
            {{"id", id},
             {"origin", cached["origin"]},
             {"origin_index", cached["origin_index"]},
             {"horizon", horizon},
             {"values", values},
             {"model_label", cached["model_label"]},
             {"mae_backtest", cached["mae_backtest"]}}};
  } catch (const std::exception& e) {
    return server_error(id, e);
  }
}

ServiceResponse ForecastService::decomposition(const std::string& id) {
  const auto* reg = registry_.find(id);
  if (!reg) return {404, error_body("not_found", "unknown equipment id '" + id + "'")};
  auto& en = entry(id);
  std::lock_guard lock(en.mutex);
  try {
    const auto s = stamp_of(reg->config.dataset);
    if (!en.stamp || !(*en.stamp == s)) en.reset(s);
    if (!en.series) en.series = load_series(reg->config);
    if (!en.decomposition) {
      const auto d = decompose(*en.series, reg->config.periods, reg->config.decompose_passes);
      const std::size_t n = en.series->size();
      const std::size_t from = n > kSnapshotLength ? n - kSnapshotLength : 0;
      const auto tail = [&](const TimeSeries& c) {
        return std::vector<double>(c.values().begin() + static_cast<long>(from), c.values().end());
      };
      std::vector<std::string> stamps;
      for (std::size_t i = from; i < n; ++i) stamps.push_back(format_hour(en.series->timestamp(i)));
      nlohmann::json seasonal = nlohmann::json::object();
      for (int p : d.periods) seasonal[std::to_string(p)] = tail(d.seasonal.at(p));
      en.decomposition = nlohmann::json{{"id", id},
                                        {"periods", d.periods},
                                        {"timestamps", stamps},
                                        {"observed", tail(*en.series)},
                                        {"trend", tail(d.trend)},
                                        {"seasonal", seasonal},
                                        {"residual", tail(d.residual)}};
    }
    return {200, *en.decomposition};
  } catch (const std::exception& e) {
    return server_error(id, e);
  }
}

ServiceResponse ForecastService::handle(const std::string& path, const std::map<std::string, std::string>& query) {
  const std::string prefix = "/equipment";
  if (path == prefix || path == prefix + "/") return list();
  if (path.rfind(prefix + "/", 0) == 0) {
    const std::string rest = path.substr(prefix.size() + 1);
    const auto slash = rest.find('/');
    if (slash != std::string::npos) {
      const std::string id = rest.substr(0, slash);
      const std::string what = rest.substr(slash + 1);
      if (what == "forecast") {
        const auto it = query.find("horizon");
        return forecast(id, it == query.end() ? std::string{} : it->second);
      }
      if (what == "decomposition") return decomposition(id);
    }
  }
  return {404, error_body("not_found", "no endpoint " + path)};
}

namespace {

void install_routes(httplib::Server& server, ForecastService& svc) {
  server.Get(R"(/.*)", [&svc](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const auto out = svc.handle(req.path, query);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  });
}

}  // namespace

void ForecastService::serve(const std::string& host, int port) {
  http_ = std::make_unique<Http>();
  install_routes(http_->server, *this);
  if (!http_->server.listen(host, port)) throw InvalidArgument("cannot listen on " + host + ":" + std::to_string(port));
}

int ForecastService::bind_any_port(const std::string& host) {
  http_ = std::make_unique<Http>();
  install_routes(http_->server, *this);
  const int port = http_->server.bind_to_any_port(host);
  if (port < 0) throw InvalidArgument("cannot bind " + host);
  return port;
}

void ForecastService::listen_after_bind() {
  if (!http_) throw InvalidArgument("listen_after_bind without bind_any_port");
  http_->server.listen_after_bind();
}

void ForecastService::stop() {
  if (http_) http_->server.stop();
}

}  // namespace oeecast
