#include <doctest.h>

#include <cmath>

#include "oeecast/errors.hpp"
#include "oeecast/pipeline.hpp"
#include "oeecast/stat_features.hpp"
#include "oeecast/synthetic.hpp"
#include "test_util.hpp"

using namespace oeecast;

namespace {

TimeSeries surrogate(std::uint64_t seed = 1) { return synthetic_oee(surrogate_profile("GH2", seed)); }

PipelineConfig quick(ModelKind m, FeatureMode f = FeatureMode::None) {
  PipelineConfig c;
  c.model = m;
  c.feature_mode = f;
  c.max_origins = 12;
  return c;
}

}  // namespace

TEST_CASE("config validation and labels") {
  PipelineConfig c;
  CHECK_NOTHROW(c.validate());
  c.test_fraction = 0.5;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.test_fraction = 0.2;
  c.horizon = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.horizon = 4;
  CHECK(c.split_index(648) == 518);
  c.feature_mode = FeatureMode::Topological;
  c.selection_mode = SelectionMode::RfePso;
  CHECK(c.model_label() == "decomposed-sarimax(4,0,0)(1,0,1)_8+topological/rfe+pso");
  CHECK(parse_selection_mode("rfe+pso") == SelectionMode::RfePso);
  CHECK(parse_feature_mode("tda") == FeatureMode::Topological);
  CHECK_THROWS_AS(parse_model_kind("lstm"), InvalidArgument);
}

TEST_CASE("perfect-foresight forecaster scores zero") {
  const auto ts = surrogate();
  const auto y = ts.values();
  const auto oracle = [&](std::span<const double> h, std::size_t k) {
    return std::vector<double>(y.begin() + static_cast<long>(h.size()), y.begin() + static_cast<long>(h.size() + k));
  };
  const auto rep = evaluate_forecaster(y, 518, 4, oracle, "oracle");
  CHECK(rep.mae == 0.0);
  CHECK(rep.mape == 0.0);
  CHECK(rep.n_origins == 648 - 4 - 517);
  CHECK(rep.n_forecasts == rep.n_origins * 4);
  CHECK(rep.origins.front() == 517);
  CHECK(rep.per_step_mae.size() == 4);
}

TEST_CASE("SARIMA beats seasonal-naive on a seasonal ARMA series") {
  sarimax::SarimaxParams p;
  p.ar = {0.7};
  p.sar = {0.5};
  p.intercept = 30.0;
  p.sigma2 = 4.0;
  const auto sp = testutil::spec(1, 0, 1, 0, 8);
  const auto ts = sarimax::simulate(sp, p, 600, 3);
  PipelineConfig naive = quick(ModelKind::SeasonalNaive);
  naive.max_origins = 0;
  PipelineConfig sarima = naive;
  sarima.model = ModelKind::SarimaRaw;
  sarima.spec = sp;
  CHECK(rolling_forecast(naive, ts).mae > rolling_forecast(sarima, ts).mae);
}

TEST_CASE("decomposed rows produce bounded forecasts and train metrics") {
  const auto ts = surrogate();
  for (auto f : {FeatureMode::None, FeatureMode::Topological}) {
    const auto rep = rolling_forecast(quick(ModelKind::Decomposed, f), ts);
    CHECK(rep.n_origins == 12);
    CHECK(rep.train_mae > 0.0);
    CHECK(rep.cost_seconds >= 0.0);
    for (const auto& row : rep.forecasts) {
      for (double v : row) {
        CHECK(v >= 1.0);
        CHECK(v <= 60.0);
      }
    }
    if (f == FeatureMode::Topological) CHECK_FALSE(rep.selection.empty());
  }
}

TEST_CASE("forecast_latest") {
  const auto ts = surrogate();
  const auto fc = forecast_latest(quick(ModelKind::Decomposed, FeatureMode::Statistical), ts, 4);
  CHECK(fc.values.size() == 4);
  CHECK(fc.origin_index == 647);
  for (double v : fc.values) CHECK((v >= 1.0 && v <= 60.0));
}

TEST_CASE("benchmark rows, csv and determinism") {
  const auto ts = surrogate(2);
  PipelineConfig base;
  base.max_origins = 6;
  const auto rows = benchmark_configs(base);
  CHECK(rows.size() == 6);
  const auto a = benchmark(rows, ts);
  const auto b = benchmark(rows, ts);
  CHECK(benchmark_csv(a) == benchmark_csv(b));
  for (const auto& r : a) CHECK(r.origins == a[0].origins);
  const auto one = benchmark({rows[0]}, ts);
  const auto csv = benchmark_csv(one);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(benchmark_table(one).find("seasonal-naive(24)") != std::string::npos);
  auto mismatched = rows;
  mismatched[1].horizon = 2;
  CHECK_THROWS_AS(benchmark(mismatched, ts), InvalidArgument);
}

TEST_CASE("report output") {
  testutil::TempDir dir("pipe");
  const auto ts = surrogate();
  const auto rep = rolling_forecast(quick(ModelKind::EtsRaw), ts);
  rep.save_forecasts_csv(dir.file("f.csv"), ts);
  const auto text = testutil::read_file(dir.file("f.csv"));
  CHECK(text.rfind("origin_index,target_index,timestamp,step,actual,predicted\n517,518,", 0) == 0);
  const auto j = rep.to_json();
  CHECK(j["n_origins"] == 12);
  CHECK(j["per_step_mae"].size() == 4);
}

TEST_CASE("leakage audit") {
  const auto x = testutil::gaussian(200, 3);
  PipelineConfig cfg;
  CHECK(leakage_audit(x, pipeline_feature_builder(cfg, FeatureMode::Statistical, 1.0), 150).passed);
  CHECK(leakage_audit(x, pipeline_feature_builder(cfg, FeatureMode::Topological, 1.0), 150).passed);

  // Window centred on its row: reads 12 values past row_index.
  const FeatureBuilder centred = [](std::span<const double> v) {
    FeatureMatrix fm({"mean"});
    for (std::size_t e = 11; e + 12 < v.size(); ++e) {
      double s = 0;
      for (std::size_t i = e - 11; i <= e + 12; ++i) s += v[i];
      const double m = s / 24;
      fm.append_row(e, std::span<const double>(&m, 1));
    }
    return fm;
  };
  const auto bad = leakage_audit(x, centred, 150);
  CHECK_FALSE(bad.passed);
  CHECK_FALSE(bad.perturbation_ok);

  const FeatureBuilder shuffled = [](std::span<const double> v) {
    FeatureMatrix fm({"x"});
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::size_t idx = i == 5 ? 6 : i == 6 ? 5 : i;
      fm.append_row(idx, v.subspan(i, 1));
    }
    return fm;
  };
  const auto sh = leakage_audit(x, shuffled, 150);
  CHECK_FALSE(sh.passed);
  CHECK_FALSE(sh.row_index_ok);

  // A data-dependent TDA scale over the whole series leaks.
  const FeatureBuilder global_scale = [](std::span<const double> v) { return tda::extract_tda_features(v); };
  CHECK_FALSE(leakage_audit(x, global_scale, 150).passed);

  FeatureMatrix ok({"a"});
  const double one = 1.0;
  ok.append_row(3, std::span<const double>(&one, 1));
  CHECK(leakage_audit(ok, 10));
  CHECK_FALSE(leakage_audit(ok, 3));
}

TEST_CASE("forecasts at origins before a perturbation do not change") {
  const auto ts = surrogate(4);
  auto cfg = quick(ModelKind::Decomposed, FeatureMode::Statistical);
  cfg.max_origins = 8;
  std::string detail;
  CHECK_MESSAGE(forecast_perturbation_probe(cfg, ts, {520, 524}, &detail), detail);
}

TEST_CASE("selection outcome") {
  auto cfg = quick(ModelKind::Decomposed, FeatureMode::Topological);
  cfg.selection_mode = SelectionMode::Rfe;
  const auto out = select_features(cfg, surrogate(5));
  CHECK(out.stages.front().stage == "variance");
  CHECK(out.stages.back().stage == "rfe");
  CHECK(out.tda_scale > 0.0);
  CHECK_THROWS_AS(select_features(quick(ModelKind::EtsRaw), surrogate(5)), InvalidArgument);
}
