#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <fstream>

#include "qarb/data.hpp"
#include "qarb/econometrics.hpp"
#include "qarb/embedding.hpp"
#include "qarb/report_io.hpp"

using namespace qarb;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/qarb_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  f << body;
}

}  // namespace

TEST_CASE("load_csv reads a well-formed panel") {
  TempFile f("ok.csv");
  write_file(f.path,
             "timestamp,AAA,BBB\n"
             "2020-01-01,100.5,99.25\n"
             "2020-01-02,101,98.5\n"
             "2020-01-03,102.25,97\n");
  const auto panel = data::load_csv(f.path);
  CHECK(panel.T() == 3);
  CHECK(panel.J() == 2);
  CHECK(panel.tickers[0] == "AAA");
  CHECK(panel.prices(2, 0) == doctest::Approx(102.25));
}

TEST_CASE("load_csv reports the offending line for bad prices") {
  TempFile f("bad.csv");
  write_file(f.path,
             "timestamp,AAA\n"
             "2020-01-01,100\n"
             "2020-01-02,101\n"
             "2020-01-03,-1\n");
  try {
    data::load_csv(f.path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("load_csv rejects non-monotone timestamps and empty files") {
  TempFile f("order.csv");
  write_file(f.path,
             "timestamp,AAA\n"
             "2020-01-02,100\n"
             "2020-01-01,101\n");
  CHECK_THROWS_AS(data::load_csv(f.path), OrderError);

  TempFile g("empty.csv");
  write_file(g.path, "");
  CHECK_THROWS_AS(data::load_csv(g.path), DegenerateInput);

  TempFile h("headeronly.csv");
  write_file(h.path, "timestamp,AAA\n");
  CHECK_THROWS_AS(data::load_csv(h.path), DegenerateInput);
}

TEST_CASE("csv round trip preserves the panel at 10 significant digits") {
  data::SynthSpec spec;
  spec.kind = data::SynthKind::kRandomWalk;
  spec.T = 60;
  spec.J = 3;
  spec.seed = 11;
  const auto result = data::synth(spec);

  TempFile f("roundtrip.csv");
  data::save_csv(result.panel, f.path);
  const auto loaded = data::load_csv(f.path);
  CHECK(loaded.T() == result.panel.T());
  CHECK(loaded.J() == result.panel.J());
  for (Eigen::Index t = 0; t < loaded.T(); ++t) {
    for (Eigen::Index j = 0; j < loaded.J(); ++j) {
      CHECK(loaded.prices(t, j) ==
            doctest::Approx(result.panel.prices(t, j)).epsilon(1e-9));
    }
  }
  // Byte-identical on re-save (formatting is canonical).
  TempFile g("roundtrip2.csv");
  data::save_csv(loaded, g.path);
  std::ifstream a(f.path), b(g.path);
  const std::string sa((std::istreambuf_iterator<char>(a)),
                       std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)),
                       std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("synthetic panels are deterministic under the seed") {
  data::SynthSpec spec;
  spec.kind = data::SynthKind::kPlantedCointegration;
  spec.T = 200;
  spec.J = 5;
  spec.beta_star = Eigen::VectorXd::Constant(1, 2.0);
  spec.seed = 77;
  const auto a = data::synth(spec);
  const auto b = data::synth(spec);
  CHECK(a.panel.prices == b.panel.prices);
  CHECK(a.panel.timestamps == b.panel.timestamps);
  const auto c = data::synth([&] {
    auto s = spec;
    s.seed = 78;
    return s;
  }());
  CHECK(a.panel.prices != c.panel.prices);
}

TEST_CASE("every synth kind passes the panel invariants") {
  data::SynthSpec walk;
  walk.kind = data::SynthKind::kRandomWalk;
  walk.T = 100;
  walk.J = 4;
  walk.seed = 3;
  CHECK_NOTHROW(data::synth(walk).panel.validate());

  data::SynthSpec planted;
  planted.kind = data::SynthKind::kPlantedCointegration;
  planted.T = 120;
  planted.J = 6;
  planted.beta_star = Eigen::VectorXd::Constant(2, 1.0);
  planted.seed = 4;
  CHECK_NOTHROW(data::synth(planted).panel.validate());

  data::SynthSpec controlled;
  controlled.kind = data::SynthKind::kControlledKappa;
  controlled.T = 80;
  controlled.J = 3;
  controlled.singular_values = {1.0, 0.5, 0.125};
  controlled.seed = 5;
  CHECK_NOTHROW(data::synth(controlled).panel.validate());
}

TEST_CASE("controlled spectra survive mean-centering exactly") {
  data::SynthSpec spec;
  spec.kind = data::SynthKind::kControlledKappa;
  spec.T = 64;
  spec.J = 2;
  spec.singular_values = {1.0, 0.125};  // kappa = 8
  spec.seed = 21;
  const auto result = data::synth(spec);

  Eigen::MatrixXd x = result.panel.prices.leftCols(2);
  for (Eigen::Index c = 0; c < 2; ++c) x.col(c).array() -= x.col(c).mean();
  const auto report = embed::exact_condition_number(x);
  CHECK(report.kappa == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(report.singular_values.back() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("controlled_matrix reproduces requested singular values") {
  const std::vector<double> sv{1.0, 0.4, 0.03};
  const auto x = data::controlled_matrix(sv, 24, 9);
  const auto report = embed::exact_condition_number(x);
  CHECK(report.singular_values[2] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(report.singular_values[1] == doctest::Approx(0.4).epsilon(1e-8));
  CHECK(report.singular_values[0] == doctest::Approx(0.03).epsilon(1e-8));
  // Columns have exactly zero mean by construction.
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    CHECK(std::abs(x.col(c).mean()) < 1e-12);
  }
}

TEST_CASE("synthetic walks carry a unit root") {
  int fail_to_reject = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    data::SynthSpec spec;
    spec.kind = data::SynthKind::kRandomWalk;
    spec.T = 500;
    spec.J = 2;
    spec.seed = 300 + static_cast<std::uint64_t>(s);
    const auto panel = data::synth(spec).panel;
    const auto report =
        econ::adf_test(panel.prices.col(s % 2), 1, false);
    fail_to_reject += !report.reject_unit_root.at(0.05);
  }
  CHECK(fail_to_reject >= seeds * 9 / 10);
}

TEST_CASE("planted panels recover through the cointegration test") {
  data::SynthSpec spec;
  spec.kind = data::SynthKind::kPlantedCointegration;
  spec.T = 1000;
  spec.J = 3;
  spec.beta_star = Eigen::VectorXd::Constant(1, 2.0);
  spec.phi = 0.5;
  spec.sigma_noise = 0.05;
  spec.sigma_walk = 0.01;

  int hits = 0, beta_ok = 0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    spec.seed = 100 + static_cast<std::uint64_t>(s);
    const auto result = data::synth(spec);
    Eigen::MatrixXd x(spec.T, 1);
    x.col(0) = result.panel.prices.col(1);
    const Eigen::VectorXd y = result.panel.prices.col(0);
    econ::EngleGrangerConfig cfg;
    cfg.lag = 1;
    const auto eg = econ::engle_granger(x, y, cfg);
    hits += eg.flag;
    beta_ok += std::abs(eg.beta(0) - 2.0) < 0.05;
  }
  CHECK(hits >= seeds * 9 / 10);
  CHECK(beta_ok >= seeds * 9 / 10);
}

TEST_CASE("synth validates its spec") {
  data::SynthSpec spec;
  spec.T = 10;  // too short
  CHECK_THROWS_AS(data::synth(spec), ConfigError);
  spec.T = 100;
  spec.kind = data::SynthKind::kPlantedCointegration;
  spec.beta_star = Eigen::VectorXd();
  CHECK_THROWS_AS(data::synth(spec), ConfigError);
  spec.beta_star = Eigen::VectorXd::Constant(1, 2.0);
  spec.phi = 1.2;
  CHECK_THROWS_AS(data::synth(spec), ConfigError);
}

TEST_CASE("a thousand-portfolio report round-trips in under a second") {
  arb::ScreeningReport report;
  report.seed = 1;
  for (int id = 0; id < 1000; ++id) {
    if (id % 4 == 0) {
      arb::SurvivorEntry s;
      s.portfolio = {id, {0, 1, 2}, 0, 500};
      s.cointegration.flag = true;
      s.cointegration.beta = Eigen::VectorXd::Constant(2, 2.0);
      s.cointegration.adf.critical_values = {{0.05, -3.41}};
      s.cointegration.adf.reject_unit_root = {{0.05, true}};
      report.survivors.push_back(std::move(s));
    } else {
      arb::RejectionReason r;
      r.preselect_stage = 1 + id % 4;
      report.rejected_at[id] = r;
    }
  }
  TempFile f("bigreport.json");
  const auto start = std::chrono::steady_clock::now();
  data::Json doc;
  doc["command"] = "test";
  doc["config"] = {{"seed", 1}};
  doc["report"] = arb::to_json(report);
  data::save_report(doc, f.path);
  const auto loaded = data::load_report(f.path);
  const auto back = arb::screening_report_from_json(loaded.at("report"));
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  CHECK(back.survivors.size() == report.survivors.size());
  CHECK(back.rejected_at.size() == report.rejected_at.size());
  CHECK(elapsed < 1.0);
}

TEST_CASE("report save and load round trip with schema checks") {
  TempFile f("report.json");
  data::Json doc;
  doc["command"] = "test";
  doc["config"] = {{"seed", 42}, {"kappa0", 8.0}};
  doc["payload"] = {1, 2, 3};
  data::save_report(doc, f.path);

  const auto loaded = data::load_report(f.path);
  CHECK(loaded["schema_version"] == data::kSchemaVersion);
  CHECK(loaded["config"]["seed"] == 42);
  CHECK(loaded["payload"][2] == 3);

  // Missing seed: refused on save, version error on load.
  data::Json bad;
  bad["command"] = "test";
  CHECK_THROWS_AS(data::save_report(bad, f.path), ConfigError);

  TempFile g("noseed.json");
  write_file(g.path, R"({"schema_version": 1, "config": {}})");
  CHECK_THROWS_AS(data::load_report(g.path), VersionError);

  TempFile h("badversion.json");
  write_file(h.path, R"({"schema_version": 99, "config": {"seed": 1}})");
  CHECK_THROWS_AS(data::load_report(h.path), VersionError);
}
