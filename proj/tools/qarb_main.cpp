// Command-line driver for the screening pipeline: synthesis, ingestion,
// preselection, cointegration, full screens, critical-value calibration and
// the query-scaling experiment.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qarb/arbitrage.hpp"
#include "qarb/data.hpp"
#include "qarb/econometrics.hpp"
#include "qarb/embedding.hpp"
#include "qarb/report_io.hpp"
#include "qarb/rng.hpp"
#include "qarb/vtpa.hpp"

namespace {

using qarb::data::Json;

std::uint64_t env_seed_default() {
  if (const char* env = std::getenv("QARB_SEED")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v != 0) return v;
  }
  return 1;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string tok = csv.substr(pos, comma - pos);
    if (!tok.empty()) out.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) {
    throw qarb::ConfigError("expected a comma-separated list, got '" + csv + "'");
  }
  return out;
}

std::vector<Eigen::Index> parse_indices(const std::string& csv) {
  std::vector<Eigen::Index> out;
  for (double v : parse_grid(csv)) out.push_back(static_cast<Eigen::Index>(v));
  return out;
}

qarb::arb::SeriesTransform parse_transform(const std::string& name) {
  if (name == "levels") return qarb::arb::SeriesTransform::kLevels;
  if (name == "returns") return qarb::arb::SeriesTransform::kReturns;
  if (name == "log") return qarb::arb::SeriesTransform::kLogLevels;
  throw qarb::ConfigError("unknown series transform '" + name + "'");
}

qarb::arb::PortfolioPool load_pool(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw qarb::ConfigError("cannot open pool file " + path);
  Json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw qarb::ParseError(0, std::string("invalid pool JSON: ") + e.what());
  }
  qarb::arb::PortfolioPool pool;
  pool.d = j.at("d").get<Eigen::Index>();
  for (const auto& e : j.at("portfolios")) {
    qarb::arb::Portfolio p;
    p.id = e.at("id").get<int>();
    for (const auto& s : e.at("stocks")) {
      p.stocks.push_back(s.get<Eigen::Index>());
    }
    p.window_begin = e.at("window")[0].get<Eigen::Index>();
    p.window_end = e.at("window")[1].get<Eigen::Index>();
    pool.portfolios.push_back(std::move(p));
  }
  return pool;
}

qarb::arb::Portfolio single_portfolio(const qarb::data::PricePanel& panel,
                                      const std::string& stocks_csv,
                                      Eigen::Index window_begin,
                                      Eigen::Index window_end) {
  qarb::arb::Portfolio p;
  p.id = 0;
  p.stocks = parse_indices(stocks_csv);
  p.window_begin = window_begin;
  p.window_end = window_end > 0 ? window_end : panel.T();
  return p;
}

void print_screen_summary(const qarb::arb::ScreeningReport& report) {
  std::cout << "portfolios screened : " << report.wall_stats.portfolios << '\n'
            << "survivors           : " << report.survivors.size() << '\n'
            << "cointegration tests : " << report.wall_stats.cointegration_tests
            << '\n'
            << "total queries       : " << report.total_queries << '\n';
  for (const auto& s : report.survivors) {
    std::cout << "  survivor portfolio " << s.portfolio.id << " stocks [";
    for (std::size_t i = 0; i < s.portfolio.stocks.size(); ++i) {
      std::cout << (i ? "," : "") << s.portfolio.stocks[i];
    }
    std::cout << "] DF_tau " << s.cointegration.adf.df_tau << " beta [";
    for (Eigen::Index i = 0; i < s.cointegration.beta.size(); ++i) {
      std::cout << (i ? "," : "") << s.cointegration.beta(i);
    }
    std::cout << "]\n";
  }
  if (report.wall_stats.budget_unmet) {
    std::cout << "  note: survivor budget not met before the stage cap\n";
  }
}

int run(int argc, char** argv) {
  CLI::App app{"qarb: hybrid screening pipeline for cointegrated portfolios"};
  app.require_subcommand(1);
  app.fallthrough(true);  // --seed / --threads may follow the subcommand

  std::uint64_t seed = env_seed_default();
  std::string out_path;
  std::string panel_path;
  std::string series = "levels";
  int threads = 1;

  app.add_option("--seed", seed, "master RNG seed (env QARB_SEED)")
      ->capture_default_str();
  app.add_option("--threads", threads, "worker thread cap")
      ->capture_default_str();

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a synthetic price panel");
  std::string kind = "walks";
  long long synth_t = 500, synth_j = 2;
  double phi = 0.5, sigma_noise = 0.05, sigma_walk = 0.01;
  std::string beta_csv = "2";
  std::string sv_csv;
  synth->add_option("--kind", kind, "walks | planted | controlled")
      ->capture_default_str();
  synth->add_option("--T", synth_t, "rows")->capture_default_str();
  synth->add_option("--J", synth_j, "stocks")->capture_default_str();
  synth->add_option("--phi", phi, "planted spread AR(1) coefficient")
      ->capture_default_str();
  synth->add_option("--sigma-noise", sigma_noise, "planted spread scale")
      ->capture_default_str();
  synth->add_option("--sigma-walk", sigma_walk, "log-walk step scale")
      ->capture_default_str();
  synth->add_option("--beta", beta_csv, "planted combination coefficients")
      ->capture_default_str();
  synth->add_option("--sv", sv_csv, "controlled singular values");
  synth->add_option("--out", out_path, "output CSV path")->required();

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "validate a CSV price panel");
  ingest->add_option("--panel", panel_path, "CSV path")->required();

  // ---- preselect ----
  auto* pre = app.add_subcommand(
      "preselect", "variable-time preselection on one portfolio");
  std::string stocks_csv;
  long long window_begin = 0, window_end = 0;
  double kappa0 = 16.0, epsilon = 0.05, repetition_scale = 3.0;
  pre->add_option("--panel", panel_path, "CSV path")->required();
  pre->add_option("--stocks", stocks_csv, "comma-separated stock indices")
      ->required();
  pre->add_option("--window-begin", window_begin, "first row")
      ->capture_default_str();
  pre->add_option("--window-end", window_end, "one past the last row (0 = T)")
      ->capture_default_str();
  pre->add_option("--kappa0", kappa0, "condition-number threshold")
      ->capture_default_str();
  pre->add_option("--epsilon", epsilon, "per-stage precision")
      ->capture_default_str();
  pre->add_option("--repetition-scale", repetition_scale,
                  "comparator repetition multiplier")
      ->capture_default_str();
  pre->add_option("--series", series, "levels | returns | log")
      ->capture_default_str();
  pre->add_option("--out", out_path, "JSON report path");

  // ---- cointegrate ----
  auto* coin = app.add_subcommand(
      "cointegrate", "Engle-Granger test on one portfolio (first stock is "
                     "the regression target)");
  int lag = 1;
  double level = 0.05, qlr_epsilon = 0.0;
  coin->add_option("--panel", panel_path, "CSV path")->required();
  coin->add_option("--stocks", stocks_csv, "comma-separated stock indices")
      ->required();
  coin->add_option("--window-begin", window_begin, "first row")
      ->capture_default_str();
  coin->add_option("--window-end", window_end, "one past the last row (0 = T)")
      ->capture_default_str();
  coin->add_option("--lag", lag, "ADF lagged-difference count")
      ->capture_default_str();
  coin->add_option("--level", level, "significance level")
      ->capture_default_str();
  coin->add_option("--qlr-epsilon", qlr_epsilon,
                   "regression contract perturbation bound")
      ->capture_default_str();
  coin->add_option("--out", out_path, "JSON report path");

  // ---- screen-fixed / screen-progressive ----
  auto* fixed = app.add_subcommand(
      "screen-fixed", "fixed-threshold preselection then cointegration");
  std::string pool_path;
  long long enum_d = 0, max_portfolios = 1000;
  fixed->add_option("--panel", panel_path, "CSV path")->required();
  fixed->add_option("--pool", pool_path, "portfolio pool JSON");
  fixed->add_option("--d", enum_d,
                    "enumerate all d-subsets when no pool file is given");
  fixed->add_option("--max-portfolios", max_portfolios,
                    "cap for the enumeration")
      ->capture_default_str();
  fixed->add_option("--kappa0", kappa0, "condition-number threshold")
      ->capture_default_str();
  fixed->add_option("--epsilon", epsilon, "per-stage precision")
      ->capture_default_str();
  fixed->add_option("--repetition-scale", repetition_scale,
                    "comparator repetition multiplier")
      ->capture_default_str();
  fixed->add_option("--lag", lag, "ADF lag")->capture_default_str();
  fixed->add_option("--level", level, "significance level")
      ->capture_default_str();
  fixed->add_option("--qlr-epsilon", qlr_epsilon, "QLR contract epsilon")
      ->capture_default_str();
  fixed->add_option("--series", series, "levels | returns | log")
      ->capture_default_str();
  fixed->add_option("--out", out_path, "JSON report path");

  auto* prog = app.add_subcommand(
      "screen-progressive", "doubling-threshold preselection down to a budget");
  long long budget = 5;
  int max_stage = 30;
  prog->add_option("--panel", panel_path, "CSV path")->required();
  prog->add_option("--pool", pool_path, "portfolio pool JSON");
  prog->add_option("--d", enum_d,
                   "enumerate all d-subsets when no pool file is given");
  prog->add_option("--max-portfolios", max_portfolios,
                   "cap for the enumeration")
      ->capture_default_str();
  prog->add_option("--budget", budget, "survivor budget k")
      ->capture_default_str();
  prog->add_option("--max-stage", max_stage, "doubling-round cap")
      ->capture_default_str();
  prog->add_option("--epsilon", epsilon, "per-stage precision")
      ->capture_default_str();
  prog->add_option("--repetition-scale", repetition_scale,
                   "comparator repetition multiplier")
      ->capture_default_str();
  prog->add_option("--lag", lag, "ADF lag")->capture_default_str();
  prog->add_option("--level", level, "significance level")
      ->capture_default_str();
  prog->add_option("--qlr-epsilon", qlr_epsilon, "QLR contract epsilon")
      ->capture_default_str();
  prog->add_option("--series", series, "levels | returns | log")
      ->capture_default_str();
  prog->add_option("--out", out_path, "JSON report path");

  // ---- calibrate-df ----
  auto* cal = app.add_subcommand(
      "calibrate-df", "Monte-Carlo Dickey-Fuller critical values");
  std::string cal_n_csv = "500";
  long long trials = 100000;
  bool trend = false;
  cal->add_option("--n", cal_n_csv, "walk length(s), comma separated")
      ->capture_default_str();
  cal->add_option("--trials", trials, "Monte-Carlo trials per length")
      ->capture_default_str();
  cal->add_flag("--trend", trend, "include the time trend");
  cal->add_option("--out", out_path, "JSON cache path");

  // ---- scaling ----
  auto* scal = app.add_subcommand(
      "scaling", "query-count scaling experiment over a kappa0 grid");
  std::string grid_csv = "4,8,16,32";
  long long trials_per = 200;
  long long scal_d = 2;
  scal->add_option("--kappa0-grid", grid_csv, "comma-separated thresholds")
      ->capture_default_str();
  scal->add_option("--trials", trials_per, "matrices per grid point")
      ->capture_default_str();
  scal->add_option("--d", scal_d, "regressor count")->capture_default_str();
  scal->add_option("--epsilon", epsilon, "per-stage precision")
      ->capture_default_str();
  scal->add_option("--out", out_path, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints help text or the usage error; map bad usage to exit 2.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (synth->parsed()) {
    qarb::data::SynthSpec spec;
    spec.T = synth_t;
    spec.J = synth_j;
    spec.phi = phi;
    spec.sigma_noise = sigma_noise;
    spec.sigma_walk = sigma_walk;
    spec.seed = seed;
    if (kind == "walks") {
      spec.kind = qarb::data::SynthKind::kRandomWalk;
    } else if (kind == "planted") {
      spec.kind = qarb::data::SynthKind::kPlantedCointegration;
      const auto beta = parse_grid(beta_csv);
      spec.beta_star = Eigen::Map<const Eigen::VectorXd>(
          beta.data(), static_cast<Eigen::Index>(beta.size()));
      if (spec.J < spec.beta_star.size() + 1) {
        spec.J = spec.beta_star.size() + 1;
      }
    } else if (kind == "controlled") {
      spec.kind = qarb::data::SynthKind::kControlledKappa;
      spec.singular_values = parse_grid(sv_csv);
      if (spec.J < static_cast<Eigen::Index>(spec.singular_values.size())) {
        spec.J = static_cast<Eigen::Index>(spec.singular_values.size());
      }
    } else {
      throw qarb::ConfigError("unknown synth kind '" + kind + "'");
    }
    const auto result = qarb::data::synth(spec);
    qarb::data::save_csv(result.panel, out_path);
    std::cout << "wrote " << out_path << " with T=" << result.panel.T()
              << " J=" << result.panel.J() << '\n';
    return 0;
  }

  if (ingest->parsed()) {
    const auto panel = qarb::data::load_csv(panel_path);
    std::cout << "panel ok: T=" << panel.T() << " J=" << panel.J()
              << " range [" << panel.timestamps.front() << ", "
              << panel.timestamps.back() << "]\n";
    return 0;
  }

  if (pre->parsed()) {
    const auto panel = qarb::data::load_csv(panel_path);
    const auto p = single_portfolio(panel, stocks_csv, window_begin, window_end);
    const auto factor =
        qarb::arb::preselection_factor(panel, p, parse_transform(series));
    const auto oracle = qarb::embed::exact_condition_number(factor);
    const auto a = qarb::embed::build_embedding(
        factor, qarb::embed::NormalizationMode::kSpectral);
    const auto input = qarb::embed::uniform_eigen_state(a);
    qarb::vtpa::VtpaConfig vcfg;
    vcfg.kappa0 = kappa0;
    vcfg.epsilon = epsilon;
    vcfg.repetition_scale = repetition_scale;
    const auto outcome = qarb::vtpa::vtpa(a, input, vcfg, seed);

    // Register footprint of the fully coherent cascade (may exceed what
    // the dense simulator can hold; the measured cascade reuses one small
    // phase register per stage instead).
    const int stages = vcfg.stages();
    int ancilla_bits = 0;
    for (int j = 1; j <= stages; ++j) ancilla_bits += j + 2;
    const int footprint = a.n_qubits() + ancilla_bits + stages + 1;

    std::cout << "oracle kappa        : " << oracle.kappa << '\n'
              << "register footprint  : " << footprint << " qubits (system "
              << a.n_qubits() << ", ancilla " << ancilla_bits << ", clock "
              << stages << ", flag 1)"
              << (footprint > qarb::qsim::kMaxQubits
                      ? " - beyond the dense-simulator cap; measured mode used"
                      : "")
              << '\n'
              << "stopped             : " << (outcome.stopped ? "yes" : "no")
              << '\n'
              << "clock pattern       : ";
    for (int b : outcome.clock_pattern) std::cout << b;
    std::cout << '\n'
              << "kappa interval      : [" << outcome.kappa_low << ", "
              << outcome.kappa_high << ")\n"
              << "queries             : " << outcome.total_queries << '\n';
    if (!out_path.empty()) {
      Json j;
      j["command"] = "preselect";
      j["config"] = {{"seed", seed},
                     {"kappa0", kappa0},
                     {"epsilon", epsilon},
                     {"repetition_scale", repetition_scale},
                     {"stocks", stocks_csv},
                     {"window", {p.window_begin, p.window_end}},
                     {"series", series}};
      j["oracle_kappa"] = oracle.kappa;
      j["stopped"] = outcome.stopped;
      j["clock_pattern"] = outcome.clock_pattern;
      j["kappa_interval"] = {outcome.kappa_low, outcome.kappa_high};
      j["total_queries"] = outcome.total_queries;
      qarb::data::save_report(j, out_path);
    }
    return 0;
  }

  if (coin->parsed()) {
    const auto panel = qarb::data::load_csv(panel_path);
    const auto p = single_portfolio(panel, stocks_csv, window_begin, window_end);
    if (p.stocks.size() < 2) {
      throw qarb::ConfigError("cointegration needs at least two stocks");
    }
    const Eigen::Index rows = p.window_end - p.window_begin;
    Eigen::VectorXd y(rows);
    Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(p.stocks.size()) - 1);
    for (Eigen::Index r = 0; r < rows; ++r) {
      y(r) = panel.prices(p.window_begin + r, p.stocks[0]);
      for (std::size_t c = 1; c < p.stocks.size(); ++c) {
        x(r, static_cast<Eigen::Index>(c) - 1) =
            panel.prices(p.window_begin + r, p.stocks[c]);
      }
    }
    qarb::econ::EngleGrangerConfig cfg;
    cfg.lag = lag;
    cfg.level = level;
    cfg.contract.epsilon = qlr_epsilon;
    cfg.contract.seed = seed;
    const auto result = qarb::econ::engle_granger(x, y, cfg);
    std::cout << "cointegrated : " << (result.flag ? "yes" : "no") << '\n'
              << "DF_tau       : " << result.adf.df_tau << '\n'
              << "beta         :";
    for (Eigen::Index i = 0; i < result.beta.size(); ++i) {
      std::cout << ' ' << result.beta(i);
    }
    std::cout << '\n';
    if (!out_path.empty()) {
      Json j;
      j["command"] = "cointegrate";
      j["config"] = {{"seed", seed},
                     {"lag", lag},
                     {"level", level},
                     {"qlr_epsilon", qlr_epsilon},
                     {"stocks", stocks_csv},
                     {"window", {p.window_begin, p.window_end}}};
      j["result"] = qarb::arb::to_json(result);
      qarb::data::save_report(j, out_path);
    }
    return 0;
  }

  if (fixed->parsed() || prog->parsed()) {
    const auto panel = qarb::data::load_csv(panel_path);
    qarb::arb::PortfolioPool pool;
    if (!pool_path.empty()) {
      pool = load_pool(pool_path);
    } else if (enum_d >= 2) {
      pool = qarb::arb::enumerate_portfolios(
          panel.J(), enum_d, 0, panel.T(),
          static_cast<std::size_t>(max_portfolios));
    } else {
      throw qarb::ConfigError("provide --pool or --d for enumeration");
    }
    qarb::arb::ScreenConfig cfg;
    cfg.kappa0 = kappa0;
    cfg.epsilon = epsilon;
    cfg.repetition_scale = repetition_scale;
    cfg.eg.lag = lag;
    cfg.eg.level = level;
    cfg.eg.contract.epsilon = qlr_epsilon;
    cfg.transform = parse_transform(series);
    cfg.threads = threads;

    qarb::arb::ScreeningReport report;
    Json config_echo = {{"seed", seed},
                        {"kappa0", kappa0},
                        {"epsilon", epsilon},
                        {"repetition_scale", repetition_scale},
                        {"lag", lag},
                        {"level", level},
                        {"qlr_epsilon", qlr_epsilon},
                        {"series", series},
                        {"pool_size", pool.portfolios.size()},
                        {"d", pool.d}};
    std::string command;
    if (fixed->parsed()) {
      command = "screen-fixed";
      report = qarb::arb::screen_fixed(panel, pool, cfg, seed);
    } else {
      command = "screen-progressive";
      config_echo["budget"] = budget;
      config_echo["max_stage"] = max_stage;
      report = qarb::arb::screen_progressive(
          panel, pool, static_cast<std::size_t>(budget), max_stage, cfg, seed);
    }
    print_screen_summary(report);
    if (!out_path.empty()) {
      Json j;
      j["command"] = command;
      j["config"] = std::move(config_echo);
      j["report"] = qarb::arb::to_json(report);
      qarb::data::save_report(j, out_path);
      std::cout << "report written to " << out_path << '\n';
    }
    return 0;
  }

  if (cal->parsed()) {
    std::vector<int> grid;
    for (double v : parse_grid(cal_n_csv)) grid.push_back(static_cast<int>(v));
    Json vals;
    for (int n : grid) {
      const auto values = qarb::econ::simulate_df_critical_values(
          n, trend, trials, seed + static_cast<std::uint64_t>(n));
      std::cout << "n=" << n << (trend ? " (trend)" : " (constant)")
                << " trials=" << trials << '\n';
      Json row;
      for (const auto& [lvl, v] : values) {
        std::cout << "  " << lvl * 100 << "% : " << v << '\n';
        char key[16];
        std::snprintf(key, sizeof(key), "%g", lvl);
        row[key] = v;
      }
      vals[std::to_string(n)] = std::move(row);
    }
    if (!out_path.empty()) {
      Json j;
      j["command"] = "calibrate-df";
      j["config"] = {{"seed", seed},
                     {"grid_n", grid},
                     {"trend", trend},
                     {"trials", trials},
                     {"levels", {0.01, 0.05, 0.10}}};
      j["values"] = std::move(vals);
      qarb::data::save_report(j, out_path);
    }
    return 0;
  }

  if (scal->parsed()) {
    qarb::arb::EnsembleSpec spec;
    spec.d = scal_d;
    spec.trials_per_kappa0 = static_cast<int>(trials_per);
    spec.epsilon = epsilon;
    spec.seed = seed;
    const auto report =
        qarb::arb::complexity_experiment(spec, parse_grid(grid_csv));
    std::cout << "slope (log T_avg vs log kappa0) : "
              << report.scaling.slope << '\n'
              << "d exponent                      : " << report.d_exponent
              << '\n';
    for (const auto& pk : report.scaling.per_kappa0) {
      std::cout << "  kappa0 " << pk.kappa0 << " T_avg " << pk.t_avg << '\n';
    }
    if (!out_path.empty()) {
      Json j;
      j["command"] = "scaling";
      j["config"] = {{"seed", seed},
                     {"kappa0_grid", report.kappa0_grid},
                     {"trials", trials_per},
                     {"d", scal_d},
                     {"epsilon", epsilon}};
      j["report"] = qarb::arb::to_json(report);
      qarb::data::save_report(j, out_path);
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const qarb::NullSpectrumAnomaly& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 1;
  } catch (const qarb::ProtocolViolation& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 1;
  } catch (const qarb::Error& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 1;
  }
}
