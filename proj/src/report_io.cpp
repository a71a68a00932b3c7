#include "qarb/report_io.hpp"

#include <cstdio>
#include <fstream>

#include "qarb/data.hpp"

namespace qarb::data {

void save_report(const Json& doc, const std::string& path) {
  Json out = doc;
  out["schema_version"] = kSchemaVersion;
  if (!out.contains("config") || !out["config"].contains("seed")) {
    throw ConfigError("report must embed config.seed");
  }
  std::ofstream f(path);
  if (!f) {
    throw ConfigError("cannot write " + path);
  }
  f << out.dump(2) << '\n';
}

Json load_report(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw ConfigError("cannot open " + path);
  }
  Json doc;
  try {
    f >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.contains("schema_version") ||
      !doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != kSchemaVersion) {
    throw VersionError("unsupported or missing schema_version");
  }
  if (!doc.contains("config") || !doc["config"].contains("seed")) {
    throw VersionError("report lacks the config.seed field");
  }
  return doc;
}

}  // namespace qarb::data

namespace qarb::arb {

namespace {

std::string level_key(double level) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%g", level);
  return buf;
}

data::Json vector_json(const Eigen::VectorXd& v) {
  data::Json arr = data::Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const data::Json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

}  // namespace

data::Json to_json(const econ::AdfReport& r) {
  data::Json j;
  j["gamma_hat"] = r.gamma_hat;
  j["se_gamma"] = r.se_gamma;
  j["df_tau"] = r.df_tau;
  j["lag"] = r.lag;
  j["trend"] = r.trend;
  j["alpha_hat"] = r.alpha_hat;
  j["beta_trend_hat"] = r.beta_trend_hat;
  j["effective_n"] = r.effective_n;
  data::Json cv, rej;
  for (const auto& [level, value] : r.critical_values) {
    cv[level_key(level)] = value;
  }
  for (const auto& [level, flag] : r.reject_unit_root) {
    rej[level_key(level)] = flag;
  }
  j["critical_values"] = cv;
  j["reject_unit_root"] = rej;
  return j;
}

data::Json to_json(const econ::CointegrationResult& r) {
  data::Json j;
  j["flag"] = r.flag;
  j["beta"] = vector_json(r.beta);
  j["level"] = r.level;
  j["adf"] = to_json(r.adf);
  j["first_stage_design_kappa"] = r.first_stage.design_kappa;
  return j;
}

data::Json to_json(const ScreeningReport& r) {
  data::Json j;
  data::Json survivors = data::Json::array();
  for (const auto& s : r.survivors) {
    data::Json e;
    e["portfolio"] = {{"id", s.portfolio.id},
                      {"stocks", s.portfolio.stocks},
                      {"window", {s.portfolio.window_begin,
                                  s.portfolio.window_end}}};
    e["cointegration"] = to_json(s.cointegration);
    survivors.push_back(std::move(e));
  }
  j["survivors"] = std::move(survivors);
  data::Json rejected;
  for (const auto& [id, reason] : r.rejected_at) {
    rejected[std::to_string(id)] = reason.label();
  }
  j["rejected_at"] = std::move(rejected);
  j["total_queries"] = r.total_queries;
  j["wall_stats"] = {{"portfolios", r.wall_stats.portfolios},
                     {"vtpa_runs", r.wall_stats.vtpa_runs},
                     {"comparator_rounds", r.wall_stats.comparator_rounds},
                     {"cointegration_tests", r.wall_stats.cointegration_tests},
                     {"progressive_rounds", r.wall_stats.progressive_rounds},
                     {"budget_unmet", r.wall_stats.budget_unmet}};
  j["seed"] = r.seed;
  return j;
}

ScreeningReport screening_report_from_json(const data::Json& j) {
  ScreeningReport r;
  for (const auto& e : j.at("survivors")) {
    SurvivorEntry s;
    const auto& p = e.at("portfolio");
    s.portfolio.id = p.at("id").get<int>();
    for (const auto& v : p.at("stocks")) {
      s.portfolio.stocks.push_back(v.get<Eigen::Index>());
    }
    s.portfolio.window_begin = p.at("window")[0].get<Eigen::Index>();
    s.portfolio.window_end = p.at("window")[1].get<Eigen::Index>();
    const auto& c = e.at("cointegration");
    s.cointegration.flag = c.at("flag").get<bool>();
    s.cointegration.beta = vector_from_json(c.at("beta"));
    s.cointegration.level = c.at("level").get<double>();
    const auto& a = c.at("adf");
    s.cointegration.adf.gamma_hat = a.at("gamma_hat").get<double>();
    s.cointegration.adf.se_gamma = a.at("se_gamma").get<double>();
    s.cointegration.adf.df_tau = a.at("df_tau").get<double>();
    s.cointegration.adf.lag = a.at("lag").get<int>();
    s.cointegration.adf.trend = a.at("trend").get<bool>();
    s.cointegration.adf.alpha_hat = a.at("alpha_hat").get<double>();
    s.cointegration.adf.beta_trend_hat = a.at("beta_trend_hat").get<double>();
    s.cointegration.adf.effective_n = a.at("effective_n").get<int>();
    for (const auto& [key, value] : a.at("critical_values").items()) {
      s.cointegration.adf.critical_values[std::stod(key)] =
          value.get<double>();
    }
    for (const auto& [key, value] : a.at("reject_unit_root").items()) {
      s.cointegration.adf.reject_unit_root[std::stod(key)] =
          value.get<bool>();
    }
    s.cointegration.first_stage.design_kappa =
        c.at("first_stage_design_kappa").get<double>();
    r.survivors.push_back(std::move(s));
  }
  for (const auto& [key, value] : j.at("rejected_at").items()) {
    RejectionReason reason;
    const std::string label = value.get<std::string>();
    if (label == "cointegration") {
      reason.at_cointegration = true;
    } else {
      reason.preselect_stage =
          std::stoi(label.substr(std::string("preselect_stage_").size()));
    }
    r.rejected_at[std::stoi(key)] = reason;
  }
  r.total_queries = j.at("total_queries").get<std::int64_t>();
  const auto& w = j.at("wall_stats");
  r.wall_stats.portfolios = w.at("portfolios").get<std::int64_t>();
  r.wall_stats.vtpa_runs = w.at("vtpa_runs").get<std::int64_t>();
  r.wall_stats.comparator_rounds =
      w.at("comparator_rounds").get<std::int64_t>();
  r.wall_stats.cointegration_tests =
      w.at("cointegration_tests").get<std::int64_t>();
  r.wall_stats.progressive_rounds =
      w.at("progressive_rounds").get<std::int64_t>();
  r.wall_stats.budget_unmet = w.at("budget_unmet").get<bool>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

data::Json to_json(const vtpa::ScalingReport& r) {
  data::Json j;
  data::Json per = data::Json::array();
  for (const auto& pk : r.per_kappa0) {
    per.push_back({{"kappa0", pk.kappa0},
                   {"t_avg", pk.t_avg},
                   {"count", pk.count}});
  }
  j["per_kappa0"] = std::move(per);
  data::Json bands = data::Json::array();
  for (const auto& b : r.bands) {
    bands.push_back({{"band", b.band},
                     {"mean_queries", b.mean_queries},
                     {"model_queries", b.model_queries},
                     {"envelope", b.envelope},
                     {"envelope_ok", b.envelope_ok},
                     {"count", b.count}});
  }
  j["bands"] = std::move(bands);
  j["slope"] = r.slope;
  j["slope_valid"] = r.slope_valid;
  return j;
}

data::Json to_json(const ComplexityReport& r) {
  data::Json j;
  j["scaling"] = to_json(r.scaling);
  j["kappa0_grid"] = r.kappa0_grid;
  data::Json sweep = data::Json::array();
  for (const auto& [d, q] : r.d_sweep) {
    sweep.push_back({{"d", d}, {"mean_queries", q}});
  }
  j["d_sweep"] = std::move(sweep);
  j["d_exponent"] = r.d_exponent;
  return j;
}

}  // namespace qarb::arb
