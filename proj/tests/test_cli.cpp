#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <string>

namespace {

const std::string kCli = QARB_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/qarb_cli_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("unknown flags exit with the usage code") {
  CHECK(run("--definitely-not-a-flag") == 2);
  CHECK(run("synth --bogus x --out /tmp/qarb_cli_no.csv") == 2);
  CHECK(run("") == 2);  // missing subcommand
}

TEST_CASE("missing input files exit with the validation code") {
  CHECK(run("ingest --panel /tmp/qarb_does_not_exist.csv") == 2);
}

TEST_CASE("synth is deterministic and ingestable") {
  TempFile a("det_a.csv"), b("det_b.csv");
  CHECK(run("synth --kind planted --T 200 --beta 2 --seed 5 --out " + a.path) == 0);
  CHECK(run("synth --kind planted --T 200 --beta 2 --seed 5 --out " + b.path) == 0);
  const std::string body_a = slurp(a.path);
  CHECK(!body_a.empty());
  CHECK(body_a == slurp(b.path));
  CHECK(run("ingest --panel " + a.path) == 0);

  TempFile c("det_c.csv");
  CHECK(run("synth --kind planted --T 200 --beta 2 --seed 6 --out " + c.path) == 0);
  CHECK(body_a != slurp(c.path));
}

TEST_CASE("preselect and cointegrate run end to end on a planted panel") {
  TempFile panel("pipe.csv"), pre("pre.json"), coin("coin.json");
  REQUIRE(run("synth --kind planted --T 400 --J 3 --beta 2,1 --seed 9 --out " +
              panel.path) == 0);
  CHECK(run("preselect --panel " + panel.path +
            " --stocks 0,1,2 --kappa0 16 --seed 3 --out " + pre.path) == 0);
  CHECK(run("cointegrate --panel " + panel.path +
            " --stocks 0,1,2 --lag 1 --seed 3 --out " + coin.path) == 0);

  const auto pre_doc = nlohmann::json::parse(slurp(pre.path));
  CHECK(pre_doc["schema_version"] == 1);
  CHECK(pre_doc["config"]["seed"] == 3);
  CHECK(pre_doc["oracle_kappa"].get<double>() > 16.0);
  CHECK(pre_doc["stopped"] == false);

  const auto coin_doc = nlohmann::json::parse(slurp(coin.path));
  CHECK(coin_doc["result"]["flag"] == true);
  const double beta0 = coin_doc["result"]["beta"][0].get<double>();
  CHECK(beta0 > 1.9);
  CHECK(beta0 < 2.1);
}

TEST_CASE("screen-fixed writes byte-identical reports under one seed") {
  TempFile panel("screen.csv"), pool("pool.json");
  TempFile rep1("rep1.json"), rep2("rep2.json");
  REQUIRE(run("synth --kind planted --T 300 --J 9 --beta 2,1 --seed 11 --out " +
              panel.path) == 0);
  {
    std::ofstream f(pool.path);
    f << R"({"d": 3, "portfolios": [)"
      << R"({"id": 0, "stocks": [0,1,2], "window": [0, 300]},)"
      << R"({"id": 1, "stocks": [3,4,5], "window": [0, 300]},)"
      << R"({"id": 2, "stocks": [6,7,8], "window": [0, 300]}]})";
  }
  CHECK(run("screen-fixed --panel " + panel.path + " --pool " + pool.path +
            " --kappa0 16 --seed 7 --out " + rep1.path) == 0);
  CHECK(run("screen-fixed --panel " + panel.path + " --pool " + pool.path +
            " --kappa0 16 --seed 7 --out " + rep2.path + " --threads 2") == 0);
  const std::string body = slurp(rep1.path);
  CHECK(body == slurp(rep2.path));

  const auto doc = nlohmann::json::parse(body);
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["config"]["seed"] == 7);
  bool planted_survived = false;
  for (const auto& s : doc["report"]["survivors"]) {
    if (s["portfolio"]["id"] == 0) planted_survived = true;
  }
  CHECK(planted_survived);
}

TEST_CASE("screen-progressive runs against an enumerated pool") {
  TempFile panel("prog.csv"), rep("prog.json");
  REQUIRE(run("synth --kind planted --T 300 --J 6 --beta 2,1 --seed 13 --out " +
              panel.path) == 0);
  CHECK(run("screen-progressive --panel " + panel.path +
            " --d 3 --max-portfolios 10 --budget 2 --seed 4 --out " +
            rep.path) == 0);
  const auto doc = nlohmann::json::parse(slurp(rep.path));
  CHECK(doc["command"] == "screen-progressive");
  CHECK(doc["report"].contains("wall_stats"));
}

TEST_CASE("calibrate-df reproduces the table neighborhood") {
  TempFile cache("df.json");
  CHECK(run("calibrate-df --n 100 --trials 20000 --trend --seed 2 --out " +
            cache.path) == 0);
  const auto doc = nlohmann::json::parse(slurp(cache.path));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["config"]["grid_n"][0] == 100);
  const double v = doc["values"]["100"]["0.05"].get<double>();
  CHECK(v < -3.3);
  CHECK(v > -3.6);
}

TEST_CASE("scaling experiment emits a slope near two") {
  TempFile rep("scaling.json");
  CHECK(run("scaling --kappa0-grid 4,8,16 --trials 40 --d 2 --seed 5 --out " +
            rep.path) == 0);
  const auto doc = nlohmann::json::parse(slurp(rep.path));
  const double slope = doc["report"]["scaling"]["slope"].get<double>();
  CHECK(slope > 1.5);
  CHECK(slope < 2.5);
}

TEST_CASE("environment seed is used unless a flag overrides it") {
  TempFile a("env_a.csv"), b("env_b.csv"), c("env_c.csv");
  const std::string env = "QARB_SEED=42 ";
  auto run_env = [&](const std::string& args) {
    const std::string cmd = env + kCli + " " + args + " > /dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  CHECK(run_env("synth --kind walks --T 100 --J 2 --out " + a.path) == 0);
  CHECK(run("synth --kind walks --T 100 --J 2 --seed 42 --out " + b.path) == 0);
  CHECK(slurp(a.path) == slurp(b.path));
  // Flag wins over the environment.
  CHECK(run_env("synth --kind walks --T 100 --J 2 --seed 43 --out " + c.path) == 0);
  CHECK(slurp(a.path) != slurp(c.path));
}
