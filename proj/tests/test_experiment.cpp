#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "nlfb/experiment.hpp"

using namespace nlfb;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path root() {
  auto dir = fs::temp_directory_path() / "nlfb_experiment_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const std::string& name, const json& cfg) {
  std::string path = (root() / name).string();
  std::ofstream out(path);
  out << cfg.dump(2);
  return path;
}

json fit_config() {
  // power-law samples with exponent 1.5, amplitude 3
  json samples = json::array();
  for (int j = 0; j < 8; ++j) {
    double r = std::pow(2.0, -j);
    samples.push_back({r, 3.0 * std::pow(r, 1.5)});
  }
  return {{"subcommand", "fit-exponent"},
          {"problem", {{"samples", samples}}},
          {"checks", {{"target", 1.5}, {"tolerance", 1e-6}}}};
}

json dirichlet_config() {
  return {{"subcommand", "solve-dirichlet"},
          {"kernel", {{"family", "fractional_laplacian"}, {"s", 0.5}}},
          {"grid", {{"min", -2.0}, {"max", 2.0}, {"nodes", 256}}},
          {"problem",
           {{"domain", {-1.0, 1.0}},
            {"rhs", 1.0},
            {"exterior", {{"type", "zero"}}}}},
          {"checks",
           {{"reference",
             {{"type", "getoor"},
              {"tolerance", 0.05},
              {"boundary_layer_cells", 4}}}}}};
}

}  // namespace

TEST_CASE("passing run returns 0 and writes a manifest") {
  std::string cfg = write_config("fit_pass.json", fit_config());
  std::string out = (root() / "fit_pass").string();
  CHECK(run_experiment(cfg, out) == 0);
  json manifest = json::parse(slurp(out + "/manifest.json"));
  CHECK(manifest["pass"] == true);
  CHECK(manifest["failures"].empty());
  CHECK(manifest["subcommand"] == "fit-exponent");
  CHECK(manifest["report"]["exponent"].get<double>() == doctest::Approx(1.5));
  for (const auto& name : manifest["outputs"])
    CHECK(fs::exists(out + "/" + name.get<std::string>()));
}

TEST_CASE("failed predicate returns 2 with the reason recorded") {
  json cfg = fit_config();
  cfg["checks"]["target"] = 2.0;
  std::string path = write_config("fit_fail.json", cfg);
  std::string out = (root() / "fit_fail").string();
  CHECK(run_experiment(path, out) == 2);
  json manifest = json::parse(slurp(out + "/manifest.json"));
  CHECK(manifest["pass"] == false);
  CHECK(manifest["failures"].size() == 1);
}

TEST_CASE("unknown keys are config errors") {
  json cfg = fit_config();
  cfg["surprise"] = 1;
  CHECK_THROWS_WITH_AS(
      run_experiment(write_config("bad_top.json", cfg), (root() / "x").string()),
      doctest::Contains("surprise"), std::runtime_error);

  cfg = fit_config();
  cfg["checks"]["tolernace"] = 1e-6;
  CHECK_THROWS_WITH_AS(run_experiment(write_config("bad_nested.json", cfg),
                                      (root() / "x").string()),
                       doctest::Contains("tolernace"), std::runtime_error);

  cfg = dirichlet_config();
  cfg["kernel"]["sigma"] = 0.5;
  CHECK_THROWS_WITH_AS(run_experiment(write_config("bad_kernel.json", cfg),
                                      (root() / "x").string()),
                       doctest::Contains("sigma"), std::runtime_error);
}

TEST_CASE("malformed configs and unknown subcommands throw") {
  CHECK_THROWS_AS(run_experiment((root() / "missing.json").string(),
                                 (root() / "x").string()),
                  std::runtime_error);
  std::string broken = (root() / "broken.json").string();
  std::ofstream(broken) << "{ not json";
  CHECK_THROWS_AS(run_experiment(broken, (root() / "x").string()),
                  std::runtime_error);
  json cfg = fit_config();
  cfg["subcommand"] = "solve-everything";
  CHECK_THROWS_AS(run_experiment(write_config("bad_sub.json", cfg),
                                 (root() / "x").string()),
                  std::runtime_error);
}

TEST_CASE("identical config gives byte-identical csv output") {
  std::string cfg = write_config("det.json", dirichlet_config());
  std::string a = (root() / "det_a").string();
  std::string b = (root() / "det_b").string();
  CHECK(run_experiment(cfg, a) == 0);
  CHECK(run_experiment(cfg, b) == 0);
  CHECK(slurp(a + "/solution.csv") == slurp(b + "/solution.csv"));
  CHECK(slurp(a + "/solution.csv.json") == slurp(b + "/solution.csv.json"));
}

TEST_CASE("manifest echoes the config with defaults resolved") {
  std::string cfg = write_config("echo.json", dirichlet_config());
  std::string out = (root() / "echo").string();
  REQUIRE(run_experiment(cfg, out) == 0);
  json manifest = json::parse(slurp(out + "/manifest.json"));
  CHECK(manifest["config"]["seed"] == 0);
  CHECK(manifest["config"]["plots"] == true);
  CHECK(manifest["config"]["kernel"]["n"] == 1);
  CHECK(manifest["version"].is_string());
}

TEST_CASE("beta0 subcommand end to end") {
  json cfg = {{"subcommand", "beta0"},
              {"problem",
               {{"tol_beta", 1e-3},
                {"cases",
                 json::array({{{"s", 0.5},
                               {"lam", 1.0},
                               {"Lam", 1.0},
                               {"target", 0.5},
                               {"tolerance", 0.01}}})}}}};
  std::string out = (root() / "beta0").string();
  CHECK(run_experiment(write_config("beta0.json", cfg), out) == 0);
  CHECK(fs::exists(out + "/beta0.csv"));
}
