#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "plab/cli.hpp"

using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = plab::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::vector<double>> parse_csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.find_first_of("0123456789-") != 0)
      continue;  // header or comment
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("plab_cli_test_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate emits one row per grid point and satisfies the equation") {
  const RunResult r = run_cli({"simulate", "--coeffs", "constant:1", "--alpha", "0.5",
                               "--steps", "4", "--horizon", "1", "--seed", "1",
                               "--no-timestamp"});
  CHECK(r.code == 0);
  const auto rows = parse_csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  for (const auto& row : rows) {
    REQUIRE(row.size() == 6);  // t, y, C, F, m, theta
    const double t = row[0], y = row[1], c = row[2], m = row[4];
    CHECK(t >= 0.0);
    CHECK(std::abs(y - (0.0 + c + 0.5 * m)) <= 1e-12 * (1.0 + std::abs(y)));
  }
}

TEST_CASE("usage and validation failures exit with code 1") {
  CHECK(run_cli({"simulate", "--alpha", "1.5"}).code == 1);
  const RunResult r = run_cli({"simulate", "--alpha", "1.5"});
  CHECK(r.err.find("alpha < 1") != std::string::npos);

  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
  CHECK(run_cli({"simulate", "--format", "yaml"}).code == 1);
  CHECK(run_cli({"simulate", "--coeffs", "quartic:1"}).code == 1);
  CHECK(run_cli({"verify", "zerohit", "--alpha", "0.7"}).code == 1);
}

TEST_CASE("help requests succeed") {
  const RunResult r = run_cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("simulate") != std::string::npos);
  CHECK(r.out.find("verify") != std::string::npos);
}

TEST_CASE("failed verification exits with code 3") {
  // pinned to the boundary: the terminal mass does not scale down with delta
  const RunResult r = run_cli({"verify", "zerohit", "--coeffs", "constant:0",
                               "--drift", "constant:-1", "--alpha", "0.1", "--paths",
                               "50", "--steps", "32"});
  CHECK(r.code == 3);
  CHECK(r.err.find("FAILED") != std::string::npos);
}

TEST_CASE("passing verification exits with code 0 and echoes a report") {
  const RunResult r = run_cli({"verify", "picard", "--coeffs", "sin_perturbed:1.0:0.3",
                               "--alpha", "0.3", "--paths", "5", "--steps", "64",
                               "--seed", "9"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("pass").get<bool>());
  CHECK(j.at("picard").at("median_ratio").get<double>() < 0.5);
}

TEST_CASE("comparison subcommand reports zero violations") {
  const RunResult r = run_cli({"compare", "--coeffs", "sin_perturbed:1.0:0.3",
                               "--alpha", "0.4", "--paths", "20", "--steps", "128"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("pass").get<bool>());
  CHECK(j.at("report").at("n_violating_paths").get<int>() == 0);
}

TEST_CASE("repeated runs are byte-identical without the timestamp header") {
  const std::vector<std::string> args{"simulate", "--coeffs", "sin_perturbed:1.0:0.3",
                                      "--alpha", "0.25", "--steps", "64",
                                      "--seed", "7", "--no-timestamp"};
  const RunResult a = run_cli(args);
  const RunResult b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  const RunResult stamped = run_cli({"simulate", "--steps", "4"});
  CHECK(stamped.out.rfind("# generated", 0) == 0);
}

TEST_CASE("malliavin subcommand summarizes the sensitivity probe") {
  const RunResult r =
      run_cli({"malliavin", "--coeffs", "sin_perturbed:1.0:0.3", "--alpha", "0.3",
               "--y0", "1", "--steps", "512", "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("h_norm_squared").get<double>() > 0.0);
  CHECK(j.at("terminal_row").size() == 512);
  const double fd = j.at("directional_fd").get<double>();
  const double paired = j.at("pair_h").get<double>();
  CHECK(std::abs(paired - fd) <= 0.05 * (std::abs(fd) + 1e-8));
}

TEST_CASE("density subcommand produces a normalized estimate and atom scan") {
  const RunResult r = run_cli({"density", "--coeffs", "constant:1", "--alpha", "0",
                               "--paths", "500", "--steps", "32", "--format", "json",
                               "--deltas", "0.5,0.25"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("n_samples").get<int>() == 500);
  CHECK(j.at("atoms").size() == 2);
  CHECK(j.at("atoms")[0].at("max_mass").get<double>() < 0.5);
}

TEST_CASE("output directory mode writes the advertised files") {
  TempDir tmp;
  const RunResult r = run_cli({"simulate", "--steps", "8", "--out", tmp.path.string(),
                               "--no-timestamp"});
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(tmp.path / "path.csv"));
  CHECK(r.out.find("path.csv") != std::string::npos);

  const RunResult m = run_cli({"malliavin", "--steps", "16", "--out",
                               tmp.path.string(), "--no-timestamp"});
  REQUIRE(m.code == 0);
  CHECK(std::filesystem::exists(tmp.path / "field.csv"));
  CHECK(std::filesystem::exists(tmp.path / "terminal_row.csv"));
  CHECK(std::filesystem::exists(tmp.path / "malliavin.json"));
}

TEST_CASE("config file supplies defaults and explicit flags win") {
  TempDir tmp;
  const std::filesystem::path cfg = tmp.path / "run.json";
  {
    std::ofstream f(cfg);
    f << R"({"alpha": 0.25, "steps": 4, "no_timestamp": true})";
  }
  const RunResult from_config = run_cli({"simulate", "--config", cfg.string()});
  REQUIRE(from_config.code == 0);
  CHECK(parse_csv_rows(from_config.out).size() == 5);  // steps = 4 from config

  const RunResult overridden =
      run_cli({"simulate", "--config", cfg.string(), "--steps", "8"});
  REQUIRE(overridden.code == 0);
  CHECK(parse_csv_rows(overridden.out).size() == 9);  // flag wins over config

  const RunResult direct = run_cli(
      {"simulate", "--alpha", "0.25", "--steps", "4", "--no-timestamp"});
  CHECK(from_config.out == direct.out);

  {
    std::ofstream f(cfg);
    f << R"({"alpa": 0.25})";
  }
  CHECK(run_cli({"simulate", "--config", cfg.string()}).code == 1);
}

TEST_CASE("reflected simulation is exposed through a flag") {
  const RunResult r = run_cli({"simulate", "--reflected", "--alpha", "0.4", "--steps",
                               "64", "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const auto& x = j.at("x");
  REQUIRE(x.size() == 65);
  CHECK(x[0].get<double>() == 0.0);
  for (const auto& xi : x) CHECK(xi.get<double>() >= 0.0);
  CHECK(run_cli({"simulate", "--reflected", "--alpha", "0.6"}).code == 1);
}

}  // TEST_SUITE
