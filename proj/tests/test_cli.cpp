#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaussact/cli.hpp"

using namespace gaussact;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gaussact_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path write_text(const fs::path& dir, const std::string& name,
                    const std::string& text) {
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  REQUIRE(bool(out));
  return path;
}

constexpr const char* kCsvHeader =
    "param,measured_re,measured_im,predicted_re,predicted_im,abs_residual";

}  // namespace

TEST_CASE("argument parsing accepts the documented invocation") {
  const cli::CliArgs a = cli::parse_args(
      {"run", "moments", "--config", "cfg.json", "--out", "results",
       "--parallel", "--seed", "7"});
  CHECK(a.suite == "moments");
  CHECK(a.config_path == "cfg.json");
  CHECK(a.out_dir == "results");
  CHECK(a.parallel);
  REQUIRE(a.seed.has_value());
  CHECK(*a.seed == 7);

  const cli::CliArgs minimal =
      cli::parse_args({"run", "bimodule", "--config", "c.json"});
  CHECK(minimal.out_dir == ".");
  CHECK_FALSE(minimal.parallel);
  CHECK_FALSE(minimal.seed.has_value());
}

TEST_CASE("argument parsing rejects malformed invocations") {
  CHECK_THROWS_AS(cli::parse_args({}), cli::DomainError);
  CHECK_THROWS_AS(cli::parse_args({"walk", "moments", "--config", "c"}),
                  cli::DomainError);
  CHECK_THROWS_AS(cli::parse_args({"run"}), cli::DomainError);
  CHECK_THROWS_AS(cli::parse_args({"run", "--config", "c"}), cli::DomainError);
  CHECK_THROWS_AS(cli::parse_args({"run", "moments"}), cli::DomainError);
  CHECK_THROWS_AS(cli::parse_args({"run", "moments", "--config"}),
                  cli::DomainError);
  CHECK_THROWS_AS(
      cli::parse_args({"run", "moments", "--config", "c", "--frobnicate"}),
      cli::DomainError);
  CHECK_THROWS_AS(
      cli::parse_args({"run", "moments", "--config", "c", "--seed", "-3"}),
      cli::DomainError);
  CHECK_THROWS_AS(
      cli::parse_args({"run", "moments", "--config", "c", "--seed", "7x"}),
      cli::DomainError);
}

TEST_CASE("suite name catalogue is complete and dispatchable") {
  const auto& names = cli::suite_names();
  REQUIRE(names.size() == 9);
  const fs::path dir = fresh_dir("catalogue");
  CHECK_THROWS_AS(cli::run_suite("no-such-suite", "{}", dir.string()),
                  cli::DomainError);
}

TEST_CASE("moments suite passes on defaults and writes report and tables") {
  const fs::path dir = fresh_dir("moments");
  const cli::SuiteReport rep = cli::run_suite("moments", "{}", dir.string());
  CHECK(rep.suite == "moments");
  CHECK(rep.all_pass());
  REQUIRE(rep.checks.size() == 4);  // three dimensions plus independence
  for (const auto& check : rep.checks) {
    CHECK(check.pass);
    CHECK(check.residual <= check.tolerance);
  }

  // Tables exist on disk with the documented header.
  REQUIRE(rep.tables.size() == 3);
  for (const auto& [name, path] : rep.tables) {
    CAPTURE(name);
    REQUIRE(fs::exists(path));
    const std::string text = read_file(path);
    CHECK(text.rfind(kCsvHeader, 0) == 0);
  }

  // The report renders as valid JSON with the documented shape.
  const json j = json::parse(cli::report_to_json(rep));
  CHECK(j["suite"] == "moments");
  CHECK(j["config"].is_object());
  CHECK(j["config"]["max_power"] == 8);
  CHECK(j["checks"].is_array());
  REQUIRE(j["checks"].size() == 4);
  CHECK(j["checks"][0].contains("name"));
  CHECK(j["checks"][0].contains("pass"));
  CHECK(j["checks"][0].contains("residual"));
  CHECK(j["checks"][0].contains("tolerance"));
  CHECK(j["tables"].is_object());
}

TEST_CASE("config keys are validated strictly") {
  const fs::path dir = fresh_dir("config_strict");
  CHECK_THROWS_AS(cli::run_suite("moments", "", dir.string()),
                  cli::DomainError);
  CHECK_THROWS_AS(cli::run_suite("moments", "   \n", dir.string()),
                  cli::DomainError);
  CHECK_THROWS_AS(cli::run_suite("moments", "not json", dir.string()),
                  cli::DomainError);
  CHECK_THROWS_AS(cli::run_suite("moments", "[1, 2]", dir.string()),
                  cli::DomainError);
  CHECK_THROWS_AS(cli::run_suite("moments", R"({"bogus": 1})", dir.string()),
                  cli::DomainError);
  CHECK_THROWS_AS(
      cli::run_suite("moments", R"({"max_power": "eight"})", dir.string()),
      cli::DomainError);
  CHECK_THROWS_AS(
      cli::run_suite("moments", R"({"dims": "all"})", dir.string()),
      cli::DomainError);
  CHECK_THROWS_AS(
      cli::run_suite("moments", R"({"tol": []})", dir.string()),
      cli::DomainError);
  CHECK_THROWS_AS(
      cli::run_suite("smooth-identity", R"({"seed": -1})", dir.string()),
      cli::DomainError);
  CHECK_THROWS_AS(
      cli::run_suite("smooth-identity", R"({"seed": 1.5})", dir.string()),
      cli::DomainError);

  // Overriding a documented key lands in the effective config echo.
  const cli::SuiteReport rep =
      cli::run_suite("moments", R"({"max_power": 4})", dir.string());
  CHECK(rep.all_pass());
  CHECK(json::parse(rep.config_echo)["max_power"] == 4);
}

TEST_CASE("seed override replaces the config seed") {
  const fs::path dir = fresh_dir("seed");
  const cli::SuiteReport rep = cli::run_suite(
      "smooth-identity", R"({"count": 2, "seed": 3})", dir.string(), false, 11);
  CHECK(rep.all_pass());
  CHECK(json::parse(rep.config_echo)["seed"] == 11);
}

TEST_CASE("quick suites pass on default configs") {
  const fs::path dir = fresh_dir("quick");
  for (const std::string suite :
       {"cohomology", "ps-trace", "semigroup", "malleable-torus",
        "invariant-unitary"}) {
    CAPTURE(suite);
    const cli::SuiteReport rep = cli::run_suite(suite, "{}", dir.string());
    CHECK(rep.all_pass());
    CHECK_FALSE(rep.checks.empty());
  }
}

TEST_CASE("smooth-identity suite passes with a reduced sample count") {
  const fs::path dir = fresh_dir("smooth");
  const cli::SuiteReport rep = cli::run_suite(
      "smooth-identity", R"({"count": 4, "t_grid": [0.1, 1.0]})",
      dir.string());
  CHECK(rep.all_pass());
  REQUIRE(rep.checks.size() == 2);
}

TEST_CASE("bimodule suite passes with reduced sampling") {
  const fs::path dir = fresh_dir("bimodule");
  const cli::SuiteReport rep = cli::run_suite(
      "bimodule",
      R"({"max_degree": 6, "isometry_count": 10, "mc_samples": 50000})",
      dir.string());
  CHECK(rep.all_pass());
  REQUIRE(rep.checks.size() == 7);
  CHECK(rep.tables.count("dirichlet") == 1);
}

TEST_CASE("deformation-decay suite: sequential and parallel runs agree") {
  const std::string config =
      R"({"norms": [0.5], "t_grid": [0.0, 1.5707963267948966],
          "max_degree": 8, "low_degree": 6, "high_degree": 8})";
  const fs::path seq_dir = fresh_dir("decay_seq");
  const fs::path par_dir = fresh_dir("decay_par");
  const cli::SuiteReport seq =
      cli::run_suite("deformation-decay", config, seq_dir.string(), false);
  const cli::SuiteReport par =
      cli::run_suite("deformation-decay", config, par_dir.string(), true);
  CHECK(seq.all_pass());
  CHECK(par.all_pass());

  // Concurrent grid evaluation must assemble deterministically: identical
  // reports (up to table paths) and identical table bytes.
  REQUIRE(seq.checks.size() == par.checks.size());
  for (std::size_t i = 0; i < seq.checks.size(); ++i) {
    CHECK(seq.checks[i].name == par.checks[i].name);
    CHECK(seq.checks[i].residual == par.checks[i].residual);
  }
  REQUIRE(seq.tables.size() == par.tables.size());
  for (const auto& [name, path] : seq.tables) {
    REQUIRE(par.tables.count(name) == 1);
    CHECK(read_file(path) == read_file(par.tables.at(name)));
  }
}

TEST_CASE("reports and tables are byte-stable across repeated runs") {
  const fs::path dir_a = fresh_dir("stable_a");
  const fs::path dir_b = fresh_dir("stable_b");
  const std::string config = R"({"dims": [1, 2], "max_power": 6})";
  const cli::SuiteReport a = cli::run_suite("moments", config, dir_a.string());
  const cli::SuiteReport b = cli::run_suite("moments", config, dir_b.string());
  CHECK(a.config_echo == b.config_echo);

  // Same JSON apart from the table paths, which name different directories.
  json ja = json::parse(cli::report_to_json(a));
  json jb = json::parse(cli::report_to_json(b));
  ja.erase("tables");
  jb.erase("tables");
  CHECK(ja.dump() == jb.dump());
  for (const auto& [name, path] : a.tables)
    CHECK(read_file(path) == read_file(b.tables.at(name)));
}

TEST_CASE("run_cli maps outcomes to the documented exit codes") {
  const fs::path dir = fresh_dir("exit_codes");

  SUBCASE("pass gives 0") {
    const fs::path cfg = write_text(dir, "ok.json", "{}");
    CHECK(cli::run_cli({"run", "ps-trace", "--config", cfg.string(), "--out",
                        (dir / "ok").string()}) == cli::kExitPass);
    CHECK(fs::exists(dir / "ok" / "ps-trace_report.json"));
  }

  SUBCASE("an honest check failure gives 1") {
    // A margin of 0.9 demands |vacuum state| <= 0.1, which the invariant
    // unitary genuinely exceeds.
    const fs::path cfg =
        write_text(dir, "fail.json", R"({"trace_margin": 0.9})");
    CHECK(cli::run_cli({"run", "invariant-unitary", "--config", cfg.string(),
                        "--out", (dir / "fail").string()}) ==
          cli::kExitCheckFailure);
    // The report is still written, with the failing check recorded.
    const json j =
        json::parse(read_file(dir / "fail" / "invariant-unitary_report.json"));
    bool saw_failure = false;
    for (const auto& check : j["checks"])
      if (check["name"] == "trace_nontrivial") saw_failure = !check["pass"];
    CHECK(saw_failure);
  }

  SUBCASE("bad invocation or config gives 2") {
    CHECK(cli::run_cli({"run", "moments"}) == cli::kExitConfigError);
    CHECK(cli::run_cli({"run", "moments", "--config",
                        (dir / "missing.json").string()}) ==
          cli::kExitConfigError);
    const fs::path empty = write_text(dir, "empty.json", "");
    CHECK(cli::run_cli({"run", "moments", "--config", empty.string()}) ==
          cli::kExitConfigError);
    const fs::path bogus = write_text(dir, "bogus.json", R"({"bogus": 1})");
    CHECK(cli::run_cli({"run", "moments", "--config", bogus.string(), "--out",
                        dir.string()}) == cli::kExitConfigError);
    const fs::path unknown = write_text(dir, "any.json", "{}");
    CHECK(cli::run_cli({"run", "no-such-suite", "--config",
                        unknown.string()}) == cli::kExitConfigError);
  }

  SUBCASE("a resource cap gives 3") {
    // Thirty-plus-one modes at degree eight overflow the state cap.
    const fs::path cfg = write_text(dir, "huge.json", R"({"base_dim": 30})");
    CHECK(cli::run_cli({"run", "bimodule", "--config", cfg.string(), "--out",
                        dir.string()}) == cli::kExitResourceCap);
  }
}

TEST_CASE("the all pseudo-suite validates its sectioned config") {
  const fs::path dir = fresh_dir("all_mode");
  const fs::path bad_section =
      write_text(dir, "bad_section.json", R"({"momentss": {}})");
  CHECK(cli::run_cli({"run", "all", "--config", bad_section.string(), "--out",
                      dir.string()}) == cli::kExitConfigError);
  const fs::path bad_value =
      write_text(dir, "bad_value.json", R"({"moments": 3})");
  CHECK(cli::run_cli({"run", "all", "--config", bad_value.string(), "--out",
                      dir.string()}) == cli::kExitConfigError);
  const fs::path bad_key =
      write_text(dir, "bad_key.json", R"({"moments": {"bogus": 1}})");
  CHECK(cli::run_cli({"run", "all", "--config", bad_key.string(), "--out",
                      dir.string()}) == cli::kExitConfigError);
}
