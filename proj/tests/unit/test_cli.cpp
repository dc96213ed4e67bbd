#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "epdecay/cli_commands.hpp"
#include "epdecay/errors.hpp"

using namespace epdecay;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "epdecay_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream is(p);
  return nlohmann::json::parse(is);
}

}  // namespace

TEST_CASE("help exits cleanly") {
  auto r = cli({"--help"});
  CHECK(r.status == kExitPass);
  CHECK(r.out.find("verify-symbols") != std::string::npos);
}

TEST_CASE("unknown flags and invalid values are usage errors naming the key") {
  auto r = cli({"verify-symbols", "--bogus-flag", "1"});
  CHECK(r.status == kExitUsage);
  CHECK(r.err.find("bogus-flag") != std::string::npos);

  auto p = cli({"simulate", "--points", "7", "-o", scratch("bad_points").string()});
  CHECK(p.status == kExitUsage);
  CHECK(p.err.find("--points") != std::string::npos);

  CHECK_THROWS_AS(parse_run_config({"lp-test", "--gamma", "1"}, std::cout), UsageError);
}

TEST_CASE("malformed configuration key is rejected") {
  auto dir = scratch("bad_config");
  fs::create_directories(dir);
  auto cfg = dir / "run.toml";
  std::ofstream(cfg) << "points = 16\nbogus_key = 3\n";
  auto r = cli({"verify-symbols", "--config", cfg.string(), "-o", (dir / "out").string()});
  CHECK(r.status == kExitUsage);
  CHECK(r.err.find("bogus_key") != std::string::npos);
}

TEST_CASE("flags override configuration file values") {
  auto dir = scratch("override");
  fs::create_directories(dir);
  auto cfg = dir / "run.toml";
  std::ofstream(cfg) << "points = 12\nlength = 9.0\nseed = 5\n";
  std::ostringstream sink;
  auto c = parse_run_config({"difference-decay", "--config", cfg.string(), "--points", "8"}, sink);
  REQUIRE(c);
  CHECK(c->points == 8);
  CHECK(c->length == 9.0);
  CHECK(c->seed == 5);
  CHECK(c->dt == 0.01);  // per-command default
}

TEST_CASE("verify-symbols writes a passing report") {
  auto dir = scratch("symbols");
  auto r = cli({"verify-symbols", "--samples", "500", "-o", dir.string()});
  CHECK(r.status == kExitPass);
  auto report = read_json(dir / "report.json");
  CHECK(report["all_pass"] == true);
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("linear-decay --s 1.5 --ell 0,1 reports four passing fits") {
  auto dir = scratch("linear");
  auto r = cli({"linear-decay", "--s", "1.5", "--ell", "0,1", "-o", dir.string()});
  INFO(r.out << r.err);
  CHECK(r.status == kExitPass);
  auto report = read_json(dir / "report.json");
  const auto& entries = report["fits"]["entries"];
  CHECK(entries.size() == 4);
  for (const auto& e : entries) CHECK(e["pass"] == true);
}

TEST_CASE("norms.csv is byte-identical across repeated runs") {
  const std::vector<std::string> base{"simulate",        "--points",      "8",   "--length",   "6.283185307179586",
                                      "--initial",       "random-band",   "--amplitude", "0.01", "--dt", "0.02",
                                      "--final-time",    "1",             "--snapshot-interval", "0.5",
                                      "--seed",          "11",            "--no-linear-check"};
  auto a = scratch("repeat_a"), b = scratch("repeat_b");
  auto args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"-o", a.string()});
  args_b.insert(args_b.end(), {"-o", b.string()});
  auto ra = cli(args_a);
  auto rb = cli(args_b);
  // The fit window lies outside this short run, so the slope check may fail;
  // only determinism is under test here.
  CHECK(ra.status == rb.status);
  CHECK(ra.status != kExitUsage);
  CHECK(ra.status != kExitRuntime);
  REQUIRE(fs::exists(a / "norms.csv"));
  CHECK(slurp(a / "norms.csv") == slurp(b / "norms.csv"));
  CHECK(slurp(a / "norms.csv").rfind("t,quantity,ell,value\n", 0) == 0);
}

TEST_CASE("report aggregates result directories") {
  auto src = scratch("agg_src");
  REQUIRE(cli({"verify-symbols", "--samples", "200", "-o", src.string()}).status == kExitPass);
  auto out = scratch("agg_out");
  auto r = cli({"report", src.string(), "-o", out.string()});
  CHECK(r.status == kExitPass);
  auto j = read_json(out / "report.json");
  CHECK(j["sources"].size() == 1);
  CHECK(cli({"report", (src / "missing").string(), "-o", out.string()}).status == kExitUsage);
}
