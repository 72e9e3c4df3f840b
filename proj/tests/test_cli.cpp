#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "shiftlab/errors.hpp"
#include "spec_parser.hpp"

using namespace shiftlab;
using namespace shiftlab::cli;
using nlohmann::json;

namespace {

RunResult run_quiet(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.push_back("--quiet");
  return run(args, out, err);
}

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("shiftlab_test_" + name);
}

json read_json(const std::filesystem::path& p) {
  std::ifstream f(p);
  return json::parse(f);
}

}  // namespace

TEST_CASE("weight specifications") {
  CHECK(parse_weights("constant:0.5").weight_at(3) == 0.5);
  const auto s = parse_weights("split:neg=constant:0.5;pos=constant:2;cut=1");
  CHECK(s.weight_at(0) == 0.5);
  CHECK(s.weight_at(1) == 2.0);
  const auto nested = parse_weights("split:neg=(split:neg=(constant:3);pos=(constant:0.5);cut=-4);pos=(periodic:1,2@1);cut=2");
  CHECK(nested.weight_at(-5) == 3.0);
  CHECK(nested.weight_at(0) == 0.5);
  CHECK(nested.weight_at(2) == 2.0);
  CHECK(parse_weights("periodic:2,0.5").weight_at(1) == 0.5);
  CHECK(parse_weights("fhc:blocks=list:0,3,9;horizon=30").weight_at(9) == 8.0);
  CHECK_THROWS_AS(parse_weights("constant:-1"), PreconditionError);
}

TEST_CASE("explicit tables from csv") {
  const auto p = tmp("table.csv");
  {
    std::ofstream f(p);
    f << "index,value\n-1,4\n0,0.25\n1,3\n";
  }
  const auto w = parse_weights("explicit:" + p.filename().string() + ";negfill=0.5;posfill=2", p.parent_path());
  CHECK(w.weight_at(0) == 0.25);
  CHECK(w.weight_at(-7) == 0.5);
  CHECK(w.weight_at(7) == 2.0);
  CHECK_THROWS(parse_weights("explicit:does-not-exist.csv;negfill=1;posfill=1", p.parent_path()));
}

TEST_CASE("syntax errors carry positions") {
  auto position = [](const std::string& text) -> std::size_t {
    try {
      parse_weights(text);
    } catch (const ParseError& e) {
      return e.position();
    }
    return std::string::npos;
  };
  CHECK(position("constant:abc") == 9);
  CHECK(position("spiral:1") == 0);
  CHECK(position("split:neg=constant:1;pos=constant:1;cut=1;colour=red") != std::string::npos);
  CHECK(position("split:neg=constant:1;pos=constant:1") != std::string::npos);
  CHECK(position("split:neg=constant:1;neg=constant:2;pos=constant:1;cut=0") != std::string::npos);
  CHECK(position("periodic:") != std::string::npos);
  CHECK(position("constant:0.5") == std::string::npos);
  CHECK_THROWS_AS(parse_blocks("geometric:x"), ParseError);
}

TEST_CASE("exit codes on planted scenarios") {
  const auto pass = run_quiet({"classify", "--weights", "constant:0.5"});
  CHECK(pass.exit_code == kExitOk);
  CHECK(pass.report.results["verdict"] == "A");
  CHECK(pass.report.violations.empty());

  const auto bad = run_quiet({"perturb", "--weights", "constant:1", "--delta", "0.5", "--m", "2", "--kappa-scale", "0.5"});
  CHECK(bad.exit_code == kExitViolations);
  REQUIRE_FALSE(bad.report.violations.empty());
  CHECK(bad.report.violations[0]["property"] == "disjointness");

  const auto invalid = run_quiet({"classify", "--weights", "constant:-1"});
  CHECK(invalid.exit_code == kExitInvalid);
  CHECK_FALSE(invalid.report.error.empty());

  CHECK(run_quiet({"classify"}).exit_code == kExitInvalid);
  CHECK(run_quiet({"frobnicate"}).exit_code == kExitInvalid);
  CHECK(run_quiet({"kothe", "sideways"}).exit_code == kExitInvalid);
  CHECK(run_quiet({"classify", "--weights", "constant:(1"}).exit_code == kExitInvalid);
  CHECK(run_quiet({"perturb", "--weights", "constant:1", "--norm", "l0"}).exit_code == kExitInvalid);
}

TEST_CASE("violations are empty exactly when the exit code is 0") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"classify", "--weights", "split:neg=constant:2;pos=constant:0.5;cut=1"},
           {"perturb", "--weights", "constant:0.5", "--delta", "0.1", "--m", "3", "--samples", "500"},
           {"perturb", "--weights", "constant:1", "--kappa-scale", "0.25", "--samples", "500"},
           {"freqsets", "--horizon", "20000"},
           {"kothe", "chaos", "--horizon", "100000"},
           {"kothe", "alpha", "--blocks", "list:0,3,9", "--horizon", "50"},
           {"shadow", "--weights", "constant:0.5", "--seeds", "5", "--T", "10"},
           {"lemma22", "--weights", "constant:1"}}) {
    const auto r = run_quiet(args);
    CHECK_MESSAGE((r.exit_code == kExitOk) == r.report.violations.empty(), args[0]);
    CHECK(r.exit_code != kExitInvalid);
  }
}

TEST_CASE("kothe chaos via the cli") {
  const auto r = run_quiet({"kothe", "--blocks", "geometric:4", "chaos", "--horizon", "100000"});
  CHECK(r.exit_code == kExitOk);
  CHECK(r.report.results["evidence"] == "bounded");
  CHECK(r.report.results["ratio_one_at_block_starts"] == true);
}

TEST_CASE("big integers are serialized as strings") {
  const auto r = run_quiet({"kothe", "alpha", "--horizon", "100000"});
  const auto& blocks = r.report.results["blocks"];
  REQUIRE(blocks.size() > 5);
  CHECK(blocks.back()["alpha"].is_string());
  CHECK(blocks.back()["alpha"].get<std::string>().size() > 20);
}

TEST_CASE("json report is deterministic and round-trips") {
  const auto a = tmp("a.json"), b = tmp("b.json");
  const std::vector<std::string> base = {"perturb", "--weights", "split:neg=constant:0.5;pos=constant:2;cut=1",
                                         "--delta", "0.1", "--m", "5", "--seed", "9", "--samples", "2000"};
  auto args = base;
  args.insert(args.end(), {"--json", a.string()});
  const auto r1 = run_quiet(args);
  args = base;
  args.insert(args.end(), {"--json", b.string()});
  run_quiet(args);
  const auto ja = read_json(a), jb = read_json(b);
  CHECK(stable_view(ja).dump() == stable_view(jb).dump());
  CHECK(ja["schema"] == 1);
  CHECK(ja["seeds"] == json::array({9}));
  CHECK(ja.contains("duration_seconds"));
  const auto back = RunReport::from_json(ja);
  CHECK(back.to_json() == ja);
  CHECK(back.command == "perturb");
  CHECK(back.exit_code == r1.exit_code);

  // a different seed changes the sampled statistics
  args = base;
  args[args.size() - 3] = "10";
  args.insert(args.end(), {"--json", b.string()});
  run_quiet(args);
  CHECK(stable_view(read_json(b)) != stable_view(ja));
}

TEST_CASE("csv output") {
  const auto p = tmp("shadow.csv");
  const auto r = run_quiet({"shadow", "--weights", "split:neg=constant:0.5;pos=constant:2;cut=1", "--seeds", "3",
                            "--T", "10", "--csv", p.string()});
  CHECK(r.exit_code == kExitOk);
  std::ifstream f(p);
  std::string header, line;
  std::getline(f, header);
  CHECK(header == "seed,T,delta,measured_error,bound");
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("shadow command on a non-shadowable model reports the oracle ladder") {
  const auto r = run_quiet({"shadow", "--weights", "split:neg=constant:2;pos=constant:0.5;cut=1", "--style", "adversarial"});
  CHECK(r.exit_code == kExitOk);
  CHECK(r.report.results["strictly_increasing"] == true);
  CHECK(r.report.results["oracle_ladder"].size() == 3);
}
