#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pnd/rules_json.hpp"
#include "pnd/topology.hpp"

using namespace pnd;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("pnd_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout.txt";
  const std::string cmd = std::string(PND_CLI) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

fs::path write(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

const std::string kData = std::string(PND_SOURCE_DIR) + "/data/";

}  // namespace

TEST_CASE("validate") {
  auto r = run("validate " + kData + "fig5_default.json");
  CHECK(r.code == 0);
  CHECK(r.out.find("ok") != std::string::npos);
  CHECK(run("validate " + kData + "fig8_dual_community.json").code == 0);

  LanConfig lan = fig5_default();
  lan.links.push_back({"c1", "c5"});
  r = run("validate " + write("budget.json", serialize_topology(lan)).string());
  CHECK(r.code == 1);
  CHECK(r.out.find("LinkBudget") != std::string::npos);

  r = run("validate " + write("broken.json", "{\n  \"computers\": [,]\n}").string());
  CHECK(r.code == 1);
  CHECK(r.out.find("line 2") != std::string::npos);

  CHECK(run("validate " + (scratch() / "missing.json").string()).code == 2);
  CHECK(run("validate").code == 2);
}

TEST_CASE("simulate and compare") {
  auto r = run("simulate --attack virus --topology fig5 --trials 200 --seed 42");
  CHECK(r.code == 0);
  CHECK(r.out.starts_with("attack,topology,k,trials,seed,mean_destroyed,std_dev,std_err\n"));
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 10);

  const auto csv = scratch() / "sweep.csv";
  r = run("simulate --attack worm --topology " + kData + "fig8_dual_community.json --trials 50 --out " +
          csv.string());
  CHECK(r.code == 0);
  CHECK(slurp(csv).find("\nworm,fig8_dual_community,8,50,42,0,0,0\n") != std::string::npos);

  CHECK(run("simulate --attack trojan").code == 2);
  CHECK(run("simulate --trials 0").code == 2);
  CHECK(run("simulate --topology " + (scratch() / "nope.json").string()).code == 2);
  LanConfig bad = fig5_default();
  bad.links.push_back({"c1", "c5"});
  CHECK(run("simulate --topology " + write("bad.json", serialize_topology(bad)).string()).code == 1);

  r = run("compare --attack worm --a fig5 --b fig8 --trials 100 --seed 3");
  CHECK(r.code == 0);
  CHECK(r.out.starts_with("k,topology_a,topology_b,mean_a,mean_b,delta,std_err\n0,fig5,fig8,8,8,0,0\n"));
}

TEST_CASE("selfplay") {
  const auto log = scratch() / "game.ndjson";
  auto r = run("selfplay --bot-a scout --bot-b random --games 4 --seed 5 --turn-cap 60 --log " +
               log.string());
  CHECK(r.code == 0);
  CHECK(r.out.starts_with("bot_a,bot_b,games,wins_a,wins_b,draws,mean_turns,seed\nscout,random,4,"));
  const auto parsed = parse_event_log(slurp(log));
  CHECK(parsed.config.turn_cap == 60);
  CHECK(replay(parsed).phase == Phase::Finished);
  CHECK(run("selfplay --bot-a genius").code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run("").code == 2);
  CHECK(run("explode").code == 2);
  CHECK(run("--help").code == 0);
}
