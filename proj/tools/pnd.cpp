// pnd: topology validation, balance sweeps, bot self-play and the game server.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pnd/balance_sim.hpp"
#include "pnd/bots.hpp"
#include "pnd/server.hpp"
#include "pnd/topology.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Shipped name or path to a topology file.
std::pair<pnd::LanConfig, std::string> load_topology(const std::string& spec) {
  if (auto shipped = pnd::shipped_topology(spec)) {
    const std::string name = spec.starts_with("fig5") ? "fig5" : "fig8";
    return {*shipped, name};
  }
  auto lan = pnd::parse_topology(read_file(spec));
  auto name = spec.substr(spec.find_last_of('/') + 1);
  if (auto dot = name.rfind('.'); dot != std::string::npos) name.resize(dot);
  return {lan, name};
}

pnd::AttackType walker(const std::string& s) {
  return s == "worm" ? pnd::AttackType::Worm : pnd::AttackType::Virus;
}

std::ostream& output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw UsageError("cannot write '" + path + "'");
  return file;
}

int validate(const std::string& path) {
  pnd::LanConfig lan;
  try {
    lan = pnd::parse_topology(read_file(path));
  } catch (const pnd::TopologyError& e) {
    std::cout << path << ": " << e.what();
    if (e.line() > 0) std::cout << " (line " << e.line() << ", column " << e.column() << ")";
    std::cout << "\n";
    return kInvalid;
  }
  const auto report = pnd::validate_lan(lan);
  if (report.ok()) {
    std::cout << path << ": ok\n";
    return kOk;
  }
  for (const auto& v : report.violations) {
    std::cout << pnd::to_string(v.code);
    if (!v.subject.empty()) std::cout << " " << v.subject;
    std::cout << ": " << v.message << "\n";
  }
  return kInvalid;
}

pnd::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packets and defenses: LAN validation, balance simulation, self-play and serving"};
  app.require_subcommand(1);

  std::string topology_file;
  auto* validate_cmd = app.add_subcommand("validate", "Check a topology file against the LAN rules");
  validate_cmd->add_option("topology", topology_file, "Topology JSON file")->required();

  std::string attack = "virus", topology = "fig5", out;
  int trials = 1000;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  auto* sim = app.add_subcommand("simulate", "Sweep defended-computer counts 0..8");
  sim->add_option("--attack", attack, "virus or worm")->check(CLI::IsMember({"virus", "worm"}));
  sim->add_option("--topology", topology, "fig5, fig8 or a topology file");
  sim->add_option("--trials", trials, "Trials per defense count")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "Base seed");
  sim->add_option("--out", out, "CSV output path (default stdout)");
  sim->add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::string topo_a = "fig5", topo_b = "fig8";
  auto* cmp = app.add_subcommand("compare", "Compare two topologies under the same sweep");
  cmp->add_option("--attack", attack, "virus or worm")->check(CLI::IsMember({"virus", "worm"}));
  cmp->add_option("--a", topo_a, "First topology");
  cmp->add_option("--b", topo_b, "Second topology");
  cmp->add_option("--trials", trials, "Trials per defense count")->check(CLI::PositiveNumber);
  cmp->add_option("--seed", seed, "Base seed");
  cmp->add_option("--out", out, "CSV output path (default stdout)");
  cmp->add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::string bot_a = "scout", bot_b = "random", log_path;
  int games = 100, turn_cap = pnd::kDefaultTurnCap;
  auto* play = app.add_subcommand("selfplay", "Bot tournament");
  play->add_option("--bot-a", bot_a, "random or scout")->check(CLI::IsMember({"random", "scout"}));
  play->add_option("--bot-b", bot_b, "random or scout")->check(CLI::IsMember({"random", "scout"}));
  play->add_option("--games", games, "Number of games")->check(CLI::PositiveNumber);
  play->add_option("--seed", seed, "Base seed");
  play->add_option("--turn-cap", turn_cap, "Turns before a draw")->check(CLI::PositiveNumber);
  play->add_option("--topology", topology, "LAN used by both players");
  play->add_option("--out", out, "CSV output path (default stdout)");
  play->add_option("--log", log_path, "Write the first game's event log here");
  play->add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::string address = "0.0.0.0";
  unsigned short port = 8080;
  unsigned serve_threads = 1;
  auto* serve = app.add_subcommand("serve", "Run the HTTP/WebSocket game server");
  serve->add_option("--port", port, "Listen port");
  serve->add_option("--address", address, "Listen address");
  serve->add_option("--threads", serve_threads, "I/O threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate_cmd) return validate(topology_file);

    if (*sim) {
      auto [lan, name] = load_topology(topology);
      const auto result = pnd::sweep(walker(attack), lan, name, trials, seed, threads);
      std::ofstream file;
      pnd::write_sweep_csv(output(out, file), {result});
      return kOk;
    }

    if (*cmp) {
      auto [lan_a, name_a] = load_topology(topo_a);
      auto [lan_b, name_b] = load_topology(topo_b);
      const auto c = pnd::compare_topologies(lan_a, name_a, lan_b, name_b, walker(attack), trials,
                                             seed, threads);
      std::ofstream file;
      pnd::write_comparison_csv(output(out, file), c);
      return kOk;
    }

    if (*play) {
      auto [lan, name] = load_topology(topology);
      if (lan.critical() == std::nullopt || !pnd::validate_lan(lan).ok()) {
        std::cerr << "topology '" << name << "' is not a valid LAN\n";
        return kInvalid;
      }
      pnd::SelfPlayOptions options;
      options.lan_a = lan;
      options.lan_b = lan;
      options.turn_cap = turn_cap;
      const auto a = *pnd::parse_bot_kind(bot_a);
      const auto b = *pnd::parse_bot_kind(bot_b);
      const auto summary = pnd::tournament(a, b, games, seed, options, threads);
      std::ofstream file;
      pnd::write_tournament_csv(output(out, file), {summary});
      if (!log_path.empty()) {
        const auto first = pnd::self_play(a, b, pnd::derive_seed({seed, 0}), options);
        std::ofstream log(log_path);
        if (!log) throw UsageError("cannot write '" + log_path + "'");
        log << pnd::write_event_log(first.log);
      }
      return kOk;
    }

    if (*serve) {
      pnd::SessionManager sessions;
      pnd::Server server(sessions, address, port, serve_threads);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << address << ":" << server.port() << "\n";
      server.run();
      g_server = nullptr;
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const pnd::TopologyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const pnd::SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
