#include "pnd/balance_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <ostream>
#include <thread>

namespace pnd {
namespace {

void require_routers(const SimBoard& board) {
  if (board.routers.empty()) throw SimError(SimError::Code::NoRouters, "board has no routers");
}

bool is_computer(const SimBoard& board, NodeIndex n) {
  return board.graph.node(n).kind == NodeKind::Computer;
}

}  // namespace

SimBoard SimBoard::from_lan(const LanConfig& lan, std::string name) {
  if (auto problem = structural_problem(lan))
    throw SimError(SimError::Code::InvalidTopology, name + ": " + *problem);
  const auto report = validate_lan(lan);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw SimError(SimError::Code::InvalidTopology,
                   name + ": " + std::string(to_string(v.code)) + ": " + v.message);
  }
  SimBoard b;
  b.name = std::move(name);
  b.graph = lan_graph(lan);
  auto by_id = [&](NodeIndex x, NodeIndex y) { return b.graph.node(x).id < b.graph.node(y).id; };
  b.routers = b.graph.nodes_of_kind(NodeKind::Router);
  b.computers = b.graph.nodes_of_kind(NodeKind::Computer);
  std::sort(b.routers.begin(), b.routers.end(), by_id);
  std::sort(b.computers.begin(), b.computers.end(), by_id);
  return b;
}

BlockMask block_mask(const SimBoard& board, const std::set<std::string>& blockers) {
  BlockMask mask(board.graph.size(), false);
  for (const auto& id : blockers) {
    const auto n = board.graph.at(id);
    if (!is_computer(board, n))
      throw SimError(SimError::Code::InvalidArgument, "blocker '" + id + "' is not a computer");
    mask[n] = true;
  }
  return mask;
}

int simulate_virus_walk(const SimBoard& board, const BlockMask& blocked, Rng& rng, int step_cap) {
  require_routers(board);
  const auto total = static_cast<int>(board.computers.size());
  NodeIndex pos = board.routers[uniform_index(rng, board.routers.size())];
  std::vector<bool> visited(board.graph.size(), false);
  visited[pos] = true;
  std::vector<NodeIndex> fresh;
  int destroyed = 0;
  for (int step = 0; step < step_cap && destroyed < total; ++step) {
    const auto adj = board.graph.adjacent(pos);
    if (adj.empty()) break;
    fresh.clear();
    for (auto n : adj)
      if (!visited[n]) fresh.push_back(n);
    pos = fresh.empty() ? adj[uniform_index(rng, adj.size())]
                        : fresh[uniform_index(rng, fresh.size())];
    const bool first_visit = !visited[pos];
    visited[pos] = true;
    if (is_computer(board, pos)) {
      if (blocked[pos]) break;
      if (first_visit) ++destroyed;
    }
  }
  return destroyed;
}

int simulate_virus_walk(const SimBoard& board, const std::set<std::string>& blockers, Rng& rng,
                        int step_cap) {
  return simulate_virus_walk(board, block_mask(board, blockers), rng, step_cap);
}

int worm_spread_from(const SimBoard& board, const BlockMask& blocked, NodeIndex entry,
                     int step_cap) {
  std::vector<bool> seen(board.graph.size(), false);
  std::deque<NodeIndex> frontier{entry};
  seen[entry] = true;
  int destroyed = 0;
  int expansions = 0;
  while (!frontier.empty() && expansions < step_cap) {
    const auto u = frontier.front();
    frontier.pop_front();
    ++expansions;
    for (auto v : board.graph.adjacent(u)) {
      if (seen[v]) continue;
      seen[v] = true;
      if (is_computer(board, v)) {
        if (blocked[v]) continue;
        ++destroyed;
      }
      frontier.push_back(v);
    }
  }
  return destroyed;
}

int simulate_worm_spread(const SimBoard& board, const BlockMask& blocked, Rng& rng, int step_cap) {
  require_routers(board);
  const auto entry = board.routers[uniform_index(rng, board.routers.size())];
  return worm_spread_from(board, blocked, entry, step_cap);
}

int simulate_worm_spread(const SimBoard& board, const std::set<std::string>& blockers, Rng& rng,
                         int step_cap) {
  return simulate_worm_spread(board, block_mask(board, blockers), rng, step_cap);
}

int run_trial(const SimBoard& board, const WalkerSpec& spec, int k, std::uint64_t seed,
              int trial) {
  auto rng = make_rng({seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(trial)});
  std::vector<NodeIndex> order = board.computers;
  shuffle_prefix(rng, std::span<NodeIndex>(order), static_cast<std::size_t>(k));
  BlockMask blocked(board.graph.size(), false);
  for (int i = 0; i < k && i < static_cast<int>(order.size()); ++i) blocked[order[i]] = true;
  return spec.attack == AttackType::Worm ? simulate_worm_spread(board, blocked, rng, spec.step_cap)
                                         : simulate_virus_walk(board, blocked, rng, spec.step_cap);
}

SweepResult sweep(const SimBoard& board, const WalkerSpec& spec, int trials, std::uint64_t seed,
                  unsigned threads) {
  if (trials < 1) throw SimError(SimError::Code::InvalidArgument, "trials must be at least 1");
  if (spec.attack != AttackType::Virus && spec.attack != AttackType::Worm)
    throw SimError(SimError::Code::InvalidArgument, "only virus and worm walkers are simulated");
  if (spec.step_cap < 1) throw SimError(SimError::Code::InvalidArgument, "step_cap must be positive");
  require_routers(board);

  constexpr int kCount = kComputersPerLan + 1;
  const std::size_t jobs = static_cast<std::size_t>(kCount) * static_cast<std::size_t>(trials);
  std::vector<int> outcome(jobs);
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const int k = static_cast<int>(j / static_cast<std::size_t>(trials));
      const int t = static_cast<int>(j % static_cast<std::size_t>(trials));
      outcome[j] = run_trial(board, spec, k, seed, t);
    }
  };
  if (threads <= 1) {
    work(0, jobs);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (jobs + threads - 1) / threads;
    for (std::size_t b = 0; b < jobs; b += chunk) pool.emplace_back(work, b, std::min(jobs, b + chunk));
  }

  SweepResult r;
  r.attack = spec.attack;
  r.topology = board.name;
  r.trials = trials;
  r.seed = seed;
  for (int k = 0; k < kCount; ++k) {
    const auto first = outcome.begin() + static_cast<std::ptrdiff_t>(k) * trials;
    const double sum = std::accumulate(first, first + trials, 0.0);
    const double mean = sum / trials;
    double ss = 0;
    for (auto it = first; it != first + trials; ++it) ss += (*it - mean) * (*it - mean);
    const double sd = trials > 1 ? std::sqrt(ss / (trials - 1)) : 0.0;
    r.points[k] = SweepPoint{k, mean, sd, sd / std::sqrt(static_cast<double>(trials))};
  }
  return r;
}

SweepResult sweep(AttackType attack, const LanConfig& lan, const std::string& name, int trials,
                  std::uint64_t seed, unsigned threads) {
  return sweep(SimBoard::from_lan(lan, name), WalkerSpec{attack, kDefaultStepCap}, trials, seed,
               threads);
}

Comparison compare_topologies(const LanConfig& topo_a, const std::string& name_a,
                              const LanConfig& topo_b, const std::string& name_b,
                              AttackType attack, int trials, std::uint64_t seed,
                              unsigned threads) {
  Comparison c;
  c.a = sweep(attack, topo_a, name_a, trials, seed, threads);
  c.b = sweep(attack, topo_b, name_b, trials, seed, threads);
  for (std::size_t k = 0; k < c.deltas.size(); ++k) {
    const auto& pa = c.a.points[k];
    const auto& pb = c.b.points[k];
    c.deltas[k] = DeltaPoint{static_cast<int>(k), pa.mean_destroyed - pb.mean_destroyed,
                             std::sqrt(pa.std_err * pa.std_err + pb.std_err * pb.std_err)};
  }
  return c;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& results) {
  out << "attack,topology,k,trials,seed,mean_destroyed,std_dev,std_err\n";
  for (const auto& r : results)
    for (const auto& p : r.points)
      out << to_string(r.attack) << ',' << r.topology << ',' << p.k << ',' << r.trials << ','
          << r.seed << ',' << format_number(p.mean_destroyed) << ',' << format_number(p.std_dev)
          << ',' << format_number(p.std_err) << '\n';
}

void write_comparison_csv(std::ostream& out, const Comparison& c) {
  out << "k,topology_a,topology_b,mean_a,mean_b,delta,std_err\n";
  for (std::size_t k = 0; k < c.deltas.size(); ++k)
    out << k << ',' << c.a.topology << ',' << c.b.topology << ','
        << format_number(c.a.points[k].mean_destroyed) << ','
        << format_number(c.b.points[k].mean_destroyed) << ','
        << format_number(c.deltas[k].delta) << ',' << format_number(c.deltas[k].std_err) << '\n';
}

}  // namespace pnd
