#include <doctest.h>

#include <cmath>
#include <deque>
#include <sstream>

#include "pnd/balance_sim.hpp"

using namespace pnd;

namespace {

// Stopping at the first blocked computer, with blockers a uniform k-subset
// independent of the visiting order, gives (8 - k) / (k + 1) kills.
double virus_expectation(int k) { return (8.0 - k) / (k + 1.0); }

// Flood from one router written against the raw graph: blocked computers
// are never entered, everything else reachable is.
int flood(const Graph& g, NodeIndex entry, const std::vector<bool>& blocked) {
  std::vector<bool> seen(g.size(), false);
  std::deque<NodeIndex> q{entry};
  seen[entry] = true;
  int kills = 0;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    for (auto w : g.adjacent(u)) {
      if (seen[w]) continue;
      seen[w] = true;
      if (g.node(w).kind == NodeKind::Computer) {
        if (blocked[w]) continue;
        ++kills;
      }
      q.push_back(w);
    }
  }
  return kills;
}

/// Exact worm expectation: every k-subset of computers times every router.
std::array<double, 9> worm_exact(const LanConfig& lan) {
  const Graph g = lan_graph(lan);
  std::vector<NodeIndex> computers, routers;
  for (const auto& c : lan.computers) computers.push_back(g.at(c.id));
  for (const auto& r : lan.routers) routers.push_back(g.at(r.id));
  std::array<double, 9> sum{};
  std::array<int, 9> count{};
  for (unsigned mask = 0; mask < 256; ++mask) {
    std::vector<bool> blocked(g.size(), false);
    int k = 0;
    for (int i = 0; i < 8; ++i)
      if (mask & (1U << i)) {
        blocked[computers[i]] = true;
        ++k;
      }
    for (auto r : routers) {
      sum[k] += flood(g, r, blocked);
      ++count[k];
    }
  }
  for (int k = 0; k <= 8; ++k) sum[k] /= count[k];
  return sum;
}

}  // namespace

TEST_CASE("exact worm curves for the shipped LANs") {
  const std::array<double, 9> fig5 = {8, 6, 4, 2.598, 1.657, 1.018, 0.571, 0.25, 0};
  const std::array<double, 9> fig8 = {8, 4.75, 2.821, 1.705, 1.025, 0.594, 0.312, 0.125, 0};
  const auto a = worm_exact(fig5_default());
  const auto b = worm_exact(fig8_dual_community());
  for (int k = 0; k <= 8; ++k) {
    CHECK(a[k] == doctest::Approx(fig5[k]).epsilon(0.001));
    CHECK(b[k] == doctest::Approx(fig8[k]).epsilon(0.001));
    CHECK(b[k] <= a[k] + 1e-12);
  }
}

TEST_CASE("library worm spread agrees with the flood oracle on every subset") {
  for (const auto* lan : {&fig5_default(), &fig8_dual_community()}) {
    const auto board = SimBoard::from_lan(*lan, "x");
    for (unsigned mask = 0; mask < 256; ++mask) {
      std::set<std::string> blockers;
      std::vector<bool> blocked(board.graph.size(), false);
      for (int i = 0; i < 8; ++i)
        if (mask & (1U << i)) {
          blockers.insert(board.graph.node(board.computers[i]).id);
          blocked[board.computers[i]] = true;
        }
      const auto m = block_mask(board, blockers);
      for (auto r : board.routers) REQUIRE(worm_spread_from(board, m, r) == flood(board.graph, r, blocked));
    }
  }
}

TEST_CASE("virus sweep matches the closed form") {
  const auto board = SimBoard::from_lan(fig5_default(), "fig5");
  const auto r = sweep(board, {AttackType::Virus}, 20000, 11, 2);
  for (const auto& p : r.points) {
    if (p.k == 0 || p.k == 8) {
      CHECK(p.mean_destroyed == virus_expectation(p.k));
      CHECK(p.std_dev == 0);
      continue;
    }
    CHECK_MESSAGE(std::abs(p.mean_destroyed - virus_expectation(p.k)) < 4 * p.std_err, "k=" << p.k);
  }
}

TEST_CASE("worm sweep matches the exact expectation") {
  for (const auto* lan : {&fig5_default(), &fig8_dual_community()}) {
    const auto exact = worm_exact(*lan);
    const auto r = sweep(AttackType::Worm, *lan, "t", 20000, 12, 2);
    for (const auto& p : r.points) {
      const double tol = std::max(4 * p.std_err, 1e-12);
      CHECK_MESSAGE(std::abs(p.mean_destroyed - exact[p.k]) <= tol, "k=" << p.k);
    }
  }
}

TEST_CASE("worm never destroys fewer than the virus on the same stream") {
  const auto board = SimBoard::from_lan(fig5_default(), "fig5");
  for (int k = 0; k <= 8; ++k)
    for (int t = 0; t < 300; ++t)
      CHECK(run_trial(board, {AttackType::Worm}, k, 3, t) >=
            run_trial(board, {AttackType::Virus}, k, 3, t));
}

TEST_CASE("boundary cases") {
  const auto board = SimBoard::from_lan(fig5_default(), "fig5");
  Rng rng(1);
  std::set<std::string> all;
  for (auto c : board.computers) all.insert(board.graph.node(c).id);
  CHECK(simulate_virus_walk(board, all, rng) == 0);
  CHECK(simulate_worm_spread(board, all, rng) == 0);
  CHECK(simulate_virus_walk(board, std::set<std::string>{}, rng) == 8);
  CHECK(simulate_worm_spread(board, std::set<std::string>{}, rng) == 8);
  CHECK(simulate_virus_walk(board, std::set<std::string>{}, rng, 0) == 0);
  CHECK(simulate_virus_walk(board, std::set<std::string>{}, rng, 3) <= 3);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(SimBoard::from_lan(fig5_default().without_critical(), "bad"), SimError);
  auto board = SimBoard::from_lan(fig5_default(), "fig5");
  CHECK_THROWS_AS(sweep(board, {AttackType::Virus}, 0, 1), SimError);
  CHECK_THROWS_AS(sweep(board, {AttackType::Trojan}, 10, 1), SimError);
  board.routers.clear();
  Rng rng(1);
  try {
    simulate_virus_walk(board, std::set<std::string>{}, rng);
    FAIL("expected NoRouters");
  } catch (const SimError& e) {
    CHECK(e.code() == SimError::Code::NoRouters);
  }
}

TEST_CASE("sweeps are deterministic for any thread count") {
  const auto board = SimBoard::from_lan(fig8_dual_community(), "fig8");
  for (auto attack : {AttackType::Virus, AttackType::Worm}) {
    const auto one = sweep(board, {attack}, 999, 77, 1);
    const auto three = sweep(board, {attack}, 999, 77, 3);
    for (int k = 0; k <= 8; ++k) {
      CHECK(one.points[k].mean_destroyed == three.points[k].mean_destroyed);
      CHECK(one.points[k].std_dev == three.points[k].std_dev);
    }
  }
  const auto other = sweep(board, {AttackType::Virus}, 999, 78, 1);
  CHECK(other.points[3].mean_destroyed != sweep(board, {AttackType::Virus}, 999, 77, 1).points[3].mean_destroyed);
}

TEST_CASE("standard error is the sample deviation over root n") {
  const auto r = sweep(AttackType::Worm, fig5_default(), "fig5", 400, 5, 1);
  for (const auto& p : r.points) CHECK(p.std_err == doctest::Approx(p.std_dev / 20.0));
  // Quadrupling the trials roughly halves the error.
  const auto big = sweep(AttackType::Worm, fig5_default(), "fig5", 1600, 5, 1);
  CHECK(big.points[3].std_err < 0.6 * r.points[3].std_err);
}

TEST_CASE("identical topologies compare to zero") {
  const auto c = compare_topologies(fig5_default(), "a", fig5_default(), "b", AttackType::Worm, 500, 9);
  for (const auto& d : c.deltas) CHECK(d.delta == 0);
}

TEST_CASE("csv output") {
  const auto r = sweep(AttackType::Virus, fig5_default(), "fig5", 10, 42, 1);
  std::ostringstream out;
  write_sweep_csv(out, {r});
  const auto text = out.str();
  CHECK(text.starts_with("attack,topology,k,trials,seed,mean_destroyed,std_dev,std_err\n"));
  CHECK(text.find("\nvirus,fig5,0,10,42,8,0,0\n") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);

  std::ostringstream cmp;
  write_comparison_csv(cmp, compare_topologies(fig5_default(), "fig5", fig8_dual_community(), "fig8",
                                               AttackType::Worm, 10, 1));
  CHECK(cmp.str().starts_with("k,topology_a,topology_b,mean_a,mean_b,delta,std_err\n0,fig5,fig8,8,8,0,0\n"));
  CHECK(format_number(1.0 / 3) == "0.333333");
  CHECK(format_number(2) == "2");
}
