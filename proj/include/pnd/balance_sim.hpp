#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnd/core_model.hpp"
#include "pnd/rng.hpp"
#include "pnd/topology.hpp"

namespace pnd {

class SimError : public std::runtime_error {
 public:
  enum class Code { NoRouters, InvalidTopology, InvalidArgument };
  SimError(Code code, const std::string& message) : std::runtime_error(message), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

inline constexpr int kDefaultStepCap = 10000;

struct WalkerSpec {
  AttackType attack = AttackType::Virus;  // Virus or Worm
  int step_cap = kDefaultStepCap;
};

/// One LAN with its routers as entry points. Internet transit does not
/// change destruction counts and is left out.
struct SimBoard {
  std::string name;
  Graph graph;
  std::vector<NodeIndex> routers;    // sorted by id
  std::vector<NodeIndex> computers;  // sorted by id

  /// Throws SimError(InvalidTopology) unless the LAN validates.
  static SimBoard from_lan(const LanConfig& lan, std::string name);
};

/// Blocked flags indexed by graph node.
using BlockMask = std::vector<bool>;

BlockMask block_mask(const SimBoard& board, const std::set<std::string>& blockers);

/// Random walk from a uniform router that prefers unvisited neighbours. Stops
/// on the first blocked computer, after `step_cap` steps, or once every
/// computer is destroyed. Throws SimError(NoRouters).
int simulate_virus_walk(const SimBoard& board, const BlockMask& blocked, Rng& rng,
                        int step_cap = kDefaultStepCap);
int simulate_virus_walk(const SimBoard& board, const std::set<std::string>& blockers, Rng& rng,
                        int step_cap = kDefaultStepCap);

/// Breadth-wise spread from a uniform router: every instance replicates to
/// all unvisited neighbours; blocked computers stop the instance that reaches
/// them. No replication cap. `step_cap` bounds node expansions.
int simulate_worm_spread(const SimBoard& board, const BlockMask& blocked, Rng& rng,
                         int step_cap = kDefaultStepCap);
int simulate_worm_spread(const SimBoard& board, const std::set<std::string>& blockers, Rng& rng,
                         int step_cap = kDefaultStepCap);

/// Worm spread from a fixed entry router; deterministic.
int worm_spread_from(const SimBoard& board, const BlockMask& blocked, NodeIndex entry,
                     int step_cap = kDefaultStepCap);

/// One trial of the sweep protocol: draws the k blockers, then hands the
/// same stream to the walker.
int run_trial(const SimBoard& board, const WalkerSpec& spec, int k, std::uint64_t seed,
              int trial);

struct SweepPoint {
  int k = 0;
  double mean_destroyed = 0;
  double std_dev = 0;
  double std_err = 0;
};

struct SweepResult {
  AttackType attack = AttackType::Virus;
  std::string topology;
  int trials = 0;
  std::uint64_t seed = 0;
  std::array<SweepPoint, kComputersPerLan + 1> points{};
};

/// Trials run on `threads` workers (0 = hardware concurrency); the result is
/// identical for any thread count. Throws SimError(InvalidArgument) for
/// trials < 1 or a non-walker attack.
SweepResult sweep(const SimBoard& board, const WalkerSpec& spec, int trials, std::uint64_t seed,
                  unsigned threads = 0);
SweepResult sweep(AttackType attack, const LanConfig& lan, const std::string& name, int trials,
                  std::uint64_t seed, unsigned threads = 0);

struct DeltaPoint {
  int k = 0;
  double delta = 0;    // mean_a - mean_b
  double std_err = 0;  // combined standard error
};

struct Comparison {
  SweepResult a;
  SweepResult b;
  std::array<DeltaPoint, kComputersPerLan + 1> deltas{};
};

Comparison compare_topologies(const LanConfig& topo_a, const std::string& name_a,
                              const LanConfig& topo_b, const std::string& name_b,
                              AttackType attack, int trials, std::uint64_t seed,
                              unsigned threads = 0);

/// `attack,topology,k,trials,seed,mean_destroyed,std_dev,std_err`
void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& results);
/// `k,topology_a,topology_b,mean_a,mean_b,delta,std_err`
void write_comparison_csv(std::ostream& out, const Comparison& c);

/// %.6g
std::string format_number(double v);

}  // namespace pnd
