#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pnd/core_model.hpp"

namespace pnd {

// ---------------------------------------------------------------------------
// LAN declarations
// ---------------------------------------------------------------------------

struct ComputerDecl {
  std::string id;
  bool critical = false;
  friend bool operator==(const ComputerDecl&, const ComputerDecl&) = default;
};

struct MeshDecl {
  std::string id;
  friend bool operator==(const MeshDecl&, const MeshDecl&) = default;
};

struct RouterDecl {
  std::string id;
  int anchor_slot = 0;
  friend bool operator==(const RouterDecl&, const RouterDecl&) = default;
};

using LinkDecl = std::pair<std::string, std::string>;

/// One player's network. Routing links to the Internet are implied by each
/// router's anchor slot; `links` holds everything else.
struct LanConfig {
  std::vector<ComputerDecl> computers;
  std::vector<MeshDecl> mesh_points;
  std::vector<RouterDecl> routers;
  std::vector<LinkDecl> links;

  std::optional<PieceKind> kind_of(std::string_view id) const;
  /// First computer flagged critical, if any.
  std::optional<std::string> critical() const;
  /// Copy with every critical flag cleared.
  LanConfig without_critical() const;
  /// Copy with exactly `id` flagged critical.
  LanConfig with_critical(std::string_view id) const;
  /// Same content, canonical order (ids sorted, link endpoints sorted).
  LanConfig canonical() const;

  friend bool operator==(const LanConfig&, const LanConfig&) = default;
};

inline constexpr int kComputersPerLan = 8;
inline constexpr int kRoutersPerLan = 4;
inline constexpr int kMinMeshPoints = 4;
inline constexpr int kMaxMeshPoints = 8;
inline constexpr int kLinkBudget = 16;
inline constexpr int kMinComputerLinks = 2;
inline constexpr int kMaxComputerLinks = 3;
inline constexpr int kMinRouterMeshCoverage = 4;

enum class ViolationCode : std::uint8_t {
  ComputerCount,
  RouterCount,
  MeshPointRange,
  LinkBudget,
  ComputerDegree,
  RouterMeshCoverage,
  CriticalCount,
  Disconnected,
};

std::string_view to_string(ViolationCode c);
std::optional<ViolationCode> parse_violation_code(std::string_view s);

struct Violation {
  ViolationCode code;
  std::string subject;  // node id, or empty for whole-LAN constraints
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(ViolationCode c) const;
};

/// Checks the LAN construction rules. Violations come back sorted by code,
/// then subject id. Assumes the LAN is structurally sound (see
/// structural_problem).
ValidationReport validate_lan(const LanConfig& lan);

/// Duplicate ids, dangling or duplicate links, self loops and links between
/// kinds that may not be joined. Empty when the LAN is well formed.
std::optional<std::string> structural_problem(const LanConfig& lan);

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class TopologyError : public std::runtime_error {
 public:
  enum class Code { InvalidLan, AnchorMismatch, UnknownNode, SyntaxError, SchemaError };

  TopologyError(Code code, std::string message, std::string field = {},
                int line = 0, int column = 0);

  Code code() const { return code_; }
  /// Offending key or id for SchemaError.
  const std::string& field() const { return field_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Code code_;
  std::string field_;
  int line_;
  int column_;
};

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

enum class NodeKind : std::uint8_t { Computer, MeshPoint, Router, Intersection };

std::string_view to_string(NodeKind k);

struct NodeInfo {
  std::string id;
  NodeKind kind = NodeKind::Intersection;
  std::optional<PlayerId> owner;  // empty for Internet intersections
  std::string local_id;           // id inside the owning LAN
  int x = -1;                     // grid coordinates, intersections only
  int y = -1;
};

using NodeIndex = std::uint32_t;

/// Undirected simple graph with string ids. Adjacency lists are kept sorted
/// by node id so every traversal is deterministic.
class Graph {
 public:
  NodeIndex add_node(NodeInfo info);
  void add_edge(NodeIndex a, NodeIndex b);

  std::size_t size() const { return nodes_.size(); }
  const NodeInfo& node(NodeIndex i) const { return nodes_[i]; }
  std::span<const NodeIndex> adjacent(NodeIndex i) const { return adj_[i]; }
  bool has_edge(NodeIndex a, NodeIndex b) const;

  std::optional<NodeIndex> find(std::string_view id) const;
  /// Throws TopologyError(UnknownNode).
  NodeIndex at(std::string_view id) const;

  std::vector<NodeIndex> nodes_of_kind(NodeKind k) const;
  std::size_t edge_count() const;

  /// BFS hop counts from `source`; -1 where unreachable. Nodes for which
  /// `passable` returns false are never entered (the source always is).
  std::vector<int> distances_from(
      NodeIndex source, const std::function<bool(NodeIndex)>& passable = {}) const;

  bool connected() const;

 private:
  std::vector<NodeInfo> nodes_;
  std::vector<std::vector<NodeIndex>> adj_;
  std::unordered_map<std::string, NodeIndex> index_;
};

/// Single-LAN graph with local ids; used by the balance simulations.
Graph lan_graph(const LanConfig& lan);

struct InternetGrid {
  int width = 9;
  int height = 9;

  static InternetGrid square(int n) { return InternetGrid{n, n}; }

  /// Column of anchor slot 0..3 on either border row.
  int anchor_column(int slot) const;
  /// A sits along the bottom edge, B along the top.
  int border_row(PlayerId p) const { return p == PlayerId::A ? height - 1 : 0; }

  friend bool operator==(const InternetGrid&, const InternetGrid&) = default;
};

inline constexpr int kAnchorSlots = 4;

/// Both LANs fused with the Internet grid. Node ids: `a:<id>`, `b:<id>`,
/// `net:<x>,<y>`.
class BoardGraph {
 public:
  BoardGraph(Graph graph, InternetGrid grid, LanConfig lan_a, LanConfig lan_b);

  const Graph& graph() const { return graph_; }
  const InternetGrid& grid() const { return grid_; }
  /// Public LAN topology; critical flags are stripped on construction.
  const LanConfig& lan(PlayerId p) const { return lans_[index_of(p)]; }

  NodeIndex node_of(PlayerId p, std::string_view local_id) const;
  NodeIndex intersection(int x, int y) const;
  NodeIndex anchor(PlayerId p, int slot) const;

  static std::string lan_node_id(PlayerId p, std::string_view local_id);
  static std::string grid_node_id(int x, int y);

 private:
  Graph graph_;
  InternetGrid grid_;
  std::array<LanConfig, 2> lans_;
};

/// Throws TopologyError(InvalidLan) when either LAN fails validation and
/// TopologyError(AnchorMismatch) for anchor slots outside 0..3 or reused.
BoardGraph build_board(const LanConfig& lan_a, const LanConfig& lan_b,
                       const InternetGrid& grid = {});

/// Sorted neighbor ids. Throws TopologyError(UnknownNode).
std::vector<std::string> neighbors(const BoardGraph& board, std::string_view node);

/// Hop count, or nullopt when unreachable. Throws TopologyError(UnknownNode).
std::optional<int> shortest_path_length(const Graph& graph, std::string_view from,
                                        std::string_view to);
std::optional<int> shortest_path_length(const BoardGraph& board, std::string_view from,
                                        std::string_view to);

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

inline constexpr int kTopologyFormatVersion = 1;

/// Throws TopologyError(SyntaxError | SchemaError).
LanConfig parse_topology(std::string_view text);
/// Canonical form: sorted keys and ids, 2-space indent, trailing newline.
std::string serialize_topology(const LanConfig& lan);

// ---------------------------------------------------------------------------
// Shipped topologies
// ---------------------------------------------------------------------------

/// Symmetric reference LAN used for the defense-count sweeps. Critical: c8.
const LanConfig& fig5_default();
/// Two clusters joined by a single computer bridge. Critical: c8.
const LanConfig& fig8_dual_community();

/// Accepts "fig5", "fig5_default", "fig8", "fig8_dual_community".
std::optional<LanConfig> shipped_topology(std::string_view name);

}  // namespace pnd
