#include "pnd/topology.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

namespace pnd {

using nlohmann::json;

// ---------------------------------------------------------------------------
// LanConfig
// ---------------------------------------------------------------------------

std::optional<PieceKind> LanConfig::kind_of(std::string_view id) const {
  for (const auto& c : computers)
    if (c.id == id) return PieceKind::Computer;
  for (const auto& m : mesh_points)
    if (m.id == id) return PieceKind::MeshPoint;
  for (const auto& r : routers)
    if (r.id == id) return PieceKind::Router;
  return std::nullopt;
}

std::optional<std::string> LanConfig::critical() const {
  for (const auto& c : computers)
    if (c.critical) return c.id;
  return std::nullopt;
}

LanConfig LanConfig::without_critical() const {
  LanConfig out = *this;
  for (auto& c : out.computers) c.critical = false;
  return out;
}

LanConfig LanConfig::with_critical(std::string_view id) const {
  LanConfig out = *this;
  for (auto& c : out.computers) c.critical = (c.id == id);
  return out;
}

LanConfig LanConfig::canonical() const {
  LanConfig out = *this;
  auto by_id = [](const auto& l, const auto& r) { return l.id < r.id; };
  std::sort(out.computers.begin(), out.computers.end(), by_id);
  std::sort(out.mesh_points.begin(), out.mesh_points.end(), by_id);
  std::sort(out.routers.begin(), out.routers.end(), by_id);
  for (auto& [a, b] : out.links)
    if (b < a) std::swap(a, b);
  std::sort(out.links.begin(), out.links.end());
  return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 8> kViolationNames = {
    "ComputerCount",  "RouterCount",        "MeshPointRange", "LinkBudget",
    "ComputerDegree", "RouterMeshCoverage", "CriticalCount",  "Disconnected"};

bool linkable(PieceKind a, PieceKind b) {
  using enum PieceKind;
  if (a > b) std::swap(a, b);
  return (a == Computer && b == Computer) || (a == Computer && b == MeshPoint) ||
         (a == MeshPoint && b == Router);
}

}  // namespace

std::string_view to_string(ViolationCode c) {
  return kViolationNames[static_cast<std::size_t>(c)];
}

std::optional<ViolationCode> parse_violation_code(std::string_view s) {
  for (std::size_t i = 0; i < kViolationNames.size(); ++i)
    if (kViolationNames[i] == s) return static_cast<ViolationCode>(i);
  return std::nullopt;
}

bool ValidationReport::has(ViolationCode c) const {
  return std::any_of(violations.begin(), violations.end(),
                     [c](const Violation& v) { return v.code == c; });
}

std::optional<std::string> structural_problem(const LanConfig& lan) {
  std::map<std::string, PieceKind> kinds;
  auto declare = [&](const std::string& id, PieceKind k) -> std::optional<std::string> {
    if (id.empty()) return "empty node id";
    if (!kinds.emplace(id, k).second) return "duplicate node id '" + id + "'";
    return std::nullopt;
  };
  for (const auto& c : lan.computers)
    if (auto e = declare(c.id, PieceKind::Computer)) return e;
  for (const auto& m : lan.mesh_points)
    if (auto e = declare(m.id, PieceKind::MeshPoint)) return e;
  for (const auto& r : lan.routers)
    if (auto e = declare(r.id, PieceKind::Router)) return e;

  std::set<std::pair<std::string, std::string>> seen;
  for (auto [a, b] : lan.links) {
    auto ka = kinds.find(a);
    auto kb = kinds.find(b);
    if (ka == kinds.end()) return "link references unknown node '" + a + "'";
    if (kb == kinds.end()) return "link references unknown node '" + b + "'";
    if (a == b) return "self link on '" + a + "'";
    if (!linkable(ka->second, kb->second))
      return "nodes '" + a + "' and '" + b + "' cannot be linked";
    if (b < a) std::swap(a, b);
    if (!seen.emplace(a, b).second) return "duplicate link " + a + "-" + b;
  }
  return std::nullopt;
}

ValidationReport validate_lan(const LanConfig& lan) {
  std::vector<Violation> out;
  const int computers = static_cast<int>(lan.computers.size());
  const int routers = static_cast<int>(lan.routers.size());
  const int meshes = static_cast<int>(lan.mesh_points.size());
  const int links = static_cast<int>(lan.links.size());

  if (computers != kComputersPerLan)
    out.push_back({ViolationCode::ComputerCount, "",
                   "expected 8 computers, found " + std::to_string(computers)});
  if (routers != kRoutersPerLan)
    out.push_back({ViolationCode::RouterCount, "",
                   "expected 4 routers, found " + std::to_string(routers)});
  if (meshes < kMinMeshPoints || meshes > kMaxMeshPoints)
    out.push_back({ViolationCode::MeshPointRange, "",
                   "expected 4 to 8 mesh points, found " + std::to_string(meshes)});
  if (links > kLinkBudget)
    out.push_back({ViolationCode::LinkBudget, "",
                   "at most 16 links allowed, found " + std::to_string(links)});

  std::map<std::string, int> degree;
  for (const auto& c : lan.computers) degree[c.id] = 0;
  std::set<std::string> covered_mesh;
  for (const auto& [a, b] : lan.links) {
    if (auto it = degree.find(a); it != degree.end()) ++it->second;
    if (auto it = degree.find(b); it != degree.end()) ++it->second;
    auto ka = lan.kind_of(a);
    auto kb = lan.kind_of(b);
    if (ka == PieceKind::Router && kb == PieceKind::MeshPoint) covered_mesh.insert(b);
    if (kb == PieceKind::Router && ka == PieceKind::MeshPoint) covered_mesh.insert(a);
  }
  for (const auto& [id, d] : degree)
    if (d < kMinComputerLinks || d > kMaxComputerLinks)
      out.push_back({ViolationCode::ComputerDegree, id,
                     "computer uses " + std::to_string(d) + " links; 2 to 3 required"});

  if (static_cast<int>(covered_mesh.size()) < kMinRouterMeshCoverage)
    out.push_back({ViolationCode::RouterMeshCoverage, "",
                   "routers reach " + std::to_string(covered_mesh.size()) +
                       " distinct mesh points; at least 4 required"});

  const auto criticals = std::count_if(lan.computers.begin(), lan.computers.end(),
                                       [](const ComputerDecl& c) { return c.critical; });
  if (criticals != 1)
    out.push_back({ViolationCode::CriticalCount, "",
                   "exactly one critical computer required, found " +
                       std::to_string(criticals)});

  // Every computer and mesh point must reach a router.
  const Graph g = lan_graph(lan);
  std::vector<bool> reached(g.size(), false);
  for (NodeIndex r : g.nodes_of_kind(NodeKind::Router)) {
    auto d = g.distances_from(r);
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i] >= 0) reached[i] = true;
  }
  for (NodeIndex i = 0; i < g.size(); ++i) {
    const auto& n = g.node(i);
    if (n.kind == NodeKind::Router || reached[i]) continue;
    out.push_back({ViolationCode::Disconnected, n.id,
                   std::string(to_string(n.kind)) + " '" + n.id + "' cannot reach a router"});
  }

  std::stable_sort(out.begin(), out.end(), [](const Violation& l, const Violation& r) {
    if (l.code != r.code) return l.code < r.code;
    return l.subject < r.subject;
  });
  return ValidationReport{std::move(out)};
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

TopologyError::TopologyError(Code code, std::string message, std::string field, int line,
                             int column)
    : std::runtime_error(std::move(message)),
      code_(code),
      field_(std::move(field)),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Computer: return "computer";
    case NodeKind::MeshPoint: return "mesh_point";
    case NodeKind::Router: return "router";
    case NodeKind::Intersection: return "intersection";
  }
  return "?";
}

NodeIndex Graph::add_node(NodeInfo info) {
  const auto idx = static_cast<NodeIndex>(nodes_.size());
  index_.emplace(info.id, idx);
  nodes_.push_back(std::move(info));
  adj_.emplace_back();
  return idx;
}

void Graph::add_edge(NodeIndex a, NodeIndex b) {
  if (a == b || has_edge(a, b)) return;
  auto insert_sorted = [this](std::vector<NodeIndex>& list, NodeIndex v) {
    auto pos = std::lower_bound(list.begin(), list.end(), v, [this](NodeIndex l, NodeIndex r) {
      return nodes_[l].id < nodes_[r].id;
    });
    list.insert(pos, v);
  };
  insert_sorted(adj_[a], b);
  insert_sorted(adj_[b], a);
}

bool Graph::has_edge(NodeIndex a, NodeIndex b) const {
  const auto& l = adj_[a];
  return std::find(l.begin(), l.end(), b) != l.end();
}

std::optional<NodeIndex> Graph::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex Graph::at(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw TopologyError(TopologyError::Code::UnknownNode,
                      "unknown node '" + std::string(id) + "'", std::string(id));
}

std::vector<NodeIndex> Graph::nodes_of_kind(NodeKind k) const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].kind == k) out.push_back(i);
  return out;
}

std::size_t Graph::edge_count() const {
  std::size_t n = 0;
  for (const auto& l : adj_) n += l.size();
  return n / 2;
}

std::vector<int> Graph::distances_from(NodeIndex source,
                                       const std::function<bool(NodeIndex)>& passable) const {
  std::vector<int> dist(nodes_.size(), -1);
  std::deque<NodeIndex> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    NodeIndex u = queue.front();
    queue.pop_front();
    for (NodeIndex v : adj_[u]) {
      if (dist[v] >= 0) continue;
      if (passable && !passable(v)) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

bool Graph::connected() const {
  if (nodes_.empty()) return true;
  auto d = distances_from(0);
  return std::all_of(d.begin(), d.end(), [](int x) { return x >= 0; });
}

Graph lan_graph(const LanConfig& lan) {
  Graph g;
  for (const auto& c : lan.computers) g.add_node({c.id, NodeKind::Computer, {}, c.id});
  for (const auto& m : lan.mesh_points) g.add_node({m.id, NodeKind::MeshPoint, {}, m.id});
  for (const auto& r : lan.routers) g.add_node({r.id, NodeKind::Router, {}, r.id});
  for (const auto& [a, b] : lan.links) {
    auto ia = g.find(a);
    auto ib = g.find(b);
    if (ia && ib) g.add_edge(*ia, *ib);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Board
// ---------------------------------------------------------------------------

int InternetGrid::anchor_column(int slot) const { return (2 * slot + 1) * width / 8; }

BoardGraph::BoardGraph(Graph graph, InternetGrid grid, LanConfig lan_a, LanConfig lan_b)
    : graph_(std::move(graph)),
      grid_(grid),
      lans_{lan_a.without_critical(), lan_b.without_critical()} {}

std::string BoardGraph::lan_node_id(PlayerId p, std::string_view local_id) {
  return std::string(to_string(p)) + ":" + std::string(local_id);
}

std::string BoardGraph::grid_node_id(int x, int y) {
  return "net:" + std::to_string(x) + "," + std::to_string(y);
}

NodeIndex BoardGraph::node_of(PlayerId p, std::string_view local_id) const {
  return graph_.at(lan_node_id(p, local_id));
}

NodeIndex BoardGraph::intersection(int x, int y) const {
  return graph_.at(grid_node_id(x, y));
}

NodeIndex BoardGraph::anchor(PlayerId p, int slot) const {
  return intersection(grid_.anchor_column(slot), grid_.border_row(p));
}

BoardGraph build_board(const LanConfig& lan_a, const LanConfig& lan_b,
                       const InternetGrid& grid) {
  if (grid.width < kAnchorSlots || grid.height < 2)
    throw TopologyError(TopologyError::Code::AnchorMismatch,
                        "grid too small to host four distinct anchor slots");

  const std::array<const LanConfig*, 2> lans = {&lan_a, &lan_b};
  for (auto p : kPlayers) {
    const LanConfig& lan = *lans[index_of(p)];
    if (auto problem = structural_problem(lan))
      throw TopologyError(TopologyError::Code::InvalidLan,
                          "player " + std::string(to_string(p)) + ": " + *problem);
    auto report = validate_lan(lan);
    if (!report.ok())
      throw TopologyError(TopologyError::Code::InvalidLan,
                          "player " + std::string(to_string(p)) + " LAN invalid: " +
                              std::string(to_string(report.violations.front().code)));
    std::set<int> slots;
    for (const auto& r : lan.routers) {
      if (r.anchor_slot < 0 || r.anchor_slot >= kAnchorSlots || !slots.insert(r.anchor_slot).second)
        throw TopologyError(TopologyError::Code::AnchorMismatch,
                            "router '" + r.id + "' references anchor slot " +
                                std::to_string(r.anchor_slot),
                            r.id);
    }
  }

  Graph g;
  for (auto p : kPlayers) {
    const LanConfig& lan = *lans[index_of(p)];
    for (const auto& c : lan.computers)
      g.add_node({BoardGraph::lan_node_id(p, c.id), NodeKind::Computer, p, c.id});
    for (const auto& m : lan.mesh_points)
      g.add_node({BoardGraph::lan_node_id(p, m.id), NodeKind::MeshPoint, p, m.id});
    for (const auto& r : lan.routers)
      g.add_node({BoardGraph::lan_node_id(p, r.id), NodeKind::Router, p, r.id});
  }
  for (int y = 0; y < grid.height; ++y)
    for (int x = 0; x < grid.width; ++x)
      g.add_node({BoardGraph::grid_node_id(x, y), NodeKind::Intersection, std::nullopt, "", x, y});

  for (auto p : kPlayers) {
    const LanConfig& lan = *lans[index_of(p)];
    for (const auto& [a, b] : lan.links)
      g.add_edge(g.at(BoardGraph::lan_node_id(p, a)), g.at(BoardGraph::lan_node_id(p, b)));
    for (const auto& r : lan.routers)
      g.add_edge(g.at(BoardGraph::lan_node_id(p, r.id)),
                 g.at(BoardGraph::grid_node_id(grid.anchor_column(r.anchor_slot),
                                               grid.border_row(p))));
  }
  for (int y = 0; y < grid.height; ++y)
    for (int x = 0; x < grid.width; ++x) {
      const auto here = g.at(BoardGraph::grid_node_id(x, y));
      if (x + 1 < grid.width) g.add_edge(here, g.at(BoardGraph::grid_node_id(x + 1, y)));
      if (y + 1 < grid.height) g.add_edge(here, g.at(BoardGraph::grid_node_id(x, y + 1)));
    }

  return BoardGraph(std::move(g), grid, lan_a, lan_b);
}

std::vector<std::string> neighbors(const BoardGraph& board, std::string_view node) {
  const auto& g = board.graph();
  std::vector<std::string> out;
  for (NodeIndex v : g.adjacent(g.at(node))) out.push_back(g.node(v).id);
  return out;
}

std::optional<int> shortest_path_length(const Graph& graph, std::string_view from,
                                        std::string_view to) {
  const NodeIndex s = graph.at(from);
  const NodeIndex t = graph.at(to);
  const int d = graph.distances_from(s)[t];
  if (d < 0) return std::nullopt;
  return d;
}

std::optional<int> shortest_path_length(const BoardGraph& board, std::string_view from,
                                        std::string_view to) {
  return shortest_path_length(board.graph(), from, to);
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

namespace {

std::pair<int, int> line_col(std::string_view text, std::size_t offset) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void schema_error(std::string_view text, const std::string& field,
                               const std::string& message) {
  // Point at the first occurrence of the offending key or id, if present.
  int line = 0;
  int col = 0;
  if (!field.empty()) {
    auto pos = text.find("\"" + field + "\"");
    if (pos != std::string_view::npos) std::tie(line, col) = line_col(text, pos);
  }
  throw TopologyError(TopologyError::Code::SchemaError, message, field, line, col);
}

void expect_keys(std::string_view text, const json& obj, std::string_view where,
                 std::initializer_list<std::string_view> required,
                 std::initializer_list<std::string_view> optional = {}) {
  if (!obj.is_object()) schema_error(text, std::string(where), std::string(where) + ": expected an object");
  for (auto key : required)
    if (!obj.contains(key))
      schema_error(text, std::string(key), "missing required key '" + std::string(key) + "'");
  for (const auto& [key, value] : obj.items()) {
    bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                 std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) schema_error(text, key, "unknown key '" + key + "' in " + std::string(where));
  }
}

std::string string_field(std::string_view text, const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) schema_error(text, key, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

LanConfig parse_topology(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    auto [line, col] = line_col(text, offset);
    throw TopologyError(TopologyError::Code::SyntaxError, e.what(), "", line, col);
  }

  expect_keys(text, doc, "topology", {"computers", "mesh_points", "routers", "links", "format_version"});
  if (!doc["format_version"].is_number_integer() ||
      doc["format_version"].get<int>() != kTopologyFormatVersion)
    schema_error(text, "format_version", "unsupported format_version");

  for (const char* key : {"computers", "mesh_points", "routers", "links"})
    if (!doc[key].is_array()) schema_error(text, key, std::string("'") + key + "' must be an array");

  LanConfig lan;
  for (const auto& c : doc["computers"]) {
    expect_keys(text, c, "computers", {"id"}, {"critical"});
    ComputerDecl d{string_field(text, c, "id"), false};
    if (c.contains("critical")) {
      if (!c["critical"].is_boolean()) schema_error(text, "critical", "'critical' must be a boolean");
      d.critical = c["critical"].get<bool>();
    }
    lan.computers.push_back(std::move(d));
  }
  for (const auto& m : doc["mesh_points"]) {
    expect_keys(text, m, "mesh_points", {"id"});
    lan.mesh_points.push_back({string_field(text, m, "id")});
  }
  for (const auto& r : doc["routers"]) {
    expect_keys(text, r, "routers", {"id", "anchor_slot"});
    if (!r["anchor_slot"].is_number_integer())
      schema_error(text, "anchor_slot", "'anchor_slot' must be an integer");
    lan.routers.push_back({string_field(text, r, "id"), r["anchor_slot"].get<int>()});
  }
  for (const auto& l : doc["links"]) {
    if (!l.is_array() || l.size() != 2 || !l[0].is_string() || !l[1].is_string())
      schema_error(text, "links", "each link must be a pair of node ids");
    lan.links.emplace_back(l[0].get<std::string>(), l[1].get<std::string>());
  }

  // Duplicate ids get the id itself as the offending field.
  std::set<std::string> ids;
  auto check_id = [&](const std::string& id) {
    if (!ids.insert(id).second) schema_error(text, id, "duplicate node id '" + id + "'");
  };
  for (const auto& c : lan.computers) check_id(c.id);
  for (const auto& m : lan.mesh_points) check_id(m.id);
  for (const auto& r : lan.routers) check_id(r.id);

  if (auto problem = structural_problem(lan)) schema_error(text, "links", *problem);
  return lan;
}

std::string serialize_topology(const LanConfig& lan) {
  const LanConfig c = lan.canonical();
  json doc = json::object();
  doc["format_version"] = kTopologyFormatVersion;
  doc["computers"] = json::array();
  for (const auto& comp : c.computers) {
    json j = {{"id", comp.id}};
    if (comp.critical) j["critical"] = true;
    doc["computers"].push_back(std::move(j));
  }
  doc["mesh_points"] = json::array();
  for (const auto& m : c.mesh_points) doc["mesh_points"].push_back({{"id", m.id}});
  doc["routers"] = json::array();
  for (const auto& r : c.routers)
    doc["routers"].push_back({{"anchor_slot", r.anchor_slot}, {"id", r.id}});
  doc["links"] = json::array();
  for (const auto& [a, b] : c.links) doc["links"].push_back(json::array({a, b}));
  return doc.dump(2) + "\n";
}

}  // namespace pnd
