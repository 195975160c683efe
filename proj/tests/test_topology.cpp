#include <doctest.h>

#include <fstream>
#include <sstream>

#include "pnd/topology.hpp"

using namespace pnd;

namespace {

std::string read(const std::string& rel) {
  std::ifstream in(std::string(PND_SOURCE_DIR) + "/" + rel, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LanConfig without_link(LanConfig lan, const std::string& a, const std::string& b) {
  std::erase_if(lan.links, [&](const LinkDecl& l) {
    return (l.first == a && l.second == b) || (l.first == b && l.second == a);
  });
  return lan;
}

std::vector<ViolationCode> codes(const LanConfig& lan) {
  std::vector<ViolationCode> out;
  for (const auto& v : validate_lan(lan).violations) out.push_back(v.code);
  return out;
}

int min_router_distance(const LanConfig& lan, const std::string& target) {
  const Graph g = lan_graph(lan);
  int best = -1;
  for (const auto& r : lan.routers) {
    auto d = shortest_path_length(g, r.id, target);
    REQUIRE(d.has_value());
    if (best < 0 || *d < best) best = *d;
  }
  return best;
}

}  // namespace

TEST_CASE("shipped topologies validate") {
  for (const auto* lan : {&fig5_default(), &fig8_dual_community()}) {
    CHECK(validate_lan(*lan).ok());
    CHECK(lan->critical() == "c8");
    CHECK(lan->computers.size() == 8);
    CHECK(lan->routers.size() == 4);
    CHECK(lan->links.size() <= 16);
  }
  CHECK(shipped_topology("fig5") == fig5_default());
  CHECK(shipped_topology("fig8_dual_community") == fig8_dual_community());
  CHECK_FALSE(shipped_topology("fig7").has_value());
}

TEST_CASE("dual-community LAN keeps routers further from the critical computer") {
  CHECK(min_router_distance(fig5_default(), "c8") == 2);
  CHECK(min_router_distance(fig8_dual_community(), "c8") == 5);
}

TEST_CASE("canonical serialization round-trips byte for byte") {
  for (const char* file : {"data/fig5_default.json", "data/fig8_dual_community.json"}) {
    const auto text = read(file);
    const auto lan = parse_topology(text);
    CHECK(serialize_topology(lan) == text);
    CHECK(parse_topology(serialize_topology(lan)) == lan);
  }
  LanConfig shuffled = fig5_default();
  std::reverse(shuffled.links.begin(), shuffled.links.end());
  std::reverse(shuffled.computers.begin(), shuffled.computers.end());
  for (auto& [a, b] : shuffled.links) std::swap(a, b);
  CHECK(serialize_topology(shuffled) == serialize_topology(fig5_default()));
}

TEST_CASE("each construction rule reports its own code") {
  const LanConfig base = fig5_default();

  SUBCASE("ComputerCount") {
    LanConfig lan = base;
    lan.computers.push_back({"c9", false});
    lan.links.push_back({"c9", "c1"});
    lan.links.push_back({"c9", "c2"});
    CHECK(validate_lan(lan).has(ViolationCode::ComputerCount));
  }
  SUBCASE("LinkBudget") {
    LanConfig lan = base;
    lan.links.push_back({"c1", "c5"});
    CHECK(codes(lan) == std::vector{ViolationCode::LinkBudget});
  }
  SUBCASE("ComputerDegree") {
    const auto lan = without_link(base, "m1", "c1");
    const auto report = validate_lan(lan);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].code == ViolationCode::ComputerDegree);
    CHECK(report.violations[0].subject == "c1");
  }
  SUBCASE("RouterMeshCoverage") {
    LanConfig lan = without_link(base, "r1", "m1");
    lan.links.push_back({"r1", "m2"});
    CHECK(codes(lan) == std::vector{ViolationCode::RouterMeshCoverage});
  }
  SUBCASE("CriticalCount") {
    CHECK(codes(base.without_critical()) == std::vector{ViolationCode::CriticalCount});
    LanConfig two = base;
    two.computers[0].critical = true;
    CHECK(codes(two) == std::vector{ViolationCode::CriticalCount});
  }
  SUBCASE("RouterCount") {
    LanConfig lan = base;
    lan.routers.push_back({"r5", 0});
    CHECK(validate_lan(lan).has(ViolationCode::RouterCount));
  }
  SUBCASE("MeshPointRange") {
    LanConfig lan = base;
    for (int i = 5; i <= 9; ++i) lan.mesh_points.push_back({"m" + std::to_string(i)});
    CHECK(validate_lan(lan).has(ViolationCode::MeshPointRange));
  }
  SUBCASE("Disconnected flags every stranded node") {
    LanConfig lan = base;
    lan = without_link(lan, "c3", "c4");
    lan = without_link(lan, "c5", "c6");
    lan = without_link(lan, "m2", "c4");
    lan = without_link(lan, "m3", "c5");
    lan.mesh_points.push_back({"m5"});
    lan.links.push_back({"c4", "c5"});
    lan.links.push_back({"c4", "m5"});
    lan.links.push_back({"c5", "m5"});
    lan.links.push_back({"c3", "c6"});
    const auto report = validate_lan(lan);
    REQUIRE(report.violations.size() == 3);
    for (const auto& v : report.violations) CHECK(v.code == ViolationCode::Disconnected);
    CHECK(report.violations[0].subject == "c4");
    CHECK(report.violations[1].subject == "c5");
    CHECK(report.violations[2].subject == "m5");
  }
}

TEST_CASE("structural problems") {
  LanConfig lan = fig5_default();
  lan.links.push_back({"c1", "r1"});
  CHECK(structural_problem(lan).has_value());
  lan = fig5_default();
  lan.links.push_back({"c1", "zz"});
  CHECK(structural_problem(lan).has_value());
  lan = fig5_default();
  lan.links.push_back({"c8", "c1"});
  CHECK(structural_problem(lan)->find("duplicate") != std::string::npos);
  CHECK_FALSE(structural_problem(fig5_default()).has_value());
}

TEST_CASE("parse errors carry position and field") {
  SUBCASE("syntax") {
    try {
      parse_topology("{\n  \"computers\": [,]\n}");
      FAIL("expected a syntax error");
    } catch (const TopologyError& e) {
      CHECK(e.code() == TopologyError::Code::SyntaxError);
      CHECK(e.line() == 2);
      CHECK(e.column() > 1);
    }
  }
  SUBCASE("missing key") {
    auto text = serialize_topology(fig5_default());
    text.replace(text.find("\"format_version\""), 16, "\"version_format\"");
    try {
      parse_topology(text);
      FAIL("expected a schema error");
    } catch (const TopologyError& e) {
      CHECK(e.code() == TopologyError::Code::SchemaError);
      CHECK(e.field() == "format_version");
    }
  }
  SUBCASE("unknown key") {
    auto text = serialize_topology(fig5_default());
    text.replace(text.find("\"critical\""), 10, "\"secret\"");
    try {
      parse_topology(text);
      FAIL("expected a schema error");
    } catch (const TopologyError& e) {
      CHECK(e.code() == TopologyError::Code::SchemaError);
      CHECK(e.field() == "secret");
      CHECK(e.line() > 1);
    }
  }
  SUBCASE("duplicate id") {
    LanConfig lan = fig5_default();
    lan.mesh_points.push_back({"c1"});
    try {
      parse_topology(serialize_topology(lan));
      FAIL("expected a schema error");
    } catch (const TopologyError& e) {
      CHECK(e.code() == TopologyError::Code::SchemaError);
      CHECK(e.field() == "c1");
    }
  }
}

TEST_CASE("board fuses two LANs with the Internet grid") {
  const auto board = build_board(fig5_default(), fig8_dual_community());
  const auto& g = board.graph();
  CHECK(g.size() == 2 * (8 + 4 + 4) + 81);
  CHECK(g.connected());

  const InternetGrid grid;
  CHECK(grid.anchor_column(0) == 1);
  CHECK(grid.anchor_column(1) == 3);
  CHECK(grid.anchor_column(2) == 5);
  CHECK(grid.anchor_column(3) == 7);

  CHECK(neighbors(board, "net:4,4") ==
        std::vector<std::string>{"net:3,4", "net:4,3", "net:4,5", "net:5,4"});
  CHECK(neighbors(board, "net:0,0").size() == 2);
  // Router r1 (slot 0) anchors on A's bottom row and B's top row.
  CHECK(g.has_edge(board.node_of(PlayerId::A, "r1"), board.intersection(1, 8)));
  CHECK(g.has_edge(board.node_of(PlayerId::B, "r1"), board.intersection(1, 0)));
  CHECK(board.anchor(PlayerId::A, 3) == board.intersection(7, 8));
  CHECK(shortest_path_length(board, "a:r1", "b:r1") == 10);

  for (auto p : kPlayers) CHECK_FALSE(board.lan(p).critical().has_value());
  CHECK_THROWS_AS(neighbors(board, "a:c99"), TopologyError);
}

TEST_CASE("board construction errors") {
  LanConfig bad = fig5_default();
  bad.routers[1].anchor_slot = 0;
  try {
    build_board(bad, fig5_default());
    FAIL("expected AnchorMismatch");
  } catch (const TopologyError& e) {
    CHECK(e.code() == TopologyError::Code::AnchorMismatch);
  }
  bad = fig5_default();
  bad.routers[0].anchor_slot = 4;
  CHECK_THROWS_AS(build_board(bad, fig5_default()), TopologyError);

  try {
    build_board(fig5_default(), fig5_default().without_critical());
    FAIL("expected InvalidLan");
  } catch (const TopologyError& e) {
    CHECK(e.code() == TopologyError::Code::InvalidLan);
  }
  CHECK_NOTHROW(build_board(fig5_default(), fig5_default(), InternetGrid::square(5)));
}
