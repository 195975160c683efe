#include "pnd/rules_json.hpp"

#include <sstream>

namespace pnd {
namespace {

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DecodeError(std::string("missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw DecodeError(std::string("bad type for '") + key + "'");
  }
}

AttackType attack_field(const Json& j, const char* key) {
  auto a = parse_attack(required<std::string>(j, key));
  if (!a) throw DecodeError(std::string("unknown attack in '") + key + "'");
  return *a;
}

PlayerId player_field(const Json& j, const char* key) {
  auto p = parse_player(required<std::string>(j, key));
  if (!p) throw DecodeError(std::string("unknown player in '") + key + "'");
  return *p;
}

std::string str(std::string_view s) { return std::string(s); }

Json node_set(const std::set<std::string>& s) { return Json(std::vector<std::string>(s.begin(), s.end())); }

}  // namespace

Json to_json(const LanConfig& lan) { return Json::parse(serialize_topology(lan)); }

LanConfig lan_from_json(const Json& j) {
  try {
    return parse_topology(j.dump());
  } catch (const TopologyError& e) {
    throw DecodeError(std::string("lan: ") + e.what());
  }
}

Json to_json(const SetupChoice& s) {
  Json assignments = Json::object();
  for (const auto& [id, card] : s.assignments)
    assignments[id] = {{"attack", str(to_string(card.attack))}, {"defense", card.defense}};
  return {{"lan", to_json(s.lan)},
          {"critical_computer", s.critical_computer},
          {"assignments", std::move(assignments)}};
}

SetupChoice setup_from_json(const Json& j) {
  SetupChoice s;
  if (!j.is_object() || !j.contains("lan")) throw DecodeError("missing 'lan'");
  s.lan = lan_from_json(j.at("lan"));
  s.critical_computer = required<std::string>(j, "critical_computer");
  const auto a = required<Json>(j, "assignments");
  if (!a.is_object()) throw DecodeError("'assignments' must be an object");
  for (const auto& [id, card] : a.items())
    s.assignments[id] = CardAssignment{attack_field(card, "attack"), required<int>(card, "defense")};
  return s;
}

Json to_json(const GameConfig& c) {
  return {{"grid_size", c.grid_size},
          {"turn_cap", c.turn_cap},
          {"first_mover", str(to_string(c.first_mover))},
          {"seed", c.seed}};
}

GameConfig config_from_json(const Json& j) {
  GameConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw DecodeError("config must be an object");
  if (j.contains("grid_size")) c.grid_size = required<int>(j, "grid_size");
  if (j.contains("turn_cap")) c.turn_cap = required<int>(j, "turn_cap");
  if (j.contains("first_mover")) c.first_mover = player_field(j, "first_mover");
  if (j.contains("seed")) c.seed = required<std::uint64_t>(j, "seed");
  return c;
}

Json to_json(const Move& m) {
  switch (m.kind) {
    case Move::Kind::Spawn: return {{"kind", "spawn"}, {"attack", str(to_string(m.attack))}};
    case Move::Kind::Step: return {{"kind", "step"}, {"ring", m.ring}, {"to", m.to}};
    case Move::Kind::Pass: return {{"kind", "pass"}};
  }
  return {};
}

Move move_from_json(const Json& j) {
  const auto kind = required<std::string>(j, "kind");
  if (kind == "spawn") return Move::spawn(attack_field(j, "attack"));
  if (kind == "step") return Move::step(required<int>(j, "ring"), required<std::string>(j, "to"));
  if (kind == "pass") return Move::pass();
  throw DecodeError("unknown move kind '" + kind + "'");
}

Json to_json(const Event& e) {
  Json j = {{"kind", str(to_string(e.kind))},
            {"owner", str(to_string(e.owner))},
            {"scope", e.scope == Visibility::Both ? "both" : "owner"}};
  if (e.ring) j["ring"] = e.ring;
  if (!e.node.empty()) j["node"] = e.node;
  if (!e.from.empty()) j["from"] = e.from;
  if (e.attack) j["attack"] = str(to_string(*e.attack));
  if (e.package) j["package"] = *e.package;
  if (e.critical) j["critical"] = *e.critical;
  if (e.kind == EventKind::GameOver)
    j["winner"] = e.winner ? Json(str(to_string(*e.winner))) : Json(nullptr);
  return j;
}

Event event_from_json(const Json& j) {
  Event e;
  auto kind = parse_event_kind(required<std::string>(j, "kind"));
  if (!kind) throw DecodeError("unknown event kind");
  e.kind = *kind;
  e.owner = player_field(j, "owner");
  const auto scope = required<std::string>(j, "scope");
  if (scope != "both" && scope != "owner") throw DecodeError("unknown event scope");
  e.scope = scope == "both" ? Visibility::Both : Visibility::OwnerOnly;
  if (j.contains("ring")) e.ring = required<int>(j, "ring");
  if (j.contains("node")) e.node = required<std::string>(j, "node");
  if (j.contains("from")) e.from = required<std::string>(j, "from");
  if (j.contains("attack")) e.attack = attack_field(j, "attack");
  if (j.contains("package")) e.package = required<int>(j, "package");
  if (j.contains("critical")) e.critical = required<bool>(j, "critical");
  if (j.contains("winner") && !j.at("winner").is_null()) e.winner = player_field(j, "winner");
  return e;
}

Json to_json(const std::vector<Event>& events) {
  Json arr = Json::array();
  for (const auto& e : events) arr.push_back(to_json(e));
  return arr;
}

Json to_json(const SetupIssue& i) {
  return {{"code", i.code}, {"subject", i.subject}, {"message", i.message}};
}

Json to_json(const PlayerView& v) {
  Json rings = Json::array();
  for (const auto& r : v.rings) {
    Json rj = {{"id", r.id},
               {"owner", str(to_string(r.owner))},
               {"position", r.position},
               {"revealed", r.revealed}};
    if (r.type) rj["type"] = str(to_string(*r.type));
    if (r.card) rj["card"] = str(to_string(*r.card));
    rings.push_back(std::move(rj));
  }
  Json seen = Json::array();
  for (const auto& [ring, type] : v.attacks_seen) seen.push_back({ring, str(to_string(type))});
  Json captured = Json::array();
  for (auto a : v.own_captured) captured.push_back(str(to_string(a)));

  Json j = {
      {"viewer", str(to_string(v.viewer))},
      {"phase", str(to_string(v.phase))},
      {"turn", str(to_string(v.turn))},
      {"turn_count", v.turn_count},
      {"turn_cap", v.turn_cap},
      {"winner", v.winner ? Json(str(to_string(*v.winner))) : Json(nullptr)},
      {"board",
       {{"grid", {{"width", v.board->grid().width}, {"height", v.board->grid().height}}},
        {"lans",
         {{"a", to_json(v.board->lan(PlayerId::A))}, {"b", to_json(v.board->lan(PlayerId::B))}}}}},
      {"own_setup", to_json(v.own_setup)},
      {"rings", std::move(rings)},
      {"opponent_defenses", v.opponent_defenses},
      {"opponent_scouted", v.opponent_scouted},
      {"own_defenses_revealed", v.own_defenses_revealed},
      {"attacks_seen", std::move(seen)},
      {"own_captured", std::move(captured)},
      {"destroyed", node_set(v.destroyed)},
      {"disabled_mesh", node_set(v.disabled_mesh)},
  };
  if (v.opponent_setup) j["opponent_setup"] = to_json(*v.opponent_setup);
  return j;
}

Json to_json(const GameState& s) {
  const auto& g = s.board->graph();
  auto ids = [&](const std::set<NodeIndex>& nodes) {
    std::set<std::string> out;
    for (auto n : nodes) out.insert(g.node(n).id);
    return node_set(out);
  };
  Json rings = Json::array();
  for (const auto& r : s.rings)
    rings.push_back({{"id", r.id},
                     {"owner", str(to_string(r.owner))},
                     {"card", str(to_string(r.card))},
                     {"type", str(to_string(r.type))},
                     {"position", g.node(r.position).id},
                     {"revealed", r.revealed}});
  Json knowledge = Json::object();
  for (auto p : kPlayers) {
    const auto& k = s.knowledge[index_of(p)];
    Json defenses = Json::object(), scouted = Json::object(), seen = Json::array();
    for (const auto& [n, pkg] : k.defenses) defenses[g.node(n).id] = pkg;
    for (const auto& [n, c] : k.scouted) scouted[g.node(n).id] = c;
    for (const auto& [ring, type] : k.attacks_seen) seen.push_back({ring, str(to_string(type))});
    knowledge[str(to_string(p))] = {
        {"defenses", defenses}, {"scouted", scouted}, {"attacks_seen", seen}};
  }
  Json captured = Json::array();
  for (const auto& [p, a] : s.captured) captured.push_back({str(to_string(p)), str(to_string(a))});
  return {{"phase", str(to_string(s.phase))},
          {"config", to_json(s.config)},
          {"setups", {{"a", to_json(s.setups[0])}, {"b", to_json(s.setups[1])}}},
          {"rings", std::move(rings)},
          {"destroyed", ids(s.destroyed)},
          {"disabled_mesh", ids(s.disabled_mesh)},
          {"knowledge", std::move(knowledge)},
          {"captured", std::move(captured)},
          {"turn", str(to_string(s.turn))},
          {"turn_count", s.turn_count},
          {"winner", s.winner ? Json(str(to_string(*s.winner))) : Json(nullptr)},
          {"next_ring_id", s.next_ring_id}};
}

// ---------------------------------------------------------------------------
// Event log
// ---------------------------------------------------------------------------

std::string log_line(const LogRecord& r) {
  Json j = {{"type", "move"},
            {"turn_count", r.turn_count},
            {"player", str(to_string(r.player))},
            {"move", r.move ? to_json(*r.move) : Json{{"kind", "resign"}}},
            {"events", to_json(r.events)}};
  return j.dump() + "\n";
}

std::string write_event_log(const GameLog& log) {
  std::string out;
  out += Json{{"type", "config"}, {"config", to_json(log.config)}}.dump() + "\n";
  for (auto p : kPlayers)
    out += Json{{"type", "setup"},
                {"player", str(to_string(p))},
                {"setup", to_json(log.setups[index_of(p)])}}
               .dump() +
           "\n";
  for (const auto& r : log.records) out += log_line(r);
  return out;
}

GameLog parse_event_log(std::string_view text) {
  GameLog log;
  bool have_config = false;
  std::array<bool, 2> have_setup{};
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw DecodeError("line " + std::to_string(line_no) + ": " + e.what());
    }
    const auto type = required<std::string>(j, "type");
    if (type == "config") {
      log.config = config_from_json(required<Json>(j, "config"));
      have_config = true;
    } else if (type == "setup") {
      const auto p = player_field(j, "player");
      log.setups[index_of(p)] = setup_from_json(required<Json>(j, "setup"));
      have_setup[index_of(p)] = true;
    } else if (type == "move") {
      LogRecord r;
      r.turn_count = required<int>(j, "turn_count");
      r.player = player_field(j, "player");
      const auto m = required<Json>(j, "move");
      if (required<std::string>(m, "kind") != "resign") r.move = move_from_json(m);
      for (const auto& e : required<Json>(j, "events")) r.events.push_back(event_from_json(e));
      log.records.push_back(std::move(r));
    } else {
      throw DecodeError("line " + std::to_string(line_no) + ": unknown record type '" + type + "'");
    }
  }
  if (!have_config || !have_setup[0] || !have_setup[1])
    throw DecodeError("log is missing its config or setup header");
  return log;
}

GameState replay(const GameLog& log) {
  GameState s = new_game(log.setups[0], log.setups[1], log.config);
  for (const auto& r : log.records) {
    if (r.turn_count != s.turn_count)
      throw DecodeError("record out of sequence at turn " + std::to_string(r.turn_count));
    Transition t = r.move ? apply_move(s, r.player, *r.move) : resign(s, r.player);
    if (t.events != r.events)
      throw DecodeError("replayed events differ at turn " + std::to_string(r.turn_count));
    s = std::move(t.state);
  }
  return s;
}

}  // namespace pnd
