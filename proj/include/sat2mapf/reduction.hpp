#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sat2mapf/error.hpp"
#include "sat2mapf/formula.hpp"
#include "sat2mapf/gridmap.hpp"

namespace sat2mapf {

// The compiled instance is a 3-row grid. Row 0 is the top row.
//
//   room | variable gadgets ... | shaft | clause gadgets ...
//
// Clause agents start in a middle-row room on the far left and traverse every
// variable gadget left to right. Each gadget has a one-cell entrance and exit
// on the middle row and two equal-length runs (top and bottom) holding the
// positive and negative literal agents of one variable. After the last gadget
// a shaft drops the traffic to the bottom row, which runs under every clause
// gadget. A clause gadget's middle-row door cells are the targets of the
// clause's literal agents; the clause agent's own target sits on the top row
// above the last door, and a fully open column on the gadget's right edge
// keeps that target reachable (at +2 cost) even when every door is parked on.

enum class Variant { monotone, general };

enum class AgentKind { literal_pos, literal_neg, clause, blocker };

inline const char* kind_name(AgentKind k) {
  switch (k) {
    case AgentKind::literal_pos: return "litpos";
    case AgentKind::literal_neg: return "litneg";
    case AgentKind::clause: return "clause";
    case AgentKind::blocker: return "blocker";
  }
  return "?";
}

struct Agent {
  int id = -1;
  AgentKind kind = AgentKind::clause;
  int var = -1;     // 1-based variable, literal and blocker agents
  int occ = -1;     // 1-based occurrence of the signed literal, literal agents
  int clause = -1;  // 1-based clause, literal and clause agents
  int slot = -1;    // 0-based slot within the clause, literal agents
  Cell start;
  Cell target;

  bool is_literal() const { return kind == AgentKind::literal_pos || kind == AgentKind::literal_neg; }
  bool operator==(const Agent&) const = default;
};

struct Instance {
  GridMap map;
  std::vector<Agent> agents;

  int num_agents() const { return static_cast<int>(agents.size()); }
};

// Variable gadget geometry, derived from its anchor column and interior width.
struct VarGadget {
  int var = 0;    // 1-based variable id
  int col = 0;    // entrance column
  int width = 0;  // interior run width w

  Cell entrance() const { return {1, col}; }
  Cell stop_top() const { return {0, col}; }
  Cell stop_bottom() const { return {2, col}; }
  Cell exit() const { return {1, col + width + 1}; }
  int separator_col() const { return col + width + 2; }
  int run_first_col() const { return col + 1; }
  int run_last_col() const { return col + width + 1; }
  // First interior run cell; traversal through one run visits it right after
  // the corner stop cell.
  Cell run_probe(bool top) const { return {top ? 0 : 2, col + 1}; }

  bool operator==(const VarGadget&) const = default;
};

struct ClauseGadget {
  int col = 0;   // leftmost column (door slot 0)
  int size = 0;  // door count k = clause width

  Cell door(int slot) const { return {1, col + slot}; }
  Cell target() const { return {0, col + size - 1}; }
  int empty_col() const { return col + size; }
  int separator_col() const { return col + size + 1; }

  bool operator==(const ClauseGadget&) const = default;
};

struct Layout {
  Variant variant = Variant::monotone;
  int height = 3;
  int width = 0;
  int room_width = 0;  // room occupies (1, 0..room_width-1)
  int shaft_col = 0;   // shaft opens (1, shaft_col) and (2, shaft_col)
  std::vector<VarGadget> vars;
  std::vector<ClauseGadget> clauses;

  int post_shaft_separator_col() const { return shaft_col + 1; }

  const VarGadget* gadget_for_var(int var) const {
    for (const VarGadget& g : vars)
      if (g.var == var) return &g;
    return nullptr;
  }

  bool operator==(const Layout&) const = default;
};

namespace detail {

struct OccurrenceCount {
  int positive = 0;
  int negative = 0;
};

// Occurring variables in first-occurrence order with per-polarity counts.
inline std::vector<std::pair<int, OccurrenceCount>> occurring_vars(const Formula& f) {
  std::vector<std::pair<int, OccurrenceCount>> vars;
  std::vector<int> pos_of(static_cast<size_t>(f.num_vars) + 1, -1);
  for (const Clause& c : f.clauses) {
    for (const Literal& lit : c.literals) {
      if (pos_of[static_cast<size_t>(lit.var)] < 0) {
        pos_of[static_cast<size_t>(lit.var)] = static_cast<int>(vars.size());
        vars.emplace_back(lit.var, OccurrenceCount{});
      }
      auto& count = vars[static_cast<size_t>(pos_of[static_cast<size_t>(lit.var)])].second;
      (lit.positive ? count.positive : count.negative)++;
    }
  }
  return vars;
}

inline std::pair<Instance, Layout> build_instance(const Formula& f, Variant variant) {
  check_formula(f);
  const int m = f.num_clauses();

  Layout layout;
  layout.variant = variant;
  layout.room_width = m;

  // Variable gadgets, anchored after the room.
  int cursor = m;
  const auto vars = occurring_vars(f);
  for (const auto& [var, count] : vars) {
    const int w = std::max(std::max(count.positive, count.negative), 1) + 1;
    layout.vars.push_back(VarGadget{var, cursor, w});
    cursor += w + 3;
  }
  layout.shaft_col = cursor;

  // Clause gadgets. A separator column right of the shaft (open only on the
  // bottom row) forces all clause-gadget traffic down to the bottom row, so
  // every door of a gadget is crossed at identical cost.
  cursor = layout.shaft_col + 2;
  for (const Clause& c : f.clauses) {
    layout.clauses.push_back(ClauseGadget{cursor, c.size()});
    cursor += c.size() + 2;
  }
  layout.width = cursor;

  // Carve the map.
  GridMap map = GridMap::solid(3, layout.width);
  for (int c = 0; c < m; ++c) map.set_passable({1, c}, true);
  for (const VarGadget& g : layout.vars) {
    map.set_passable(g.entrance(), true);
    map.set_passable(g.stop_top(), true);
    map.set_passable(g.stop_bottom(), true);
    for (int c = g.run_first_col(); c <= g.run_last_col(); ++c) {
      map.set_passable({0, c}, true);
      map.set_passable({2, c}, true);
    }
    map.set_passable(g.exit(), true);
    map.set_passable({1, g.separator_col()}, true);
  }
  map.set_passable({1, layout.shaft_col}, true);
  map.set_passable({2, layout.shaft_col}, true);
  map.set_passable({2, layout.post_shaft_separator_col()}, true);
  for (const ClauseGadget& g : layout.clauses) {
    for (int c = g.col; c <= g.empty_col(); ++c) {
      map.set_passable({2, c}, true);
      map.set_passable({0, c}, true);
    }
    for (int s = 0; s < g.size; ++s) map.set_passable(g.door(s), true);
    map.set_passable({1, g.empty_col()}, true);
    map.set_passable({2, g.separator_col()}, true);
  }

  // Agents: literal agents clause-major in slot order, then clause agents,
  // then (general variant) one blocker per occurring variable.
  std::vector<Agent> agents;
  std::map<std::pair<int, bool>, int> occurrence_counter;
  std::map<int, int> gadget_index;
  for (size_t i = 0; i < layout.vars.size(); ++i) gadget_index[layout.vars[i].var] = static_cast<int>(i);

  for (int j = 0; j < m; ++j) {
    const Clause& c = f.clauses[static_cast<size_t>(j)];
    for (int s = 0; s < c.size(); ++s) {
      const Literal& lit = c.literals[static_cast<size_t>(s)];
      const int occ = ++occurrence_counter[{lit.var, lit.positive}];
      const VarGadget& g = layout.vars[static_cast<size_t>(gadget_index.at(lit.var))];
      Agent a;
      a.id = static_cast<int>(agents.size());
      a.kind = lit.positive ? AgentKind::literal_pos : AgentKind::literal_neg;
      a.var = lit.var;
      a.occ = occ;
      a.clause = j + 1;
      a.slot = s;
      a.start = Cell{lit.positive ? 0 : 2, g.col + occ};
      a.target = layout.clauses[static_cast<size_t>(j)].door(s);
      agents.push_back(a);
    }
  }
  for (int j = 0; j < m; ++j) {
    Agent a;
    a.id = static_cast<int>(agents.size());
    a.kind = AgentKind::clause;
    a.clause = j + 1;
    a.start = Cell{1, m - (j + 1)};  // c_1 rightmost, departs first
    a.target = layout.clauses[static_cast<size_t>(j)].target();
    agents.push_back(a);
  }
  if (variant == Variant::general) {
    for (const VarGadget& g : layout.vars) {
      Agent a;
      a.id = static_cast<int>(agents.size());
      a.kind = AgentKind::blocker;
      a.var = g.var;
      a.start = g.entrance();
      a.target = g.exit();
      agents.push_back(a);
    }
  }

  return {Instance{std::move(map), std::move(agents)}, std::move(layout)};
}

}  // namespace detail

inline std::pair<Instance, Layout> build_monotone(const Formula& f) {
  return detail::build_instance(f, Variant::monotone);
}

inline std::pair<Instance, Layout> build_general(const Formula& f) {
  return detail::build_instance(f, Variant::general);
}

// Optimistic lower bound: sum of individual shortest-path distances.
inline long long d_star(const Instance& inst) {
  long long total = 0;
  for (const Agent& a : inst.agents) {
    const DistanceField field = bfs_distances(inst.map, a.start);
    const std::optional<int> d = field.at(a.target);
    if (!d) fail(Errc::unreachable_target, "agent " + std::to_string(a.id) + " cannot reach its target");
    total += *d;
  }
  return total;
}

struct SizeStats {
  int agents = 0;
  int open_cells = 0;
  int width = 0;
  int height = 0;

  bool operator==(const SizeStats&) const = default;
};

inline SizeStats size_stats(const Formula& f, Variant variant) {
  const auto [inst, layout] = detail::build_instance(f, variant);
  return SizeStats{inst.num_agents(), inst.map.open_cells(), layout.width, layout.height};
}

// ---------------------------------------------------------------------------
// Instance / layout text formats.

// Agents file: `agents <n>` then per agent
// `<id> <kind> <var> <occ> <clause> <slot> <sr> <sc> <gr> <gc>`, -1 where a
// field does not apply.
inline std::string write_agents(const Instance& inst) {
  std::ostringstream out;
  out << "agents " << inst.agents.size() << '\n';
  for (const Agent& a : inst.agents) {
    out << a.id << ' ' << kind_name(a.kind) << ' ' << a.var << ' ' << a.occ << ' ' << a.clause << ' '
        << a.slot << ' ' << a.start.row << ' ' << a.start.col << ' ' << a.target.row << ' '
        << a.target.col << '\n';
  }
  return out.str();
}

inline std::vector<Agent> read_agents(std::istream& in) {
  std::string tag;
  int n = -1;
  in >> tag >> n;
  if (tag != "agents" || n < 0) fail(Errc::bad_format, "agents file must start with `agents <n>`");
  std::vector<Agent> agents;
  for (int i = 0; i < n; ++i) {
    Agent a;
    std::string kind;
    in >> a.id >> kind >> a.var >> a.occ >> a.clause >> a.slot >> a.start.row >> a.start.col >>
        a.target.row >> a.target.col;
    if (in.fail()) fail(Errc::bad_format, "agents file truncated at agent " + std::to_string(i));
    if (kind == "litpos") a.kind = AgentKind::literal_pos;
    else if (kind == "litneg") a.kind = AgentKind::literal_neg;
    else if (kind == "clause") a.kind = AgentKind::clause;
    else if (kind == "blocker") a.kind = AgentKind::blocker;
    else fail(Errc::bad_format, "unknown agent kind " + kind);
    if (a.id != i) fail(Errc::bad_format, "agent ids must be 0..n-1 in order");
    agents.push_back(a);
  }
  return agents;
}

inline std::vector<Agent> read_agents(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_agents(in);
}

// Layout file: one record per line, space-separated key=value pairs.
inline std::string write_layout(const Layout& layout) {
  std::ostringstream out;
  out << "meta variant=" << (layout.variant == Variant::monotone ? "monotone" : "general")
      << " height=" << layout.height << " width=" << layout.width << " room_width=" << layout.room_width
      << " shaft_col=" << layout.shaft_col << '\n';
  for (size_t i = 0; i < layout.vars.size(); ++i) {
    const VarGadget& g = layout.vars[i];
    out << "var idx=" << i + 1 << " var=" << g.var << " col=" << g.col << " w=" << g.width
        << " entrance=" << to_string(g.entrance()) << " exit=" << to_string(g.exit())
        << " stop_top=" << to_string(g.stop_top()) << " stop_bottom=" << to_string(g.stop_bottom())
        << " run_cols=" << g.run_first_col() << ".." << g.run_last_col()
        << " separator_col=" << g.separator_col() << '\n';
  }
  for (size_t j = 0; j < layout.clauses.size(); ++j) {
    const ClauseGadget& g = layout.clauses[j];
    out << "clause idx=" << j + 1 << " col=" << g.col << " k=" << g.size
        << " target=" << to_string(g.target()) << " empty_col=" << g.empty_col()
        << " separator_col=" << g.separator_col() << '\n';
  }
  return out.str();
}

namespace detail {

inline std::map<std::string, std::string> parse_kv_line(const std::string& line, std::string& record) {
  std::istringstream in(line);
  in >> record;
  std::map<std::string, std::string> kv;
  std::string tok;
  while (in >> tok) {
    const size_t eq = tok.find('=');
    if (eq == std::string::npos) fail(Errc::bad_format, "layout token without `=`: " + tok);
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

}  // namespace detail

inline Layout read_layout(std::istream& in) {
  Layout layout;
  std::string line;
  bool have_meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::string record;
    auto kv = detail::parse_kv_line(line, record);
    auto want = [&](const char* key) {
      auto it = kv.find(key);
      if (it == kv.end()) fail(Errc::bad_format, "layout record missing key " + std::string(key));
      return it->second;
    };
    if (record == "meta") {
      layout.variant = want("variant") == "general" ? Variant::general : Variant::monotone;
      layout.height = std::stoi(want("height"));
      layout.width = std::stoi(want("width"));
      layout.room_width = std::stoi(want("room_width"));
      layout.shaft_col = std::stoi(want("shaft_col"));
      have_meta = true;
    } else if (record == "var") {
      layout.vars.push_back(VarGadget{std::stoi(want("var")), std::stoi(want("col")), std::stoi(want("w"))});
    } else if (record == "clause") {
      layout.clauses.push_back(ClauseGadget{std::stoi(want("col")), std::stoi(want("k"))});
    } else {
      fail(Errc::bad_format, "unknown layout record " + record);
    }
  }
  if (!have_meta) fail(Errc::bad_format, "layout file missing meta record");
  return layout;
}

inline Layout read_layout(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_layout(in);
}

// Rebuilds the formula a generated instance encodes. Clause and slot structure
// is carried by the literal agents.
inline Formula formula_from_instance(const Instance& inst) {
  Formula f;
  int num_clauses = 0;
  for (const Agent& a : inst.agents) {
    if (a.clause > num_clauses) num_clauses = a.clause;
    if (a.var > f.num_vars) f.num_vars = a.var;
  }
  if (num_clauses == 0) fail(Errc::bad_format, "instance has no clause structure");
  f.clauses.resize(static_cast<size_t>(num_clauses));
  for (const Agent& a : inst.agents) {
    if (!a.is_literal()) continue;
    Clause& c = f.clauses[static_cast<size_t>(a.clause - 1)];
    if (a.slot >= c.size()) c.literals.resize(static_cast<size_t>(a.slot) + 1);
    c.literals[static_cast<size_t>(a.slot)] = Literal{a.var, a.kind == AgentKind::literal_pos};
  }
  detail::check_formula(f);
  return f;
}

// True when the layout plausibly describes the instance; cheap guard against
// mixing artifacts from different reductions.
inline bool layout_matches(const Instance& inst, const Layout& layout) {
  if (inst.map.height() != layout.height || inst.map.width() != layout.width) return false;
  const int blockers = static_cast<int>(std::count_if(
      inst.agents.begin(), inst.agents.end(), [](const Agent& a) { return a.kind == AgentKind::blocker; }));
  if (layout.variant == Variant::general && blockers != static_cast<int>(layout.vars.size())) return false;
  if (layout.variant == Variant::monotone && blockers != 0) return false;
  for (const Agent& a : inst.agents) {
    if (!inst.map.passable(a.start) || !inst.map.passable(a.target)) return false;
    if (a.kind == AgentKind::blocker) {
      const VarGadget* g = layout.gadget_for_var(a.var);
      if (!g || a.start != g->entrance() || a.target != g->exit()) return false;
    }
    if (a.kind == AgentKind::clause) {
      if (a.clause < 1 || a.clause > static_cast<int>(layout.clauses.size())) return false;
      if (a.target != layout.clauses[static_cast<size_t>(a.clause - 1)].target()) return false;
    }
    if (a.is_literal()) {
      const VarGadget* g = layout.gadget_for_var(a.var);
      if (!g) return false;
      if (a.clause < 1 || a.clause > static_cast<int>(layout.clauses.size())) return false;
      if (a.target != layout.clauses[static_cast<size_t>(a.clause - 1)].door(a.slot)) return false;
    }
  }
  return true;
}

}  // namespace sat2mapf
