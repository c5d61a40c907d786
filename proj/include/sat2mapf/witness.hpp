#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sat2mapf/error.hpp"
#include "sat2mapf/formula.hpp"
#include "sat2mapf/plan.hpp"
#include "sat2mapf/reduction.hpp"
#include "sat2mapf/validator.hpp"

namespace sat2mapf {

// One single-mover episode: the agent walks `path` front to back while every
// other agent stands still.
struct Episode {
  int agent = -1;
  std::vector<Cell> path;
};

// Ordered single-mover episodes. Converting to a Plan checks the occupancy
// invariant: each episode's path must avoid all cells currently held by the
// other agents.
struct StagedScript {
  std::vector<Episode> episodes;
};

// Expands a script into a sequential plan, one cell change per timestep.
inline Plan sequential_plan(const Instance& inst, const StagedScript& script) {
  const int n = inst.num_agents();
  std::vector<Cell> position(static_cast<size_t>(n));
  std::map<Cell, int> occupant;
  for (int a = 0; a < n; ++a) {
    position[static_cast<size_t>(a)] = inst.agents[static_cast<size_t>(a)].start;
    occupant[inst.agents[static_cast<size_t>(a)].start] = a;
  }

  Plan plan;
  plan.trajectories.assign(static_cast<size_t>(n), {});
  for (int a = 0; a < n; ++a) plan.trajectories[static_cast<size_t>(a)].push_back(position[static_cast<size_t>(a)]);

  for (const Episode& ep : script.episodes) {
    if (ep.agent < 0 || ep.agent >= n) fail(Errc::agent_set_mismatch, "episode agent out of range");
    if (ep.path.empty() || ep.path.front() != position[static_cast<size_t>(ep.agent)])
      fail(Errc::bad_format, "episode for agent " + std::to_string(ep.agent) + " does not start at its position");
    for (size_t i = 1; i < ep.path.size(); ++i) {
      const Cell from = ep.path[i - 1], to = ep.path[i];
      if (std::abs(from.row - to.row) + std::abs(from.col - to.col) != 1)
        fail(Errc::bad_format, "episode step is not a grid move");
      if (!inst.map.passable(to)) fail(Errc::bad_format, "episode enters obstacle " + to_string(to));
      if (auto it = occupant.find(to); it != occupant.end())
        fail(Errc::bad_format, "episode for agent " + std::to_string(ep.agent) + " enters occupied cell " +
                                   to_string(to) + " (agent " + std::to_string(it->second) + ")");
      occupant.erase(from);
      occupant[to] = ep.agent;
      position[static_cast<size_t>(ep.agent)] = to;
      for (int a = 0; a < n; ++a) plan.trajectories[static_cast<size_t>(a)].push_back(position[static_cast<size_t>(a)]);
      ++plan.horizon;
    }
  }
  return plan;
}

namespace detail {

inline void extend(std::vector<Cell>& path, Cell c) {
  const Cell b = path.back();
  if (b == c) return;
  if (std::abs(b.row - c.row) + std::abs(b.col - c.col) != 1)
    fail(Errc::bad_format, "route step " + to_string(b) + " -> " + to_string(c) + " is not a grid move");
  path.push_back(c);
}

inline void extend_run(std::vector<Cell>& path, const VarGadget& g, bool top, int from_col) {
  const int row = top ? 0 : 2;
  for (int c = from_col; c <= g.run_last_col(); ++c) extend(path, Cell{row, c});
  extend(path, g.exit());
}

// entrance -> corner stop -> run -> exit
inline void traverse_gadget(std::vector<Cell>& path, const VarGadget& g, bool top) {
  extend(path, g.entrance());
  extend(path, top ? g.stop_top() : g.stop_bottom());
  extend_run(path, g, top, g.run_first_col());
}

// From just left of gadget `first` on the middle row: traverse the remaining
// gadgets along their P-runs, then drop down the shaft to the bottom row.
inline void route_to_bottom(std::vector<Cell>& path, const Layout& layout, size_t first,
                            const std::vector<bool>& traverse_top) {
  for (size_t g = first; g < layout.vars.size(); ++g) {
    extend(path, Cell{1, layout.vars[g].col - 1});  // separator (or last room cell for g = 0)
    traverse_gadget(path, layout.vars[g], traverse_top[g]);
  }
  extend(path, Cell{1, layout.shaft_col - 1});
  extend(path, Cell{1, layout.shaft_col});
  extend(path, Cell{2, layout.shaft_col});
  extend(path, Cell{2, layout.post_shaft_separator_col()});
}

inline void bottom_row_to(std::vector<Cell>& path, int col) {
  while (path.back().col < col) extend(path, Cell{2, path.back().col + 1});
}

struct StagedContext {
  Formula formula;
  std::vector<bool> p_is_bottom;   // per gadget: P-run is the bottom run
  std::vector<bool> traverse_top;  // per gadget: traversers use the top run
  std::map<int, size_t> gadget_of_var;
};

inline StagedContext staged_context(const Instance& inst, const Layout& layout, const Assignment& a) {
  StagedContext ctx;
  ctx.formula = formula_from_instance(inst);
  ctx.p_is_bottom.resize(layout.vars.size());
  ctx.traverse_top.resize(layout.vars.size());
  for (size_t g = 0; g < layout.vars.size(); ++g) {
    ctx.gadget_of_var[layout.vars[g].var] = g;
    // False literals sit on P: negatives (bottom) when the variable is true.
    ctx.p_is_bottom[g] = a.value(layout.vars[g].var);
    ctx.traverse_top[g] = !ctx.p_is_bottom[g];
  }
  return ctx;
}

inline bool literal_true(const Agent& a, const Assignment& assign) {
  return assign.value(a.var) == (a.kind == AgentKind::literal_pos);
}

// Literal agents of one side, ordered rightmost gadget first, rightmost start
// column first. Trains never enter an occupied start this way.
inline std::vector<const Agent*> side_order(const Instance& inst, const StagedContext& ctx,
                                            const Assignment& assign, bool want_true) {
  std::vector<const Agent*> side;
  for (const Agent& a : inst.agents)
    if (a.is_literal() && literal_true(a, assign) == want_true) side.push_back(&a);
  std::sort(side.begin(), side.end(), [&](const Agent* x, const Agent* y) {
    const size_t gx = ctx.gadget_of_var.at(x->var), gy = ctx.gadget_of_var.at(y->var);
    if (gx != gy) return gx > gy;
    return x->start.col > y->start.col;
  });
  return side;
}

inline Episode literal_episode(const Agent& a, const Layout& layout, const StagedContext& ctx) {
  const size_t g = ctx.gadget_of_var.at(a.var);
  Episode ep;
  ep.agent = a.id;
  ep.path.push_back(a.start);
  extend_run(ep.path, layout.vars[g], a.kind == AgentKind::literal_pos, a.start.col + 1);
  route_to_bottom(ep.path, layout, g + 1, ctx.traverse_top);
  bottom_row_to(ep.path, a.target.col);
  extend(ep.path, a.target);
  return ep;
}

// Clause agent crossing: through the leftmost door whose literal is true, or
// (when permitted) around via the empty column at +2.
inline Episode clause_episode(const Agent& a, const Layout& layout, const StagedContext& ctx,
                              const Assignment& assign, bool allow_detour) {
  const ClauseGadget& gadget = layout.clauses[static_cast<size_t>(a.clause - 1)];
  const Clause& clause = ctx.formula.clauses[static_cast<size_t>(a.clause - 1)];
  int door_slot = -1;
  for (int s = 0; s < clause.size(); ++s) {
    const Literal& lit = clause.literals[static_cast<size_t>(s)];
    if (assign.value(lit.var) == lit.positive) {
      door_slot = s;
      break;
    }
  }
  if (door_slot < 0 && !allow_detour)
    fail(Errc::not_satisfying, "clause " + std::to_string(a.clause) + " has no true literal");

  Episode ep;
  ep.agent = a.id;
  ep.path.push_back(a.start);
  for (int c = a.start.col + 1; c < layout.room_width; ++c) extend(ep.path, Cell{1, c});
  route_to_bottom(ep.path, layout, 0, ctx.traverse_top);
  if (door_slot >= 0) {
    bottom_row_to(ep.path, gadget.door(door_slot).col);
    extend(ep.path, gadget.door(door_slot));
    extend(ep.path, Cell{0, gadget.door(door_slot).col});
    while (ep.path.back().col < gadget.target().col) extend(ep.path, Cell{0, ep.path.back().col + 1});
  } else {
    bottom_row_to(ep.path, gadget.empty_col());
    extend(ep.path, Cell{1, gadget.empty_col()});
    extend(ep.path, Cell{0, gadget.empty_col()});
    extend(ep.path, gadget.target());  // one leftward step
  }
  return ep;
}

inline StagedScript staged_script(const Instance& inst, const Layout& layout, const Assignment& assign,
                                  bool allow_detour) {
  StagedContext ctx = staged_context(inst, layout, assign);
  StagedScript script;

  // Stage 1 (general variant): blockers step onto the stop cell opposite P.
  std::vector<const Agent*> blockers;
  for (const Agent& a : inst.agents)
    if (a.kind == AgentKind::blocker) blockers.push_back(&a);
  for (const Agent* b : blockers) {
    const size_t g = ctx.gadget_of_var.at(b->var);
    const VarGadget& vg = layout.vars[g];
    script.episodes.push_back(
        Episode{b->id, {b->start, ctx.p_is_bottom[g] ? vg.stop_top() : vg.stop_bottom()}});
  }

  // Stage 2: false-literal agents clear P.
  for (const Agent* a : side_order(inst, ctx, assign, /*want_true=*/false))
    script.episodes.push_back(literal_episode(*a, layout, ctx));

  // Stage 3: clause agents c_1..c_M.
  std::vector<const Agent*> clause_agents;
  for (const Agent& a : inst.agents)
    if (a.kind == AgentKind::clause) clause_agents.push_back(&a);
  std::sort(clause_agents.begin(), clause_agents.end(),
            [](const Agent* x, const Agent* y) { return x->clause < y->clause; });
  for (const Agent* a : clause_agents)
    script.episodes.push_back(clause_episode(*a, layout, ctx, assign, allow_detour));

  // Stage 4: true-literal agents.
  for (const Agent* a : side_order(inst, ctx, assign, /*want_true=*/true))
    script.episodes.push_back(literal_episode(*a, layout, ctx));

  // Stage 5 (general variant): blockers continue along their run to the exit.
  for (const Agent* b : blockers) {
    const size_t g = ctx.gadget_of_var.at(b->var);
    const VarGadget& vg = layout.vars[g];
    Episode ep;
    ep.agent = b->id;
    ep.path.push_back(ctx.p_is_bottom[g] ? vg.stop_top() : vg.stop_bottom());
    extend_run(ep.path, vg, ctx.p_is_bottom[g], vg.run_first_col());
    script.episodes.push_back(std::move(ep));
  }
  return script;
}

}  // namespace detail

// Staged optimal plan for a satisfying assignment. Sequential, one agent per
// timestep, total cost d*; additionally monotone on monotone-variant
// instances (blockers need a second episode on general ones).
inline Plan synth_optimal_plan(const Instance& inst, const Layout& layout, const Assignment& assign) {
  if (!layout_matches(inst, layout)) fail(Errc::foreign_instance, "layout does not describe this instance");
  const Formula f = formula_from_instance(inst);
  if (!eval(f, assign)) fail(Errc::not_satisfying, "assignment does not satisfy the formula");
  return sequential_plan(inst, detail::staged_script(inst, layout, assign, /*allow_detour=*/false));
}

// Always-feasible monotone plan (monotone variant only): the staged plan for
// the all-true assignment, with clause agents of falsified clauses taking the
// +2 empty-column detour. Cost exceeds d* exactly when a clause is falsified.
inline Plan synth_feasible_monotone(const Instance& inst, const Layout& layout) {
  if (layout.variant != Variant::monotone)
    fail(Errc::foreign_instance, "fallback plan is defined for monotone-variant instances");
  if (!layout_matches(inst, layout)) fail(Errc::foreign_instance, "layout does not describe this instance");
  const Formula f = formula_from_instance(inst);
  return sequential_plan(
      inst, detail::staged_script(inst, layout, Assignment::all_true(f.num_vars), /*allow_detour=*/true));
}

// Theorem-1 decoding: R+ are the literal agents moving strictly after the last
// clause-agent move; their literals are made true.
inline Assignment extract_assignment_monotone(const Instance& inst, const Layout& layout, const Plan& plan) {
  if (layout.variant != Variant::monotone)
    fail(Errc::foreign_instance, "monotone extraction needs a monotone-variant instance");
  if (!layout_matches(inst, layout)) fail(Errc::foreign_instance, "layout does not describe this instance");
  const ValidationReport report = validate(inst, plan, MotionMode::monotone);
  if (!report.feasible || report.cost != d_star(inst))
    fail(Errc::not_optimal, "extraction requires a feasible plan of cost d*");
  if (!report.is_monotone) fail(Errc::not_monotone, "plan is not monotone");

  int last_clause_move = -1;
  for (int a = 0; a < inst.num_agents(); ++a) {
    if (inst.agents[static_cast<size_t>(a)].kind != AgentKind::clause) continue;
    const auto& interval = report.active_intervals[static_cast<size_t>(a)];
    if (interval && interval->last_move > last_clause_move) last_clause_move = interval->last_move;
  }
  if (last_clause_move < 0) fail(Errc::foreign_instance, "instance has no clause agents");

  const Formula f = formula_from_instance(inst);
  std::vector<int> decided(static_cast<size_t>(f.num_vars) + 1, -1);  // -1 undecided, 0 false, 1 true
  for (int a = 0; a < inst.num_agents(); ++a) {
    const Agent& agent = inst.agents[static_cast<size_t>(a)];
    if (!agent.is_literal()) continue;
    const auto& interval = report.active_intervals[static_cast<size_t>(a)];
    if (!interval || interval->first_move <= last_clause_move) continue;
    const int want = agent.kind == AgentKind::literal_pos ? 1 : 0;
    int& slot = decided[static_cast<size_t>(agent.var)];
    if (slot >= 0 && slot != want)
      fail(Errc::ambiguous_witness, "both polarities of variable " + std::to_string(agent.var) + " move after the clause stage");
    slot = want;
  }
  Assignment result = Assignment::all_true(f.num_vars);
  for (int v = 1; v <= f.num_vars; ++v)
    if (decided[static_cast<size_t>(v)] == 0) result.set(v, false);
  return result;
}

// Theorem-2 decoding: the run the clause agents share through a gadget names
// P; literal agents starting on P are made false.
inline Assignment extract_assignment_general(const Instance& inst, const Layout& layout, const Plan& plan) {
  if (layout.variant != Variant::general)
    fail(Errc::foreign_instance, "general extraction needs a general-variant instance");
  if (!layout_matches(inst, layout)) fail(Errc::foreign_instance, "layout does not describe this instance");
  if (plan.num_agents() != inst.num_agents()) fail(Errc::agent_set_mismatch, "plan agent count mismatch");

  const Formula f = formula_from_instance(inst);
  // Traversal consistency first: a disagreement is a Lemma-1 violation and is
  // reported as such even on plans that break other preconditions.
  std::vector<int> run_of_gadget(layout.vars.size(), -1);  // 0 bottom, 1 top
  for (int a = 0; a < inst.num_agents(); ++a) {
    if (inst.agents[static_cast<size_t>(a)].kind != AgentKind::clause) continue;
    for (size_t g = 0; g < layout.vars.size(); ++g) {
      const VarGadget& vg = layout.vars[g];
      bool top = false, bottom = false;
      for (const Cell& c : plan.trajectories[static_cast<size_t>(a)]) {
        if (c == vg.run_probe(true)) top = true;
        if (c == vg.run_probe(false)) bottom = true;
      }
      if (top == bottom)
        fail(Errc::inconsistent_traversal,
             "clause agent " + std::to_string(a) + " has no single run through gadget of variable " +
                 std::to_string(vg.var));
      const int run = top ? 1 : 0;
      if (run_of_gadget[g] < 0) run_of_gadget[g] = run;
      if (run_of_gadget[g] != run)
        fail(Errc::inconsistent_traversal,
             "clause agents disagree on the run through gadget of variable " + std::to_string(vg.var));
    }
  }

  const ValidationReport report = validate(inst, plan, MotionMode::parallel);
  if (!report.feasible || report.cost != d_star(inst))
    fail(Errc::not_optimal, "extraction requires a feasible plan of cost d*");

  Assignment result = Assignment::all_true(f.num_vars);
  for (size_t g = 0; g < layout.vars.size(); ++g) {
    // P on the top run means positive literals are false.
    result.set(layout.vars[g].var, run_of_gadget[g] == 0);
  }
  return result;
}

}  // namespace sat2mapf
