#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sat2mapf/error.hpp"
#include "sat2mapf/plan.hpp"
#include "sat2mapf/reduction.hpp"

namespace sat2mapf {

// Legality nests strictly: every monotone plan is sequential, every
// sequential plan is parallel.
enum class MotionMode { parallel, sequential, monotone };

inline const char* mode_name(MotionMode m) {
  switch (m) {
    case MotionMode::parallel: return "parallel";
    case MotionMode::sequential: return "sequential";
    case MotionMode::monotone: return "monotone";
  }
  return "?";
}

struct VertexConflict {
  int t = 0;  // timestep at which both agents occupy the cell
  int agent_a = 0;
  int agent_b = 0;
  Cell cell;
};

struct SwapConflict {
  int t = 0;  // step t-1 -> t traverses the edge in both directions
  int agent_a = 0;
  int agent_b = 0;
  Cell cell_a;  // agent_a's cell at t-1
  Cell cell_b;
};

// Inclusive span of an agent's moving steps; step t is the transition t->t+1.
// Spans of agents that never move are absent. Monotone legality is pairwise
// disjointness of these spans: back-to-back movers (one arrives at t, the
// next departs at t) are legal, interleaving is not.
struct ActiveInterval {
  int first_move = 0;
  int last_move = 0;
};

struct ValidationReport {
  bool feasible = false;
  std::vector<std::string> defects;  // endpoint / adjacency / passability breaches
  std::vector<VertexConflict> vertex_conflicts;
  std::vector<SwapConflict> swap_conflicts;
  long long cost = 0;
  bool is_sequential = false;
  bool is_monotone = false;
  std::vector<int> path_lengths;
  std::vector<std::optional<ActiveInterval>> active_intervals;

  bool ok_in(MotionMode mode) const {
    if (!feasible) return false;
    if (mode == MotionMode::sequential) return is_sequential;
    if (mode == MotionMode::monotone) return is_monotone;
    return true;
  }
};

inline ValidationReport validate(const Instance& inst, const Plan& plan, MotionMode mode = MotionMode::parallel) {
  (void)mode;  // all mode flags are computed unconditionally; ok_in() selects
  const int n = inst.num_agents();
  if (plan.num_agents() != n)
    fail(Errc::agent_set_mismatch,
         "plan has " + std::to_string(plan.num_agents()) + " agents, instance has " + std::to_string(n));
  for (int a = 0; a < n; ++a) {
    if (static_cast<int>(plan.trajectories[static_cast<size_t>(a)].size()) != plan.horizon + 1)
      fail(Errc::trajectory_length_mismatch, "agent " + std::to_string(a));
  }

  ValidationReport report;
  const int T = plan.horizon;

  // (a) endpoint axioms, adjacency-or-stay, passability.
  for (int a = 0; a < n; ++a) {
    const auto& traj = plan.trajectories[static_cast<size_t>(a)];
    if (traj.front() != inst.agents[static_cast<size_t>(a)].start)
      report.defects.push_back("agent " + std::to_string(a) + " does not start at its start vertex");
    if (traj.back() != inst.agents[static_cast<size_t>(a)].target)
      report.defects.push_back("agent " + std::to_string(a) + " does not end at its target vertex");
    for (int t = 0; t <= T; ++t) {
      if (!inst.map.passable(traj[static_cast<size_t>(t)])) {
        report.defects.push_back("agent " + std::to_string(a) + " occupies blocked cell at t=" + std::to_string(t));
        break;
      }
    }
    for (int t = 1; t <= T; ++t) {
      const Cell u = traj[static_cast<size_t>(t - 1)], v = traj[static_cast<size_t>(t)];
      const int manhattan = std::abs(u.row - v.row) + std::abs(u.col - v.col);
      if (manhattan > 1) {
        report.defects.push_back("agent " + std::to_string(a) + " teleports at step " + std::to_string(t - 1));
        break;
      }
    }
  }

  // (b) vertex conflicts. (c) swap conflicts.
  for (int t = 0; t <= T; ++t) {
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (plan.at(a, t) == plan.at(b, t))
          report.vertex_conflicts.push_back(VertexConflict{t, a, b, plan.at(a, t)});
        if (t > 0 && plan.at(a, t - 1) == plan.at(b, t) && plan.at(a, t) == plan.at(b, t - 1) &&
            plan.at(a, t) != plan.at(a, t - 1))
          report.swap_conflicts.push_back(SwapConflict{t, a, b, plan.at(a, t - 1), plan.at(b, t - 1)});
      }
    }
  }

  // (d) sequential: at most one agent changes cell per step.
  report.is_sequential = true;
  for (int t = 1; t <= T; ++t) {
    int movers = 0;
    for (int a = 0; a < n; ++a) movers += plan.at(a, t) != plan.at(a, t - 1);
    if (movers > 1) {
      report.is_sequential = false;
      break;
    }
  }

  // (e) monotone: active move-step spans pairwise disjoint.
  report.active_intervals.assign(static_cast<size_t>(n), std::nullopt);
  for (int a = 0; a < n; ++a) {
    int first = -1, last = -1;
    for (int t = 0; t < T; ++t) {
      if (plan.at(a, t) != plan.at(a, t + 1)) {
        if (first < 0) first = t;
        last = t;
      }
    }
    if (first >= 0) report.active_intervals[static_cast<size_t>(a)] = ActiveInterval{first, last};
  }
  {
    std::vector<ActiveInterval> spans;
    for (const auto& i : report.active_intervals)
      if (i) spans.push_back(*i);
    std::sort(spans.begin(), spans.end(),
              [](const ActiveInterval& x, const ActiveInterval& y) { return x.first_move < y.first_move; });
    report.is_monotone = true;
    for (size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].first_move <= spans[i - 1].last_move) {
        report.is_monotone = false;
        break;
      }
    }
  }

  report.path_lengths.resize(static_cast<size_t>(n));
  for (int a = 0; a < n; ++a) {
    report.path_lengths[static_cast<size_t>(a)] = plan.path_length(a);
    report.cost += report.path_lengths[static_cast<size_t>(a)];
  }

  report.feasible =
      report.defects.empty() && report.vertex_conflicts.empty() && report.swap_conflicts.empty();
  if (report.is_monotone && !report.is_sequential) fail(Errc::bad_format, "mode nesting violated");
  return report;
}

inline bool is_dstar_optimal(const Instance& inst, const Plan& plan, MotionMode mode) {
  const ValidationReport report = validate(inst, plan, mode);
  return report.ok_in(mode) && report.cost == d_star(inst);
}

// Lemma check for general-variant instances: all agents that pass through a
// variable gadget (enter at its entrance mid-path and later leave at its exit)
// must use the identical cell sequence in between.
inline bool check_lemma1(const Instance& inst, const Layout& layout, const Plan& plan) {
  if (layout.variant != Variant::general) fail(Errc::foreign_instance, "check_lemma1 needs a general-variant instance");
  const ValidationReport report = validate(inst, plan, MotionMode::parallel);
  if (!report.feasible || report.cost != d_star(inst))
    fail(Errc::not_optimal, "check_lemma1 requires a feasible plan of cost d*");
  for (const VarGadget& g : layout.vars) {
    std::optional<std::vector<Cell>> common;
    for (int a = 0; a < inst.num_agents(); ++a) {
      const std::vector<Cell> path = plan.path(a);
      // A traverser visits the entrance mid-path; the gadget's own blocker
      // (which starts there) is not a traverser.
      auto ent = std::find(path.begin() + 1, path.end(), g.entrance());
      if (ent == path.end()) continue;
      auto exit = std::find(ent, path.end(), g.exit());
      if (exit == path.end()) continue;
      std::vector<Cell> through(ent, exit + 1);
      if (!common) {
        common = std::move(through);
      } else if (*common != through) {
        return false;
      }
    }
  }
  return true;
}

inline std::string result_line(const ValidationReport& report, long long dstar) {
  std::ostringstream out;
  out << "RESULT feasible=" << (report.feasible ? 1 : 0) << " cost=" << report.cost << " dstar=" << dstar
      << " monotone=" << (report.is_monotone ? 1 : 0) << " sequential=" << (report.is_sequential ? 1 : 0);
  return out.str();
}

inline std::string report_text(const ValidationReport& report) {
  std::ostringstream out;
  for (const std::string& d : report.defects) out << "defect: " << d << '\n';
  for (const VertexConflict& c : report.vertex_conflicts)
    out << "vertex conflict at t=" << c.t << " agents " << c.agent_a << "," << c.agent_b << " cell "
        << to_string(c.cell) << '\n';
  for (const SwapConflict& c : report.swap_conflicts)
    out << "swap conflict at step " << c.t - 1 << "->" << c.t << " agents " << c.agent_a << ","
        << c.agent_b << " edge " << to_string(c.cell_a) << "-" << to_string(c.cell_b) << '\n';
  return out.str();
}

}  // namespace sat2mapf
