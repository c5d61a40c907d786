#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sat2mapf/error.hpp"
#include "sat2mapf/plan.hpp"
#include "sat2mapf/reduction.hpp"

namespace sat2mapf {

namespace detail {

inline char agent_glyph(const Agent& a, bool target) {
  if (a.kind == AgentKind::blocker) return static_cast<char>('1' + (a.var - 1) % 9);
  const char base = static_cast<char>((target ? 'A' : 'a') + a.id % 26);
  return base;
}

}  // namespace detail

// Character picture of the instance: `@` obstacle, `.` open, lowercase letter
// per agent start (digits for blockers), uppercase per target. With a plan
// and timestep, agents are drawn at their positions at that time instead of
// their starts.
inline std::string render_instance(const Instance& inst, const Plan* plan = nullptr, int t = 0) {
  if (plan) {
    if (plan->num_agents() != inst.num_agents())
      fail(Errc::agent_set_mismatch, "plan does not cover the instance roster");
    if (t < 0 || t > plan->horizon)
      fail(Errc::bad_timestep, "timestep " + std::to_string(t) + " outside horizon " + std::to_string(plan->horizon));
  }
  std::vector<std::string> rows;
  for (int r = 0; r < inst.map.height(); ++r) {
    std::string row;
    for (int c = 0; c < inst.map.width(); ++c) row.push_back(inst.map.passable({r, c}) ? '.' : '@');
    rows.push_back(std::move(row));
  }
  for (const Agent& a : inst.agents)
    rows[static_cast<size_t>(a.target.row)][static_cast<size_t>(a.target.col)] = detail::agent_glyph(a, true);
  for (const Agent& a : inst.agents) {
    const Cell at = plan ? plan->at(a.id, t) : a.start;
    rows[static_cast<size_t>(at.row)][static_cast<size_t>(at.col)] = detail::agent_glyph(a, false);
  }
  std::string out;
  for (const std::string& row : rows) {
    out += row;
    out += '\n';
  }
  return out;
}

}  // namespace sat2mapf
