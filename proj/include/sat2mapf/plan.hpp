#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "sat2mapf/error.hpp"
#include "sat2mapf/gridmap.hpp"

namespace sat2mapf {

// Timed trajectories over a shared horizon. Agent ids are the contiguous
// 0..n-1 roster indices; trajectory[id] has exactly horizon+1 cells.
struct Plan {
  int horizon = 0;
  std::vector<std::vector<Cell>> trajectories;

  int num_agents() const { return static_cast<int>(trajectories.size()); }

  Cell at(int agent, int t) const { return trajectories[static_cast<size_t>(agent)][static_cast<size_t>(t)]; }

  // Trajectory with consecutive repeats collapsed (the agent's path).
  std::vector<Cell> path(int agent) const {
    std::vector<Cell> p;
    for (const Cell& c : trajectories[static_cast<size_t>(agent)])
      if (p.empty() || p.back() != c) p.push_back(c);
    return p;
  }

  int path_length(int agent) const { return static_cast<int>(path(agent).size()) - 1; }

  long long total_cost() const {
    long long cost = 0;
    for (int a = 0; a < num_agents(); ++a) cost += path_length(a);
    return cost;
  }
};

// Plan text format: `plan T=<T> n=<n>` then per agent `<id>: r,c r,c ... r,c`
// with exactly T+1 pairs.
inline std::string write_plan(const Plan& plan) {
  std::ostringstream out;
  out << "plan T=" << plan.horizon << " n=" << plan.num_agents() << '\n';
  for (int a = 0; a < plan.num_agents(); ++a) {
    out << a << ':';
    for (const Cell& c : plan.trajectories[static_cast<size_t>(a)]) out << ' ' << c.row << ',' << c.col;
    out << '\n';
  }
  return out.str();
}

inline Plan read_plan(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) fail(Errc::bad_format, "empty plan file");
  int horizon = -1, n = -1;
  {
    std::istringstream hs(header);
    std::string tag, tkv, nkv;
    hs >> tag >> tkv >> nkv;
    if (tag != "plan" || tkv.rfind("T=", 0) != 0 || nkv.rfind("n=", 0) != 0)
      fail(Errc::bad_format, "plan header must be `plan T=<T> n=<n>`: " + header);
    horizon = std::stoi(tkv.substr(2));
    n = std::stoi(nkv.substr(2));
    if (horizon < 0 || n < 1) fail(Errc::bad_format, "bad plan header values: " + header);
  }
  Plan plan;
  plan.horizon = horizon;
  plan.trajectories.assign(static_cast<size_t>(n), {});
  std::string line;
  int seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id_tok;
    ls >> id_tok;
    if (id_tok.empty() || id_tok.back() != ':') fail(Errc::bad_format, "plan line must start with `<id>:`: " + line);
    const int id = std::stoi(id_tok.substr(0, id_tok.size() - 1));
    if (id < 0 || id >= n) fail(Errc::agent_set_mismatch, "plan agent id " + std::to_string(id) + " out of range");
    std::vector<Cell>& traj = plan.trajectories[static_cast<size_t>(id)];
    if (!traj.empty()) fail(Errc::bad_format, "duplicate trajectory for agent " + std::to_string(id));
    std::string pair;
    while (ls >> pair) {
      const size_t comma = pair.find(',');
      if (comma == std::string::npos) fail(Errc::bad_format, "bad cell token " + pair);
      traj.push_back(Cell{std::stoi(pair.substr(0, comma)), std::stoi(pair.substr(comma + 1))});
    }
    if (static_cast<int>(traj.size()) != horizon + 1)
      fail(Errc::trajectory_length_mismatch,
           "agent " + std::to_string(id) + " has " + std::to_string(traj.size()) + " cells, expected " +
               std::to_string(horizon + 1));
    ++seen;
  }
  if (seen != n) fail(Errc::agent_set_mismatch, "plan lists " + std::to_string(seen) + " of " + std::to_string(n) + " agents");
  return plan;
}

inline Plan read_plan(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_plan(in);
}

}  // namespace sat2mapf
