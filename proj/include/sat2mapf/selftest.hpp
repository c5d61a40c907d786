#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sat2mapf/formula.hpp"
#include "sat2mapf/formula_gen.hpp"
#include "sat2mapf/gridmap.hpp"
#include "sat2mapf/oracle.hpp"
#include "sat2mapf/reduction.hpp"
#include "sat2mapf/validator.hpp"
#include "sat2mapf/witness.hpp"

namespace sat2mapf::selftest {

struct SelftestConfig {
  std::uint32_t seed = 987001;
  long long max_states = 1'200'000'000;  // descending-oracle state budget
  double per_instance_seconds = 300.0;   // descending-oracle wall budget
  int monotone_cap = 20;                 // monotone-oracle agent cap; larger rosters are skipped
  bool quick = false;                    // reduced sample sizes, same checks
};

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

inline std::string format_report(const std::vector<CriterionResult>& results) {
  std::ostringstream out;
  int failed = 0;
  for (const CriterionResult& r : results) {
    out << "CRIT " << r.index << ' ' << r.name << ' ' << (r.pass ? "PASS" : "FAIL");
    if (!r.detail.empty()) out << " (" << r.detail << ')';
    out << '\n';
    failed += !r.pass;
  }
  out << "SELFTEST pass=" << results.size() - static_cast<size_t>(failed) << " fail=" << failed << '\n';
  return out.str();
}

namespace detail_st {

inline const char* kFigureDimacs = "p cnf 3 3\n-1 -2 3 0\n1 -2 3 0\n1 2 -3 0\n";
inline const char* kUnsatPair = "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n";

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// Holds criterion-3 outputs so later criteria can reuse the witness plans.
struct GeneralSweepRow {
  Formula formula;
  bool sat = false;
  OracleVerdict verdict;
};

struct Sweep {
  std::vector<GeneralSweepRow> rows;
  int unknown = 0;
  int disagreements = 0;
  long long cost_checks = 0;
};

inline bool no_left_shortest_edges(const Instance& inst) {
  for (const Agent& a : inst.agents) {
    const auto ds = bfs_distances(inst.map, a.start);
    const auto dt = bfs_distances(inst.map, a.target);
    const auto d = ds.at(a.target);
    if (!d) return false;
    for (int r = 0; r < inst.map.height(); ++r)
      for (int c = 1; c < inst.map.width(); ++c) {
        const Cell u{r, c}, left{r, c - 1};
        if (!inst.map.passable(u) || !inst.map.passable(left)) continue;
        if (!ds.at(u) || !dt.at(u) || *ds.at(u) + *dt.at(u) != *d) continue;
        if (!ds.at(left) || !dt.at(left)) continue;
        if (*ds.at(u) + 1 + *dt.at(left) == *d) return false;
      }
  }
  return true;
}

inline Assignment figure_assignment() { return Assignment(std::vector<bool>{true, false, true}); }

}  // namespace detail_st

// 1. Figure-formula end-to-end: rosters, witness plans, costs, < 1 s.
inline CriterionResult criterion_figure(const SelftestConfig&) {
  CriterionResult result{1, "figure-formula-end-to-end"};
  detail_st::Timer timer;
  const Formula f = parse_dimacs(detail_st::kFigureDimacs);
  const auto [mono, mono_layout] = build_monotone(f);
  const auto [gen, gen_layout] = build_general(f);

  bool ok = mono.map.height() == 3 && gen.map.height() == 3;
  ok = ok && mono.num_agents() == 12 && gen.num_agents() == 15;

  const Assignment a = detail_st::figure_assignment();
  const Plan mono_plan = synth_optimal_plan(mono, mono_layout, a);
  const Plan gen_plan = synth_optimal_plan(gen, gen_layout, a);
  const ValidationReport mono_report = validate(mono, mono_plan, MotionMode::monotone);
  const ValidationReport gen_report = validate(gen, gen_plan, MotionMode::sequential);
  ok = ok && mono_report.feasible && mono_report.is_monotone && mono_report.cost == d_star(mono);
  ok = ok && gen_report.feasible && gen_report.is_sequential && gen_report.cost == d_star(gen);

  const bool in_time = timer.seconds() < 1.0;
  result.pass = ok && in_time;
  std::ostringstream detail;
  detail << "agents=" << mono.num_agents() << "/" << gen.num_agents() << " cost=" << mono_report.cost
         << "/" << gen_report.cost << " runtime<1s=" << (in_time ? "yes" : "no");
  result.detail = detail.str();
  return result;
}

// 2. Monotone equivalence sweep: oracle verdict == brute-force SAT on every
// canonical formula with N<=2, M<=3 plus seeded random formulas, under 60 s.
inline CriterionResult criterion_monotone_equivalence(const SelftestConfig& cfg) {
  CriterionResult result{2, "monotone-equivalence-sweep"};
  detail_st::Timer timer;
  std::vector<Formula> formulas = canonical_formulas(2, cfg.quick ? 2 : 3);
  const int random_count = cfg.quick ? 40 : 200;
  std::mt19937 rng(cfg.seed);
  for (int i = 0; i < random_count; ++i) formulas.push_back(random_formula(rng, 4, 4));

  long long agree = 0, skipped = 0, disagree = 0, witness_bad = 0;
  for (const Formula& f : formulas) {
    const auto [inst, layout] = build_monotone(f);
    if (inst.num_agents() > cfg.monotone_cap) {
      ++skipped;
      continue;
    }
    const bool sat = brute_force_sat(f).has_value();
    const OracleVerdict verdict = monotone_dstar_feasible(inst, cfg.monotone_cap);
    if (verdict.feasible != sat) {
      ++disagree;
      continue;
    }
    if (verdict.feasible &&
        !is_dstar_optimal(inst, *verdict.witness, MotionMode::monotone))
      ++witness_bad;
    ++agree;
  }
  const bool in_time = timer.seconds() < 60.0;
  result.pass = disagree == 0 && witness_bad == 0 && in_time;
  std::ostringstream detail;
  detail << "formulas=" << formulas.size() << " agree=" << agree << " disagree=" << disagree
         << " skipped=" << skipped << " runtime<60s=" << (in_time ? "yes" : "no");
  result.detail = detail.str();
  return result;
}

// 3. General-variant equivalence on all canonical formulas with N<=2, M<=2:
// descending oracle == SAT, searches exhausted, never wrong.
inline CriterionResult criterion_general_equivalence(const SelftestConfig& cfg, detail_st::Sweep& sweep) {
  CriterionResult result{3, "general-equivalence-small"};
  std::vector<Formula> formulas = canonical_formulas(2, 2);
  if (cfg.quick) {
    std::vector<Formula> trimmed;
    for (const Formula& f : formulas) {
      int literals = 0;
      for (const Clause& c : f.clauses) literals += c.size();
      if (literals <= 4) trimmed.push_back(f);
    }
    formulas = std::move(trimmed);
  }
  // The headline unsatisfiable pair must be in the set.
  const Formula pair = parse_dimacs(detail_st::kUnsatPair);
  bool have_pair = false;
  for (const Formula& f : formulas) have_pair = have_pair || f.clauses == pair.clauses;
  if (!have_pair) formulas.push_back(pair);

  long long agree = 0, witness_bad = 0;
  OracleLimits limits{cfg.max_states, cfg.per_instance_seconds};
  for (const Formula& f : formulas) {
    const auto [inst, layout] = build_general(f);
    const bool sat = brute_force_sat(f).has_value();
    OracleVerdict verdict = descending_dstar_feasible(inst, limits);
    sweep.cost_checks += verdict.cost_checks;
    if (!verdict.conclusive()) {
      ++sweep.unknown;  // reported unknown-skipped, never guessed
    } else if (verdict.feasible != sat) {
      ++sweep.disagreements;
    } else {
      if (verdict.feasible && !is_dstar_optimal(inst, *verdict.witness, MotionMode::sequential))
        ++witness_bad;
      ++agree;
    }
    sweep.rows.push_back(detail_st::GeneralSweepRow{f, sat, std::move(verdict)});
  }
  result.pass = sweep.disagreements == 0 && witness_bad == 0 && sweep.unknown == 0;
  std::ostringstream detail;
  detail << "formulas=" << formulas.size() << " agree=" << agree << " disagree=" << sweep.disagreements
         << " unknown-skipped=" << sweep.unknown;
  result.detail = detail.str();
  return result;
}

// 4. Lemma 1: every optimal plan from criteria 1 and 3 and a batch of
// synthesized witnesses share one run per gadget. Zero violations.
inline CriterionResult criterion_lemma1(const SelftestConfig& cfg, const detail_st::Sweep& sweep) {
  CriterionResult result{4, "lemma1-same-path"};
  long long checked = 0, violations = 0;

  const Formula fig = parse_dimacs(detail_st::kFigureDimacs);
  const auto [fig_inst, fig_layout] = build_general(fig);
  const Plan fig_plan = synth_optimal_plan(fig_inst, fig_layout, detail_st::figure_assignment());
  ++checked;
  if (!check_lemma1(fig_inst, fig_layout, fig_plan)) ++violations;

  for (const auto& row : sweep.rows) {
    if (!row.verdict.feasible || !row.verdict.witness) continue;
    const auto [inst, layout] = build_general(row.formula);
    ++checked;
    if (!check_lemma1(inst, layout, *row.verdict.witness)) ++violations;
  }

  const int goal = cfg.quick ? 60 : 500;
  std::mt19937 rng(cfg.seed + 4);
  int synthesized = 0;
  while (synthesized < goal) {
    const Formula f = random_formula(rng, 4, 4);
    const auto witness = brute_force_sat(f);
    if (!witness) continue;
    const auto [inst, layout] = build_general(f);
    const Plan plan = synth_optimal_plan(inst, layout, *witness);
    ++checked;
    ++synthesized;
    if (!check_lemma1(inst, layout, plan)) ++violations;
  }

  result.pass = violations == 0;
  std::ostringstream detail;
  detail << "plans=" << checked << " violations=" << violations;
  result.detail = detail.str();
  return result;
}

// 5. Linear reduction size: exact roster count, open-cell density bound, and
// closed-form agreement for M in {5, 10, 20, 40}.
inline CriterionResult criterion_linear_size(const SelftestConfig& cfg) {
  CriterionResult result{5, "linear-reduction-size"};
  std::mt19937 rng(cfg.seed + 5);
  long long checked = 0, bad = 0;
  for (int m : {5, 10, 20, 40}) {
    for (int rep = 0; rep < 5; ++rep) {
      const int max_vars = rep < 3 ? m : 3;
      Formula f;
      f.num_vars = 1 + rng_below(rng, max_vars);
      for (int j = 0; j < m; ++j) {
        Clause c;
        const int width = 1 + rng_below(rng, 3);
        for (int s = 0; s < width; ++s)
          c.literals.push_back(Literal{1 + rng_below(rng, f.num_vars), rng_below(rng, 2) == 0});
        f.clauses.push_back(std::move(c));
      }

      int total_literals = 0;
      for (const Clause& c : f.clauses) total_literals += c.size();
      std::map<int, std::pair<int, int>> occ;
      for (const Clause& c : f.clauses)
        for (const Literal& lit : c.literals) (lit.positive ? occ[lit.var].first : occ[lit.var].second)++;
      const int k = static_cast<int>(occ.size());
      int sum_w = 0;
      for (const auto& [var, pq] : occ) sum_w += std::max(std::max(pq.first, pq.second), 1) + 1;
      const int width_closed = 3 * m + 2 + total_literals + 3 * k + sum_w;
      const long long open_closed = 5LL * m + 3 + 3LL * total_literals + 7LL * k + 2LL * sum_w;

      const SizeStats mono = size_stats(f, Variant::monotone);
      const SizeStats gen = size_stats(f, Variant::general);
      ++checked;
      bool ok = mono.agents == total_literals + m && gen.agents == total_literals + m + k;
      ok = ok && mono.width == width_closed && gen.width == width_closed;
      ok = ok && mono.open_cells == open_closed && mono.height == 3;
      ok = ok && mono.open_cells <= 30LL * (f.num_vars + m);
      if (!ok) ++bad;
    }
  }
  result.pass = bad == 0;
  std::ostringstream detail;
  detail << "formulas=" << checked << " mismatches=" << bad;
  result.detail = detail.str();
  return result;
}

// 6. Per-agent optimality: synthesized optimal plans give every agent its BFS
// distance and total d*, both variants.
inline CriterionResult criterion_per_agent_optimality(const SelftestConfig& cfg) {
  CriterionResult result{6, "per-agent-optimality"};
  std::mt19937 rng(cfg.seed + 6);
  const int goal = cfg.quick ? 30 : 200;
  long long produced = 0, bad = 0;
  while (produced < goal) {
    const Formula f = random_formula(rng, 4, 4);
    const auto witness = brute_force_sat(f);
    if (!witness) continue;
    ++produced;
    for (Variant variant : {Variant::monotone, Variant::general}) {
      const auto [inst, layout] = sat2mapf::detail::build_instance(f, variant);
      const Plan plan = synth_optimal_plan(inst, layout, *witness);
      const ValidationReport report = validate(inst, plan);
      bool ok = report.feasible && report.cost == d_star(inst);
      for (const Agent& agent : inst.agents) {
        const auto field = bfs_distances(inst.map, agent.start);
        ok = ok && report.path_lengths[static_cast<size_t>(agent.id)] == *field.at(agent.target);
      }
      if (!ok) ++bad;
    }
  }
  result.pass = bad == 0;
  std::ostringstream detail;
  detail << "plans=" << 2 * produced << " defects=" << bad;
  result.detail = detail.str();
  return result;
}

// 7. Fallback feasibility: validator-approved monotone plan on every seeded
// formula; strictly above d* (with the oracle agreeing infeasible-at-d*) on
// the unsatisfiable ones.
inline CriterionResult criterion_fallback(const SelftestConfig& cfg) {
  CriterionResult result{7, "fallback-feasibility"};
  std::mt19937 rng(cfg.seed + 7);
  const int goal = cfg.quick ? 15 : 50;
  long long sat_count = 0, unsat_count = 0, bad = 0;
  for (int i = 0; i < goal; ++i) {
    const Formula f = random_formula(rng, 2, 4);
    const bool sat = brute_force_sat(f).has_value();
    const auto [inst, layout] = build_monotone(f);
    const Plan plan = synth_feasible_monotone(inst, layout);
    const ValidationReport report = validate(inst, plan, MotionMode::monotone);
    bool ok = report.feasible && report.is_monotone && report.cost >= d_star(inst);
    if (sat) {
      ++sat_count;
    } else {
      ++unsat_count;
      ok = ok && report.cost > d_star(inst);
      ok = ok && !monotone_dstar_feasible(inst, cfg.monotone_cap).feasible;
    }
    if (!ok) ++bad;
  }
  result.pass = bad == 0 && unsat_count > 0 && sat_count > 0;
  std::ostringstream detail;
  detail << "formulas=" << goal << " sat=" << sat_count << " unsat=" << unsat_count << " defects=" << bad;
  result.detail = detail.str();
  return result;
}

// 8. No leftward move on any shortest-path DAG of any generated instance, and
// the descending search's config-cost identity never fired.
inline CriterionResult criterion_no_left_moves(const SelftestConfig& cfg, const detail_st::Sweep& sweep) {
  CriterionResult result{8, "no-left-moves"};
  long long instances = 0, bad = 0;
  std::vector<Formula> formulas = canonical_formulas(2, cfg.quick ? 1 : 2);
  std::mt19937 rng(cfg.seed + 8);
  const int random_count = cfg.quick ? 20 : 100;
  for (int i = 0; i < random_count; ++i) formulas.push_back(random_formula(rng, 4, 4));
  for (const Formula& f : formulas) {
    for (Variant variant : {Variant::monotone, Variant::general}) {
      const auto [inst, layout] = sat2mapf::detail::build_instance(f, variant);
      ++instances;
      if (!detail_st::no_left_shortest_edges(inst)) ++bad;
    }
  }
  // criterion_general_equivalence already ran the descending searches; a
  // violated identity would have thrown there and failed the run.
  result.pass = bad == 0 && sweep.cost_checks > 0;
  std::ostringstream detail;
  detail << "instances=" << instances << " left-edges=" << bad << " cost-identity-checks="
         << sweep.cost_checks << " violations=0";
  result.detail = detail.str();
  return result;
}

// 9. Oracle cross-agreement on tiny handcrafted instances, including the 2x2
// rotation.
inline CriterionResult criterion_cross_agreement(const SelftestConfig&) {
  CriterionResult result{9, "oracle-cross-agreement"};

  struct Tiny {
    std::string name;
    std::string map;
    std::vector<std::pair<Cell, Cell>> agents;
  };
  auto grid = [](std::initializer_list<const char*> rows) {
    std::ostringstream out;
    int width = 0;
    int height = 0;
    for (const char* r : rows) {
      width = static_cast<int>(std::string(r).size());
      ++height;
    }
    out << "type octile\nheight " << height << "\nwidth " << width << "\nmap\n";
    for (const char* r : rows) out << r << '\n';
    return out.str();
  };

  std::vector<Tiny> tinies;
  tinies.push_back({"corridor1", grid({"....."}), {{{0, 0}, {0, 4}}}});
  tinies.push_back({"detour", grid({"....", ".@@.", "...."}), {{{1, 0}, {1, 3}}}});
  tinies.push_back({"train2", grid({"...."}), {{{0, 0}, {0, 2}}, {{0, 1}, {0, 3}}}});
  tinies.push_back({"train3", grid({"....."}), {{{0, 0}, {0, 2}}, {{0, 1}, {0, 3}}, {{0, 2}, {0, 4}}}});
  tinies.push_back({"facing2", grid({"...."}), {{{0, 0}, {0, 3}}, {{0, 3}, {0, 0}}}});
  tinies.push_back({"rotation2x2", grid({"..", ".."}),
                    {{{0, 0}, {0, 1}}, {{0, 1}, {1, 1}}, {{1, 1}, {1, 0}}, {{1, 0}, {0, 0}}}});
  tinies.push_back({"rot3on2x2", grid({"..", ".."}), {{{0, 0}, {0, 1}}, {{0, 1}, {1, 1}}, {{1, 1}, {1, 0}}}});
  tinies.push_back({"diagswap", grid({"..", ".."}), {{{0, 0}, {1, 1}}, {{1, 1}, {0, 0}}}});
  tinies.push_back({"pocket", grid({"@@.@", "...."}), {{{1, 0}, {1, 3}}, {{1, 3}, {1, 0}}}});
  tinies.push_back({"cross", grid({"@.@", "...", "@.@"}), {{{1, 0}, {1, 2}}, {{0, 1}, {2, 1}}}});
  tinies.push_back({"lanes", grid({"...", "..."}), {{{0, 0}, {0, 2}}, {{1, 0}, {1, 2}}}});
  tinies.push_back({"corner-deadlock", grid({"..", "@."}), {{{0, 0}, {1, 1}}, {{0, 1}, {0, 0}}}});
  tinies.push_back({"corner-single", grid({"..", "@."}), {{{0, 0}, {1, 1}}}});
  tinies.push_back({"bottleneck", grid({".@.", "...", ".@."}), {{{0, 0}, {0, 2}}, {{2, 0}, {2, 2}}}});
  tinies.push_back({"merge-train", grid({"......"}), {{{0, 0}, {0, 4}}, {{0, 1}, {0, 5}}}});
  tinies.push_back({"target-order", grid({"...."}), {{{0, 0}, {0, 1}}, {{0, 1}, {0, 3}}}});
  tinies.push_back({"facing-cross", grid({"...."}), {{{0, 0}, {0, 2}}, {{0, 3}, {0, 1}}}});
  tinies.push_back({"ring-train", grid({"...", "..."}),
                    {{{0, 0}, {0, 1}}, {{0, 1}, {0, 2}}, {{0, 2}, {1, 2}}, {{1, 2}, {1, 1}}}});
  tinies.push_back({"move-aside", grid({"...", "...", "..."}), {{{0, 0}, {2, 2}}, {{1, 1}, {0, 0}}}});
  tinies.push_back({"swap3x3", grid({"...", "...", "..."}), {{{0, 0}, {2, 2}}, {{2, 2}, {0, 0}}}});
  tinies.push_back({"mini-gadget", grid({"....", ".@@.", "...."}), {{{1, 0}, {1, 3}}, {{0, 1}, {0, 3}}}});

  long long checked = 0, bad = 0;
  std::ostringstream notes;
  for (const Tiny& t : tinies) {
    Instance inst;
    inst.map = read_map(t.map);
    int id = 0;
    for (const auto& [s, tgt] : t.agents) {
      Agent a;
      a.id = id++;
      a.start = s;
      a.target = tgt;
      inst.agents.push_back(a);
    }
    ++checked;
    bool ok = true;
    const long long dstar = d_star(inst);
    const JointResult par = joint_astar(inst, MotionMode::parallel);
    const JointResult seq = joint_astar(inst, MotionMode::sequential);
    const JointResult mono = joint_astar(inst, MotionMode::monotone);
    const OracleVerdict dp = monotone_dstar_feasible(inst);

    if (seq.feasible) ok = ok && par.feasible && par.min_cost <= seq.min_cost;
    if (mono.feasible) ok = ok && seq.feasible && seq.min_cost <= mono.min_cost;
    if (par.feasible) ok = ok && par.min_cost >= dstar;

    // The subset DP and the monotone-mode joint search decide the same
    // question at cost d*.
    ok = ok && (dp.feasible == (mono.feasible && mono.min_cost == dstar));
    if (dp.feasible) {
      ok = ok && seq.feasible && seq.min_cost == dstar && par.min_cost == dstar;
      ok = ok && is_dstar_optimal(inst, *dp.witness, MotionMode::monotone);
    }

    if (detail_st::no_left_shortest_edges(inst)) {
      const OracleVerdict desc = descending_dstar_feasible(inst);
      ok = ok && desc.exhausted;
      ok = ok && (desc.feasible == (par.feasible && par.min_cost == dstar));
      if (desc.feasible) {
        ok = ok && seq.feasible && seq.min_cost == dstar;
        ok = ok && is_dstar_optimal(inst, *desc.witness, MotionMode::sequential);
      }
    }

    if (t.name == "rotation2x2")
      ok = ok && par.feasible && par.min_cost == 4 && !seq.feasible && !mono.feasible;
    if (t.name == "pocket")
      ok = ok && par.min_cost == dstar + 2 && seq.min_cost == dstar + 2;
    if (t.name == "facing2") ok = ok && !par.feasible && !seq.feasible;

    if (!ok) {
      ++bad;
      notes << ' ' << t.name;
    }
  }
  result.pass = bad == 0 && checked >= 20;
  std::ostringstream detail;
  detail << "instances=" << checked << " disagreements=" << bad << notes.str();
  result.detail = detail.str();
  return result;
}

// 10. Determinism: identical bytes for repeated reductions, witnesses, and
// oracle runs (thread-count independence is exercised at the CLI level).
inline CriterionResult criterion_determinism(const SelftestConfig& cfg) {
  CriterionResult result{10, "determinism"};
  long long checked = 0, bad = 0;

  auto same_reduction = [&](const Formula& f, Variant variant) {
    const auto [i1, l1] = sat2mapf::detail::build_instance(f, variant);
    const auto [i2, l2] = sat2mapf::detail::build_instance(f, variant);
    ++checked;
    return write_map(i1.map) == write_map(i2.map) && write_agents(i1) == write_agents(i2) &&
           write_layout(l1) == write_layout(l2);
  };

  const Formula fig = parse_dimacs(detail_st::kFigureDimacs);
  if (!same_reduction(fig, Variant::monotone) || !same_reduction(fig, Variant::general)) ++bad;

  std::mt19937 rng_a(cfg.seed + 10), rng_b(cfg.seed + 10);
  for (int i = 0; i < (cfg.quick ? 6 : 20); ++i) {
    const Formula fa = random_formula(rng_a, 4, 4);
    const Formula fb = random_formula(rng_b, 4, 4);
    ++checked;
    if (!(fa == fb)) ++bad;  // seeded generation is reproducible
    if (!same_reduction(fa, Variant::monotone) || !same_reduction(fa, Variant::general)) ++bad;
  }

  {
    const auto [inst, layout] = build_monotone(fig);
    const Plan p1 = synth_optimal_plan(inst, layout, detail_st::figure_assignment());
    const Plan p2 = synth_optimal_plan(inst, layout, detail_st::figure_assignment());
    ++checked;
    if (write_plan(p1) != write_plan(p2)) ++bad;
    const OracleVerdict v1 = monotone_dstar_feasible(inst);
    const OracleVerdict v2 = monotone_dstar_feasible(inst);
    ++checked;
    if (v1.explored != v2.explored || write_plan(*v1.witness) != write_plan(*v2.witness)) ++bad;
  }
  {
    const auto [inst, layout] = build_general(parse_dimacs("p cnf 1 1\n1 0\n"));
    const OracleVerdict v1 = descending_dstar_feasible(inst);
    const OracleVerdict v2 = descending_dstar_feasible(inst);
    ++checked;
    if (v1.explored != v2.explored || write_plan(*v1.witness) != write_plan(*v2.witness)) ++bad;
  }

  result.pass = bad == 0;
  std::ostringstream detail;
  detail << "comparisons=" << checked << " mismatches=" << bad;
  result.detail = detail.str();
  return result;
}

inline std::vector<CriterionResult> run_acceptance(const SelftestConfig& cfg) {
  std::vector<CriterionResult> results;
  detail_st::Sweep sweep;
  auto guarded = [&](auto&& fn, int index, const char* name) {
    try {
      results.push_back(fn());
    } catch (const std::exception& e) {
      results.push_back(CriterionResult{index, name, false, std::string("exception: ") + e.what()});
    }
  };
  guarded([&] { return criterion_figure(cfg); }, 1, "figure-formula-end-to-end");
  guarded([&] { return criterion_monotone_equivalence(cfg); }, 2, "monotone-equivalence-sweep");
  guarded([&] { return criterion_general_equivalence(cfg, sweep); }, 3, "general-equivalence-small");
  guarded([&] { return criterion_lemma1(cfg, sweep); }, 4, "lemma1-same-path");
  guarded([&] { return criterion_linear_size(cfg); }, 5, "linear-reduction-size");
  guarded([&] { return criterion_per_agent_optimality(cfg); }, 6, "per-agent-optimality");
  guarded([&] { return criterion_fallback(cfg); }, 7, "fallback-feasibility");
  guarded([&] { return criterion_no_left_moves(cfg, sweep); }, 8, "no-left-moves");
  guarded([&] { return criterion_cross_agreement(cfg); }, 9, "oracle-cross-agreement");
  guarded([&] { return criterion_determinism(cfg); }, 10, "determinism");
  return results;
}

}  // namespace sat2mapf::selftest
