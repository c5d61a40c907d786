// Command-line pipeline around the reduction toolkit: compile CNF formulas to
// grid MAPF instances, synthesize and validate plans, run the decision
// oracles, and execute the acceptance self-test. Subcommands communicate
// through files only; exit codes are 0 = yes/valid, 1 = no/invalid,
// 2 = error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sat2mapf/formula.hpp"
#include "sat2mapf/formula_gen.hpp"
#include "sat2mapf/oracle.hpp"
#include "sat2mapf/plan.hpp"
#include "sat2mapf/reduction.hpp"
#include "sat2mapf/render.hpp"
#include "sat2mapf/selftest.hpp"
#include "sat2mapf/validator.hpp"
#include "sat2mapf/witness.hpp"

namespace {

using namespace sat2mapf;

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitError = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::bad_format, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::bad_format, "cannot write " + path);
  out << content;
}

struct InstanceFiles {
  Instance instance;
  Layout layout;
};

InstanceFiles read_instance_files(const std::string& prefix) {
  InstanceFiles files;
  files.instance.map = read_map(slurp(prefix + ".map"));
  files.instance.agents = read_agents(slurp(prefix + ".agents"));
  files.layout = read_layout(slurp(prefix + ".layout"));
  if (!layout_matches(files.instance, files.layout))
    fail(Errc::foreign_instance, "map/agents/layout files do not belong together");
  return files;
}

// `1=1,2=0` or `x1=1,x2=0`; variables not mentioned default to true.
Assignment parse_assignment(const std::string& text, int num_vars) {
  Assignment a = Assignment::all_true(num_vars);
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const size_t eq = item.find('=');
    if (eq == std::string::npos) fail(Errc::bad_format, "assignment item without `=`: " + item);
    std::string var = item.substr(0, eq);
    if (!var.empty() && (var[0] == 'x' || var[0] == 'X')) var = var.substr(1);
    const std::string val = item.substr(eq + 1);
    if (val != "0" && val != "1") fail(Errc::bad_format, "assignment value must be 0 or 1: " + item);
    int v = 0;
    try {
      v = std::stoi(var);
    } catch (const std::exception&) {
      fail(Errc::bad_format, "bad variable index: " + item);
    }
    if (v < 1 || v > num_vars) fail(Errc::var_out_of_range, "variable " + var + " out of range");
    a.set(v, val == "1");
  }
  return a;
}

std::string assignment_string(const Assignment& a) {
  std::ostringstream out;
  for (int v = 1; v <= a.num_vars(); ++v) {
    if (v > 1) out << ',';
    out << v << '=' << (a.value(v) ? 1 : 0);
  }
  return out.str();
}

int domain_exit_code(Errc code) {
  switch (code) {
    case Errc::not_satisfying:
    case Errc::not_optimal:
    case Errc::not_monotone:
    case Errc::ambiguous_witness:
    case Errc::inconsistent_traversal:
      return kExitNo;
    default:
      return kExitError;
  }
}

MotionMode parse_mode(const std::string& mode) {
  if (mode == "parallel") return MotionMode::parallel;
  if (mode == "sequential") return MotionMode::sequential;
  if (mode == "monotone") return MotionMode::monotone;
  fail(Errc::bad_format, "unknown mode " + mode);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sat2mapf: compile 3-CNF formulas into distance-optimal grid MAPF instances,\n"
               "synthesize and check witness plans, and decide d*-feasibility exactly"};
  app.require_subcommand(1);

  int threads = 1;
  app.add_option("--threads", threads, "reserved; results are identical for any value")
      ->check(CLI::Range(1, 256));

  std::string cnf_path, out_prefix, instance_prefix, plan_path, out_path;
  std::string variant_name = "monotone", mode_name = "parallel", method = "monotone";
  std::string assign_text;
  bool solve = false, fallback = false, quick = false;
  int render_t = -1;
  long long max_states = OracleLimits{}.max_states;
  double max_seconds = 300.0;
  std::uint32_t seed = selftest::SelftestConfig{}.seed;

  CLI::App* reduce = app.add_subcommand("reduce", "compile a DIMACS CNF file into instance files");
  reduce->add_option("--cnf", cnf_path, "input DIMACS CNF file")->required();
  reduce->add_option("--variant", variant_name, "monotone or general")
      ->check(CLI::IsMember({"monotone", "general"}));
  reduce->add_option("--out", out_prefix, "output prefix for .map/.agents/.layout")->required();

  CLI::App* stats = app.add_subcommand("stats", "print instance size statistics for a formula");
  stats->add_option("--cnf", cnf_path, "input DIMACS CNF file")->required();
  stats->add_option("--variant", variant_name, "monotone or general")
      ->check(CLI::IsMember({"monotone", "general"}));

  CLI::App* witness = app.add_subcommand("witness", "synthesize a staged plan for an instance");
  witness->add_option("--instance", instance_prefix, "instance file prefix")->required();
  witness->add_option("--assign", assign_text, "assignment like 1=1,2=0 (unlisted variables true)");
  witness->add_flag("--solve", solve, "find an assignment by exhaustive search");
  witness->add_flag("--fallback", fallback, "emit the always-feasible monotone plan");
  witness->add_option("--out", out_path, "plan output file")->required();

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a plan against an instance");
  validate_cmd->add_option("--instance", instance_prefix, "instance file prefix")->required();
  validate_cmd->add_option("--plan", plan_path, "plan file")->required();
  validate_cmd->add_option("--mode", mode_name, "parallel, sequential, or monotone")
      ->check(CLI::IsMember({"parallel", "sequential", "monotone"}));

  CLI::App* extract = app.add_subcommand("extract", "decode a satisfying assignment from an optimal plan");
  extract->add_option("--instance", instance_prefix, "instance file prefix")->required();
  extract->add_option("--plan", plan_path, "plan file")->required();

  CLI::App* oracle = app.add_subcommand("oracle", "decide cost-d* feasibility exactly");
  oracle->add_option("--instance", instance_prefix, "instance file prefix")->required();
  oracle->add_option("--method", method, "monotone, descending, or astar")
      ->check(CLI::IsMember({"monotone", "descending", "astar"}));
  oracle->add_option("--mode", mode_name, "astar motion mode")
      ->check(CLI::IsMember({"parallel", "sequential", "monotone"}));
  oracle->add_option("--max-states", max_states, "state budget before reporting unknown");
  oracle->add_option("--max-seconds", max_seconds, "wall-clock budget before reporting unknown");
  oracle->add_option("--witness-out", out_path, "write the witness plan here when feasible");

  CLI::App* render = app.add_subcommand("render", "draw an instance (optionally at a plan timestep)");
  render->add_option("--instance", instance_prefix, "instance file prefix")->required();
  render->add_option("--plan", plan_path, "plan file");
  render->add_option("--t", render_t, "timestep to draw");

  CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the acceptance criteria sweep");
  selftest_cmd->add_option("--seed", seed, "seed for the randomized sweeps");
  selftest_cmd->add_flag("--quick", quick, "reduced sample sizes");
  selftest_cmd->add_option("--max-states", max_states, "descending-oracle state budget");
  selftest_cmd->add_option("--max-seconds", max_seconds, "descending-oracle per-instance budget");

  CLI11_PARSE(app, argc, argv);
  (void)threads;  // single-threaded implementation; accepted for compatibility

  try {
    if (*reduce) {
      const Formula f = parse_dimacs(slurp(cnf_path));
      const Variant variant = variant_name == "general" ? Variant::general : Variant::monotone;
      const auto [inst, layout] = detail::build_instance(f, variant);
      spit(out_prefix + ".map", write_map(inst.map));
      spit(out_prefix + ".agents", write_agents(inst));
      spit(out_prefix + ".layout", write_layout(layout));
      std::cout << "REDUCE n=" << inst.num_agents() << " V=" << inst.map.open_cells()
                << " dstar=" << d_star(inst) << '\n';
      return kExitYes;
    }

    if (*stats) {
      const Formula f = parse_dimacs(slurp(cnf_path));
      const Variant variant = variant_name == "general" ? Variant::general : Variant::monotone;
      const SizeStats s = size_stats(f, variant);
      std::cout << "STATS n=" << s.agents << " open_cells=" << s.open_cells << " width=" << s.width
                << " height=" << s.height << '\n';
      return kExitYes;
    }

    if (*witness) {
      const InstanceFiles files = read_instance_files(instance_prefix);
      const Formula f = formula_from_instance(files.instance);
      Plan plan;
      if (fallback) {
        plan = synth_feasible_monotone(files.instance, files.layout);
      } else {
        Assignment a;
        if (solve) {
          const auto found = brute_force_sat(f);
          if (!found) {
            std::cout << "WITNESS unsat=1\n";
            return kExitNo;
          }
          a = *found;
        } else if (!assign_text.empty()) {
          a = parse_assignment(assign_text, f.num_vars);
        } else {
          fail(Errc::bad_format, "need --assign, --solve, or --fallback");
        }
        plan = synth_optimal_plan(files.instance, files.layout, a);
      }
      spit(out_path, write_plan(plan));
      const ValidationReport report = validate(files.instance, plan, MotionMode::parallel);
      const long long dstar = d_star(files.instance);
      // A fallback plan is good when it is a valid monotone plan; an optimal
      // witness additionally has to hit d*.
      const bool ok = report.feasible && (fallback ? report.is_monotone : report.cost == dstar);
      std::cout << "WITNESS cost=" << report.cost << " dstar=" << dstar << " ok=" << (ok ? 1 : 0) << '\n';
      return kExitYes;
    }

    if (*validate_cmd) {
      const InstanceFiles files = read_instance_files(instance_prefix);
      const Plan plan = read_plan(slurp(plan_path));
      const MotionMode mode = parse_mode(mode_name);
      const ValidationReport report = validate(files.instance, plan, mode);
      std::cout << report_text(report);
      std::cout << result_line(report, d_star(files.instance)) << '\n';
      return report.ok_in(mode) ? kExitYes : kExitNo;
    }

    if (*extract) {
      const InstanceFiles files = read_instance_files(instance_prefix);
      const Plan plan = read_plan(slurp(plan_path));
      const Formula f = formula_from_instance(files.instance);
      const Assignment a = files.layout.variant == Variant::general
                               ? extract_assignment_general(files.instance, files.layout, plan)
                               : extract_assignment_monotone(files.instance, files.layout, plan);
      const bool sat = eval(f, a.padded(f.num_vars));
      std::cout << "EXTRACT assign=" << assignment_string(a) << " sat=" << (sat ? 1 : 0) << '\n';
      return sat ? kExitYes : kExitNo;
    }

    if (*oracle) {
      const InstanceFiles files = read_instance_files(instance_prefix);
      OracleVerdict verdict;
      if (method == "monotone") {
        verdict = monotone_dstar_feasible(files.instance);
      } else if (method == "descending") {
        verdict = descending_dstar_feasible(files.instance, OracleLimits{max_states, max_seconds});
      } else {
        const JointResult joint = joint_astar(files.instance, parse_mode(mode_name));
        verdict.feasible = joint.feasible && joint.min_cost == d_star(files.instance);
        verdict.explored = joint.explored;
        verdict.exhausted = true;
        if (verdict.feasible) verdict.witness = joint.plan;
      }
      std::cout << "ORACLE feasible="
                << (verdict.conclusive() ? (verdict.feasible ? "1" : "0") : "unknown")
                << " explored=" << verdict.explored << '\n';
      if (verdict.feasible && verdict.witness && !out_path.empty()) spit(out_path, write_plan(*verdict.witness));
      return verdict.feasible ? kExitYes : kExitNo;
    }

    if (*render) {
      const InstanceFiles files = read_instance_files(instance_prefix);
      if (plan_path.empty()) {
        std::cout << render_instance(files.instance);
      } else {
        const Plan plan = read_plan(slurp(plan_path));
        std::cout << render_instance(files.instance, &plan, render_t < 0 ? 0 : render_t);
      }
      return kExitYes;
    }

    if (*selftest_cmd) {
      selftest::SelftestConfig cfg;
      cfg.seed = seed;
      cfg.quick = quick;
      cfg.max_states = max_states;
      cfg.per_instance_seconds = max_seconds;
      const auto results = selftest::run_acceptance(cfg);
      std::cout << selftest::format_report(results);
      for (const auto& r : results)
        if (!r.pass) return kExitNo;
      return kExitYes;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return domain_exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
