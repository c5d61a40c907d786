#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sat2mapf/formula.hpp"
#include "sat2mapf/formula_gen.hpp"

using namespace sat2mapf;

namespace {

// The running example: phi = (!x | !y | z) & (x | !y | z) & (x | y | !z).
const char* kFigureDimacs = "p cnf 3 3\n-1 -2 3 0\n1 -2 3 0\n1 2 -3 0\n";

Assignment make_assignment(std::initializer_list<bool> values) {
  return Assignment(std::vector<bool>(values));
}

// Test-local exhaustive enumeration, independent of brute_force_sat.
std::vector<Assignment> all_assignments(int num_vars) {
  std::vector<Assignment> out;
  for (unsigned mask = 0; mask < (1u << num_vars); ++mask) {
    std::vector<bool> vals(static_cast<size_t>(num_vars));
    for (int v = 1; v <= num_vars; ++v) vals[static_cast<size_t>(v - 1)] = (mask >> (num_vars - v)) & 1u;
    out.push_back(Assignment(std::move(vals)));
  }
  return out;
}

}  // namespace

TEST_CASE("parse_dimacs accepts the figure formula") {
  const Formula f = parse_dimacs(kFigureDimacs);
  REQUIRE(f.num_vars == 3);
  REQUIRE(f.num_clauses() == 3);
  CHECK(f.clauses[0].literals == std::vector<Literal>{{1, false}, {2, false}, {3, true}});
  CHECK(f.clauses[1].literals == std::vector<Literal>{{1, true}, {2, false}, {3, true}});
  CHECK(f.clauses[2].literals == std::vector<Literal>{{1, true}, {2, true}, {3, false}});
}

TEST_CASE("parse_dimacs smallest legal input") {
  const Formula f = parse_dimacs("p cnf 1 1\n1 0\n");
  REQUIRE(f.num_vars == 1);
  REQUIRE(f.num_clauses() == 1);
  CHECK(f.clauses[0].literals == std::vector<Literal>{{1, true}});
}

TEST_CASE("parse_dimacs error paths") {
  auto code_of = [](const char* text) {
    try {
      parse_dimacs(text);
    } catch (const Error& e) {
      return e.code();
    }
    FAIL("expected parse error");
    return Errc::bad_format;
  };
  CHECK(code_of("p cnf 1 1\n1 1 1 1 0\n") == Errc::clause_too_large);
  CHECK(code_of("p cnf 1 1\n0\n") == Errc::empty_clause);
  CHECK(code_of("p dnf 1 1\n1 0\n") == Errc::malformed_header);
  CHECK(code_of("1 0\n") == Errc::malformed_header);
  CHECK(code_of("p cnf 1 0\n") == Errc::empty_formula);
  CHECK(code_of("p cnf 1 2\n1 0\n") == Errc::count_mismatch);
  CHECK(code_of("p cnf 1 1\n1 0\n-1 0\n") == Errc::count_mismatch);
  CHECK(code_of("p cnf 2 1\n3 0\n") == Errc::var_out_of_range);
  CHECK(code_of("p cnf 1 1\n1\n") == Errc::count_mismatch);
}

TEST_CASE("parse_dimacs skips comments") {
  const Formula f = parse_dimacs("c a comment\nc another\np cnf 2 1\nc inline\n1 -2 0\n");
  REQUIRE(f.num_clauses() == 1);
  CHECK(f.clauses[0].literals == std::vector<Literal>{{1, true}, {2, false}});
}

TEST_CASE("eval on the figure formula") {
  const Formula f = parse_dimacs(kFigureDimacs);
  CHECK(eval(f, make_assignment({true, false, true})));   // x=T, y=F, z=T
  CHECK_FALSE(eval(f, make_assignment({false, true, false})));
}

TEST_CASE("eval forced-false and tautological clauses") {
  const Formula contradiction = parse_dimacs("p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n");
  CHECK_FALSE(eval(contradiction, make_assignment({true})));
  CHECK_FALSE(eval(contradiction, make_assignment({false})));

  const Formula tautology = parse_dimacs("p cnf 2 1\n1 -1 2 0\n");
  for (const Assignment& a : all_assignments(2)) CHECK(eval(tautology, a));
}

TEST_CASE("eval rejects partial assignments") {
  const Formula f = parse_dimacs(kFigureDimacs);
  CHECK_THROWS_AS(eval(f, make_assignment({true})), Error);
}

TEST_CASE("brute_force_sat finds the lexicographically first witness") {
  const Formula f = parse_dimacs(kFigureDimacs);
  const auto witness = brute_force_sat(f);
  REQUIRE(witness.has_value());
  CHECK(eval(f, *witness));

  // Independent enumeration: first satisfying assignment in (v1,v2,v3) order.
  std::optional<Assignment> expected;
  for (const Assignment& a : all_assignments(3)) {
    if (eval(f, a)) {
      expected = a;
      break;
    }
  }
  REQUIRE(expected.has_value());
  CHECK(*witness == *expected);
  CHECK(*witness == make_assignment({false, false, false}));
}

TEST_CASE("brute_force_sat on forced formulas") {
  CHECK_FALSE(brute_force_sat(parse_dimacs("p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n")).has_value());
  const auto unit = brute_force_sat(parse_dimacs("p cnf 1 1\n1 0\n"));
  REQUIRE(unit.has_value());
  CHECK(*unit == make_assignment({true}));
}

TEST_CASE("brute_force_sat variable cap") {
  Formula f;
  f.num_vars = 30;
  Clause c;
  c.literals = {{30, true}};
  f.clauses = {c};
  CHECK_THROWS_AS(brute_force_sat(f), Error);
}

TEST_CASE("serialize-parse round trip on random formulas") {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Formula f = random_formula(rng, 6, 8);
    const Formula again = parse_dimacs(to_dimacs(f));
    CHECK(f == again);
  }
}

TEST_CASE("brute_force_sat agrees with exhaustive eval") {
  std::mt19937 rng(11);
  for (int i = 0; i < 120; ++i) {
    const Formula f = random_formula(rng, 4, 5);
    bool any = false;
    for (const Assignment& a : all_assignments(f.num_vars)) any = any || eval(f, a);
    CHECK(brute_force_sat(f).has_value() == any);
  }
}

TEST_CASE("eval is monotone under clause removal") {
  std::mt19937 rng(13);
  for (int i = 0; i < 100; ++i) {
    const Formula f = random_formula(rng, 4, 6);
    Formula sub = f;
    // Drop a random subset of clauses, preserving order.
    std::vector<Clause> kept;
    for (const Clause& c : f.clauses)
      if (rng_below(rng, 2) == 0) kept.push_back(c);
    if (kept.empty()) kept.push_back(f.clauses[0]);
    sub.clauses = kept;
    for (const Assignment& a : all_assignments(f.num_vars))
      if (eval(f, a)) CHECK(eval(sub, a));
  }
}
