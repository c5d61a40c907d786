#pragma once

#include <random>
#include <vector>

#include "sat2mapf/formula.hpp"

namespace sat2mapf {

// Uniform draw from [0, n) using raw mt19937 outputs with rejection, so the
// stream is identical on every platform (std::uniform_int_distribution is not
// specified bit-exactly).
inline int rng_below(std::mt19937& rng, int n) {
  const std::uint32_t bound = static_cast<std::uint32_t>(n);
  const std::uint32_t limit = std::mt19937::max() - std::mt19937::max() % bound;
  std::uint32_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return static_cast<int>(draw % bound);
}

// Random 3-CNF: M clauses of width 1..3 over N variables, both sampled up to
// the given bounds. Drawn variables may repeat within a clause and some
// variables may not occur at all.
inline Formula random_formula(std::mt19937& rng, int max_vars, int max_clauses) {
  Formula f;
  f.num_vars = 1 + rng_below(rng, max_vars);
  const int m = 1 + rng_below(rng, max_clauses);
  for (int j = 0; j < m; ++j) {
    Clause c;
    const int width = 1 + rng_below(rng, 3);
    for (int s = 0; s < width; ++s)
      c.literals.push_back(Literal{1 + rng_below(rng, f.num_vars), rng_below(rng, 2) == 0});
    f.clauses.push_back(std::move(c));
  }
  return f;
}

// Every 3-CNF formula over `num_vars` variables with at most `max_clauses`
// clauses, canonical up to clause order and literal order within a clause
// (clauses and formulas are enumerated as non-decreasing index multisets).
// The declared variable count of each formula is its largest occurring
// variable.
inline std::vector<Formula> canonical_formulas(int num_vars, int max_clauses) {
  // Literal universe in index order: x1, !x1, x2, !x2, ...
  std::vector<Literal> universe;
  for (int v = 1; v <= num_vars; ++v) {
    universe.push_back(Literal{v, true});
    universe.push_back(Literal{v, false});
  }

  std::vector<Clause> clause_universe;
  const int u = static_cast<int>(universe.size());
  for (int a = 0; a < u; ++a) {
    clause_universe.push_back(Clause{{universe[static_cast<size_t>(a)]}});
    for (int b = a; b < u; ++b) {
      clause_universe.push_back(Clause{{universe[static_cast<size_t>(a)], universe[static_cast<size_t>(b)]}});
      for (int c = b; c < u; ++c)
        clause_universe.push_back(
            Clause{{universe[static_cast<size_t>(a)], universe[static_cast<size_t>(b)], universe[static_cast<size_t>(c)]}});
    }
  }

  std::vector<Formula> out;
  std::vector<int> chosen;
  auto emit = [&] {
    Formula f;
    for (int idx : chosen) {
      const Clause& c = clause_universe[static_cast<size_t>(idx)];
      f.clauses.push_back(c);
      for (const Literal& lit : c.literals) f.num_vars = std::max(f.num_vars, lit.var);
    }
    out.push_back(std::move(f));
  };
  auto rec = [&](auto&& self, int from) -> void {
    if (!chosen.empty()) emit();
    if (static_cast<int>(chosen.size()) == max_clauses) return;
    for (int idx = from; idx < static_cast<int>(clause_universe.size()); ++idx) {
      chosen.push_back(idx);
      self(self, idx);
      chosen.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace sat2mapf
