#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sat2mapf/error.hpp"

namespace sat2mapf {

// A literal of a 3-CNF formula. Variables are 1-based DIMACS indices.
struct Literal {
  int var = 0;
  bool positive = true;

  bool operator==(const Literal&) const = default;
};

// Slot order inside a clause is significant: it fixes the door order of the
// clause gadget. Duplicate and complementary literals are allowed.
struct Clause {
  std::vector<Literal> literals;

  bool operator==(const Clause&) const = default;
  int size() const { return static_cast<int>(literals.size()); }
};

struct Formula {
  int num_vars = 0;
  std::vector<Clause> clauses;

  bool operator==(const Formula&) const = default;
  int num_clauses() const { return static_cast<int>(clauses.size()); }
};

// Total truth assignment for variables 1..n.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::vector<bool> values) : values_(std::move(values)) {}

  static Assignment all_true(int num_vars) {
    return Assignment(std::vector<bool>(static_cast<size_t>(num_vars), true));
  }
  static Assignment all_false(int num_vars) {
    return Assignment(std::vector<bool>(static_cast<size_t>(num_vars), false));
  }

  int num_vars() const { return static_cast<int>(values_.size()); }

  bool value(int var) const {
    if (var < 1 || var > num_vars()) fail(Errc::partial_assignment, "variable " + std::to_string(var) + " unassigned");
    return values_[static_cast<size_t>(var - 1)];
  }

  void set(int var, bool v) {
    if (var < 1) fail(Errc::var_out_of_range, "variable index must be >= 1");
    if (var > num_vars()) values_.resize(static_cast<size_t>(var), false);
    values_[static_cast<size_t>(var - 1)] = v;
  }

  // Copy extended to `num_vars` variables; new variables default to true.
  Assignment padded(int num_vars) const {
    Assignment out = *this;
    while (out.num_vars() < num_vars) out.set(out.num_vars() + 1, true);
    return out;
  }

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<bool> values_;
};

namespace detail {

inline void check_formula(const Formula& f) {
  if (f.num_vars < 1) fail(Errc::malformed_header, "formula must have at least one variable");
  if (f.clauses.empty()) fail(Errc::empty_formula, "formula must have at least one clause");
  for (const Clause& c : f.clauses) {
    if (c.literals.empty()) fail(Errc::empty_clause, "clause with no literals");
    if (c.size() > 3) fail(Errc::clause_too_large, "clause with more than 3 literals");
    for (const Literal& lit : c.literals) {
      if (lit.var < 1 || lit.var > f.num_vars)
        fail(Errc::var_out_of_range, "literal variable " + std::to_string(lit.var) + " out of range");
    }
  }
}

}  // namespace detail

// DIMACS CNF: optional `c` comment lines, one `p cnf N M` header, clauses as
// 0-terminated integer lists. A `%` token ends the input (SATLIB convention).
inline Formula parse_dimacs(std::istream& in) {
  std::string line;
  Formula f;
  bool have_header = false;
  long long declared_clauses = 0;

  // header, skipping comments
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    if (line[0] == 'p') {
      std::istringstream hs(line);
      std::string p, fmt;
      long long n = -1, m = -1;
      hs >> p >> fmt >> n >> m;
      std::string rest;
      if (p != "p" || fmt != "cnf" || hs.fail() || (hs >> rest && !rest.empty()))
        fail(Errc::malformed_header, "expected `p cnf N M`, got: " + line);
      if (m < 1) fail(Errc::empty_formula, "declared clause count is " + std::to_string(m));
      if (n < 1) fail(Errc::malformed_header, "declared variable count is " + std::to_string(n));
      f.num_vars = static_cast<int>(n);
      declared_clauses = m;
      have_header = true;
      break;
    }
    fail(Errc::malformed_header, "expected header before clause data: " + line);
  }
  if (!have_header) fail(Errc::malformed_header, "missing `p cnf` header");

  Clause current;
  std::string tok;
  while (in >> tok) {
    if (tok == "%") break;
    if (tok == "c") {  // mid-file comment line
      std::getline(in, line);
      continue;
    }
    long long lit = 0;
    try {
      size_t pos = 0;
      lit = std::stoll(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(Errc::bad_format, "unexpected token in clause data: " + tok);
    }
    if (lit == 0) {
      if (current.literals.empty()) fail(Errc::empty_clause, "clause " + std::to_string(f.clauses.size() + 1) + " is empty");
      f.clauses.push_back(std::move(current));
      current = Clause{};
      continue;
    }
    const long long v = lit > 0 ? lit : -lit;
    if (v > f.num_vars) fail(Errc::var_out_of_range, "literal " + std::to_string(lit) + " exceeds declared variable count");
    if (current.size() >= 3) fail(Errc::clause_too_large, "clause " + std::to_string(f.clauses.size() + 1) + " has more than 3 literals");
    current.literals.push_back(Literal{static_cast<int>(v), lit > 0});
  }
  if (!current.literals.empty())
    fail(Errc::count_mismatch, "last clause is not 0-terminated");
  if (static_cast<long long>(f.clauses.size()) != declared_clauses)
    fail(Errc::count_mismatch, "declared " + std::to_string(declared_clauses) + " clauses, found " +
                                   std::to_string(f.clauses.size()));
  detail::check_formula(f);
  return f;
}

inline Formula parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

// Emits `p cnf N M`, then one clause per line, 0-terminated, no comments.
inline std::string to_dimacs(const Formula& f) {
  std::ostringstream out;
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const Clause& c : f.clauses) {
    for (const Literal& lit : c.literals) out << (lit.positive ? lit.var : -lit.var) << ' ';
    out << "0\n";
  }
  return out.str();
}

inline bool eval(const Clause& c, const Assignment& a) {
  for (const Literal& lit : c.literals)
    if (a.value(lit.var) == lit.positive) return true;
  return false;
}

// True iff every clause contains a literal made true by `a`.
inline bool eval(const Formula& f, const Assignment& a) {
  if (a.num_vars() < f.num_vars)
    fail(Errc::partial_assignment, "assignment covers " + std::to_string(a.num_vars()) + " of " +
                                       std::to_string(f.num_vars) + " variables");
  for (const Clause& c : f.clauses)
    if (!eval(c, a)) return false;
  return true;
}

// Exhaustive SAT check, lexicographically first witness over (v1,...,vN) with
// false < true. Independent oracle for the reduction's equivalence tests.
inline std::optional<Assignment> brute_force_sat(const Formula& f, int max_vars = 24) {
  detail::check_formula(f);
  if (f.num_vars > max_vars)
    fail(Errc::too_many_variables, std::to_string(f.num_vars) + " variables exceeds cap " + std::to_string(max_vars));
  const int n = f.num_vars;
  const std::uint64_t total = 1ull << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::vector<bool> vals(static_cast<size_t>(n));
    for (int v = 1; v <= n; ++v) vals[static_cast<size_t>(v - 1)] = (mask >> (n - v)) & 1u;
    Assignment a(std::move(vals));
    if (eval(f, a)) return a;
  }
  return std::nullopt;
}

}  // namespace sat2mapf
