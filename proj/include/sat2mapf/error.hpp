#pragma once

#include <stdexcept>
#include <string>

namespace sat2mapf {

enum class Errc {
  // formula
  malformed_header,
  clause_too_large,
  empty_clause,
  var_out_of_range,
  count_mismatch,
  empty_formula,
  partial_assignment,
  too_many_variables,
  // gridmap
  source_blocked,
  out_of_bounds,
  endpoint_blocked,
  bad_header,
  ragged_rows,
  illegal_character,
  // reduction
  unreachable_target,
  // witness
  not_satisfying,
  foreign_instance,
  not_optimal,
  not_monotone,
  ambiguous_witness,
  inconsistent_traversal,
  // validator
  agent_set_mismatch,
  trajectory_length_mismatch,
  // oracle
  too_many_agents,
  too_large,
  // cli / io
  bad_timestep,
  bad_format,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_header: return "MalformedHeader";
    case Errc::clause_too_large: return "ClauseTooLarge";
    case Errc::empty_clause: return "EmptyClause";
    case Errc::var_out_of_range: return "VarOutOfRange";
    case Errc::count_mismatch: return "CountMismatch";
    case Errc::empty_formula: return "EmptyFormula";
    case Errc::partial_assignment: return "PartialAssignment";
    case Errc::too_many_variables: return "TooManyVariables";
    case Errc::source_blocked: return "SourceBlocked";
    case Errc::out_of_bounds: return "OutOfBounds";
    case Errc::endpoint_blocked: return "EndpointBlocked";
    case Errc::bad_header: return "BadHeader";
    case Errc::ragged_rows: return "RaggedRows";
    case Errc::illegal_character: return "IllegalCharacter";
    case Errc::unreachable_target: return "UnreachableTarget";
    case Errc::not_satisfying: return "NotSatisfying";
    case Errc::foreign_instance: return "ForeignInstance";
    case Errc::not_optimal: return "NotOptimal";
    case Errc::not_monotone: return "NotMonotone";
    case Errc::ambiguous_witness: return "AmbiguousWitness";
    case Errc::inconsistent_traversal: return "InconsistentTraversal";
    case Errc::agent_set_mismatch: return "AgentSetMismatch";
    case Errc::trajectory_length_mismatch: return "TrajectoryLengthMismatch";
    case Errc::too_many_agents: return "TooManyAgents";
    case Errc::too_large: return "TooLarge";
    case Errc::bad_timestep: return "BadTimestep";
    case Errc::bad_format: return "BadFormat";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace sat2mapf
