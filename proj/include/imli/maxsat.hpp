#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "imli/encoder.hpp"

namespace imli {

enum class SolveStatus { optimum, best_found, infeasible, timeout_no_solution, solver_error };

const char *to_string(SolveStatus s);

struct SolveOutcome {
  SolveStatus status = SolveStatus::solver_error;
  std::optional<Weight> weight;
  Assignment assignment;  // empty when no model is known
  double wall_time = 0;
  std::string message;

  bool has_solution() const { return !assignment.empty(); }
};

// ---------------------------------------------------------------------------
// DIMACS WCNF

enum class WcnfDialect { classic, modern };

struct WcnfDocument {
  std::size_t num_vars = 0;
  Weight top = 1;
  std::vector<WeightedClause> soft;
  std::vector<Clause> hard;
};

WcnfDocument to_document(const MaxSatQuery &q);

// Classic: "p wcnf <vars> <clauses> <top>", soft lines first, hard lines
// carrying weight top.  Modern: "h <lits> 0" for hard, "<w> <lits> 0" for
// soft, no header.  Throws UsageError if top overflows 64 bits.
std::string to_wcnf(const MaxSatQuery &q, WcnfDialect dialect = WcnfDialect::classic);

// Reads either dialect.  Throws DataError on malformed input.
WcnfDocument parse_wcnf(const std::string &text);

// Recognises "s OPTIMUM FOUND" / "s SATISFIABLE" / "s UNSATISFIABLE" /
// "s UNKNOWN", last "o <w>" wins, "v" lines as signed literals (possibly
// over several lines) or a single 0/1 bit string.  When num_vars is
// nonzero the model must cover exactly that many variables.
SolveOutcome parse_solver_output(const std::string &text, std::size_t num_vars = 0);

// ---------------------------------------------------------------------------
// Backends

// Exact: enumerates all 2^(k m') feature assignments.  Throws UsageError
// when that count exceeds budget.
SolveOutcome solve_bruteforce(const MaxSatQuery &q, std::uint64_t budget = 1ULL << 22);

struct LocalSearchOptions {
  // 0 picks 20 flips per soft clause (at least 2000).
  std::uint64_t max_flips = 0;
  std::uint64_t seed = 1;
  double time_limit = 60;
  double noise = 0.2;
  // Restart from the best assignment after this many flips without an
  // improvement; 0 picks max_flips / 10.
  std::uint64_t restart_after = 0;
};

// Anytime weighted local search over the feature variables; noise and
// auxiliary variables are always the implied completion, so every returned
// assignment is hard-feasible.
SolveOutcome solve_localsearch(const MaxSatQuery &q, const LocalSearchOptions &opts = {});

struct ExternalOptions {
  // "{}" is replaced by the WCNF path; without it the path is appended.
  std::string command;
  double time_limit = 1000;
  WcnfDialect dialect = WcnfDialect::classic;
};

SolveOutcome solve_external(const MaxSatQuery &q, const ExternalOptions &opts);

}  // namespace imli
