#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imli/discretize.hpp"
#include "imli/encoder.hpp"
#include "imli/maxsat.hpp"
#include "imli/rules.hpp"

namespace imli {

enum class Backend { bruteforce, localsearch, external };

const char *to_string(Backend b);
Backend backend_from_string(const std::string &s);

struct SolverOptions {
  Backend backend = Backend::localsearch;
  std::string command;  // external only
  WcnfDialect dialect = WcnfDialect::classic;
  std::uint64_t bruteforce_budget = 1ULL << 22;
  std::uint64_t max_flips = 0;
  double noise = 0.2;
};

struct TrainConfig {
  std::size_t k = 1;
  Weight lambda = 10;
  std::size_t partitions = 0;  // 0 = auto
  RuleForm form = RuleForm::cnf;
  SolverOptions solver;
  std::uint64_t seed = 42;
  double time_limit = 1000;  // per solve, seconds
  double run_time_limit = 0;  // whole run, seconds; 0 = none
  bool stratify = false;

  void validate() const;
};

// Dispatches to the configured backend.
SolveOutcome solve(const MaxSatQuery &q, const SolverOptions &opts, double time_limit,
                   std::uint64_t seed);

// Literal j is in clause l iff the assignment sets b(j,l).
Rule extract_rule(const Assignment &sigma, const VarTable &vars,
                  const std::vector<LiteralMeta> &meta, std::size_t k);

// Within each CNF clause keep only the weakest threshold per sibling group:
// the smallest tau for >=, the largest for <.  Equivalent on every input.
Rule remove_redundant_literals(const Rule &rule);

struct PartitionTrace {
  std::size_t index = 0;  // 1-based
  std::size_t samples = 0;
  QueryStats query;
  SolveStatus status = SolveStatus::optimum;
  Weight weight = 0;
  std::size_t raw_rule_size = 0;
  std::size_t rule_size = 0;
  double solve_seconds = 0;
  bool best_found = false;
};

struct TrainResult {
  Rule rule;
  std::vector<PartitionTrace> trace;
  std::size_t partitions = 0;
  double train_seconds = 0;
  // Set when the whole-run limit stopped training early.
  bool cut_off = false;
};

// Incremental training: partition i's query is biased toward R_{i-1}.
// Throws SolverError (partition index in the message) when a solve fails,
// TimeoutError when a solve times out without any solution.
TrainResult train(const BinarizedDataset &data, const TrainConfig &cfg);

std::string trace_json(const TrainResult &result);

}  // namespace imli
