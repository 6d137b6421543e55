#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "imli/data.hpp"
#include "imli/discretize.hpp"
#include "imli/learner.hpp"
#include "imli/rules.hpp"

namespace imli {

struct Evaluation {
  double accuracy = 0;  // fraction in [0,1]
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

Evaluation evaluate(const Rule &rule, const BoolMatrix &X, const Labels &y);

struct Grid {
  std::vector<Weight> lambdas{5, 10};
  std::vector<std::size_t> ks{1, 2, 3};
  std::vector<RuleForm> forms{RuleForm::cnf, RuleForm::dnf};
  std::size_t partitions = 0;  // 0 = auto per training set

  std::size_t size() const { return lambdas.size() * ks.size() * forms.size(); }
};

struct HarnessOptions {
  SolverOptions solver;
  BinarizeOptions binarize;
  double solve_time_limit = 1000;
  double run_time_limit = 1000;
  std::size_t jobs = 1;
  bool select_by_validation = false;
  bool stratify = false;
  std::uint64_t seed = 42;
};

struct GridPointReport {
  Weight lambda = 0;
  std::size_t k = 0;
  RuleForm form = RuleForm::cnf;
  double test_accuracy = 0;        // percent, mean over repetitions
  double validation_accuracy = 0;  // percent, mean over folds and repetitions
  double train_seconds = 0;        // mean per-fold wall time
  double rule_size = 0;            // mean size of the holdout model
  std::string rule_text;           // holdout model of the last repetition
  std::size_t completed_runs = 0;
  std::size_t failed_runs = 0;
  std::vector<double> fold_train_seconds;
};

struct EvalReport {
  std::vector<GridPointReport> points;
  std::optional<std::size_t> selected;
  std::size_t repetitions = 0;
  std::size_t folds = 0;
  bool select_by_validation = false;
};

// Per repetition: fresh holdout, k-fold CV on the remainder for every grid
// point (binarization refit on each training fold), then a model trained on
// the whole CV pool is scored on the holdout.  Throws SolverError if every
// run failed.
EvalReport grid_search(const RawDataset &data, const Grid &grid, const SplitSpec &spec,
                       const HarnessOptions &opts);

std::string report_text(const EvalReport &r);
std::string report_json(const EvalReport &r);

enum class SweepAxis { lambda, partitions };

struct SweepRow {
  double x = 0;
  bool ok = false;
  std::size_t rule_size = 0;
  double train_seconds = 0;
  double train_accuracy = 0;       // percent
  double validation_accuracy = 0;  // percent
  std::size_t queries = 0;
  double mean_soft_per_query = 0;
  std::size_t total_soft = 0;
  std::string error;
};

// Trains on the CV pool of one split and validates on its holdout, once per
// value of the varied parameter.
std::vector<SweepRow> sweep(const RawDataset &data, SweepAxis axis,
                            const std::vector<double> &values, const TrainConfig &base,
                            const BinarizeOptions &bin, const SplitSpec &spec);

std::string sweep_csv(SweepAxis axis, const std::vector<SweepRow> &rows);

// Runs tasks on up to `jobs` threads; exceptions stay inside the tasks.
void run_parallel(std::vector<std::function<void()>> &tasks, std::size_t jobs);

}  // namespace imli
