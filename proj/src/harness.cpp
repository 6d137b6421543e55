#include "imli/harness.hpp"

#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace imli {

Evaluation evaluate(const Rule &rule, const BoolMatrix &X, const Labels &y) {
  if (y.empty()) throw DataError("cannot evaluate on an empty label set");
  if (X.rows() != y.size()) throw DataError("feature matrix and labels disagree in length");
  Evaluation e;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool pred = predict(rule, {X.row(i), X.cols()});
    if (pred && y[i]) ++e.tp;
    else if (pred && !y[i]) ++e.fp;
    else if (!pred && !y[i]) ++e.tn;
    else ++e.fn;
  }
  e.accuracy = static_cast<double>(e.tp + e.tn) / static_cast<double>(y.size());
  return e;
}

void run_parallel(std::vector<std::function<void()>> &tasks, std::size_t jobs) {
  jobs = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
  if (jobs == 1) {
    for (auto &t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) tasks[i]();
    });
  }
}

namespace {

struct RunOutput {
  bool ok = false;
  double seconds = 0;
  double accuracy = 0;
  std::size_t rule_size = 0;
  std::string rule_text;
  std::string error;
};

RunOutput train_and_score(const RawDataset &data, const std::vector<std::size_t> &train_idx,
                          const std::vector<std::size_t> &eval_idx, const TrainConfig &cfg,
                          const BinarizeOptions &bin) {
  RunOutput out;
  try {
    const RawDataset train_raw = select_rows(data, train_idx);
    const Binarizer enc = Binarizer::fit(train_raw, bin);
    const BinarizedDataset train_bin = enc.transform(train_raw);
    const BinarizedDataset eval_bin = enc.transform(select_rows(data, eval_idx));
    const TrainResult res = train(train_bin, cfg);
    out.seconds = res.train_seconds;
    out.accuracy = evaluate(res.rule, eval_bin.X, eval_bin.y).accuracy;
    out.rule_size = rule_size(res.rule);
    out.rule_text = format_rule(res.rule);
    out.ok = true;
  } catch (const std::exception &e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

EvalReport grid_search(const RawDataset &data, const Grid &grid, const SplitSpec &spec,
                       const HarnessOptions &opts) {
  if (grid.size() == 0) throw UsageError("parameter grid is empty");
  if (spec.repetitions < 1) throw UsageError("at least one repetition is required");

  struct Point {
    Weight lambda;
    std::size_t k;
    RuleForm form;
  };
  std::vector<Point> points;
  for (RuleForm f : grid.forms)
    for (std::size_t k : grid.ks)
      for (Weight l : grid.lambdas) points.push_back({l, k, f});

  std::vector<Split> splits;
  for (std::size_t r = 0; r < spec.repetitions; ++r)
    splits.push_back(split_and_fold(data.num_rows(), spec, r));

  const std::size_t R = spec.repetitions, P = points.size(), F = spec.folds;
  // Slot layout: [rep][point][fold 0..F-1, F = holdout model].
  std::vector<RunOutput> runs(R * P * (F + 1));
  auto slot = [&](std::size_t r, std::size_t p, std::size_t f) {
    return (r * P + p) * (F + 1) + f;
  };

  std::vector<std::function<void()>> tasks;
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t p = 0; p < P; ++p) {
      TrainConfig cfg;
      cfg.k = points[p].k;
      cfg.lambda = points[p].lambda;
      cfg.form = points[p].form;
      cfg.partitions = grid.partitions;
      cfg.solver = opts.solver;
      cfg.seed = mix_seed(opts.seed, r);
      cfg.time_limit = opts.solve_time_limit;
      cfg.run_time_limit = opts.run_time_limit;
      cfg.stratify = opts.stratify;
      for (std::size_t f = 0; f <= F; ++f) {
        tasks.emplace_back([&, r, p, f, cfg] {
          const Split &s = splits[r];
          runs[slot(r, p, f)] =
              f < F ? train_and_score(data, s.folds[f].train, s.folds[f].validation, cfg,
                                      opts.binarize)
                    : train_and_score(data, s.pool, s.holdout, cfg, opts.binarize);
        });
      }
    }
  }
  run_parallel(tasks, opts.jobs);

  EvalReport report;
  report.repetitions = R;
  report.folds = F;
  report.select_by_validation = opts.select_by_validation;
  bool any_ok = false;
  for (std::size_t p = 0; p < P; ++p) {
    GridPointReport g;
    g.lambda = points[p].lambda;
    g.k = points[p].k;
    g.form = points[p].form;
    double val_sum = 0, test_sum = 0, size_sum = 0, time_sum = 0;
    std::size_t val_n = 0, test_n = 0;
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t f = 0; f <= F; ++f) {
        const RunOutput &o = runs[slot(r, p, f)];
        if (!o.ok) {
          ++g.failed_runs;
          continue;
        }
        ++g.completed_runs;
        if (f < F) {
          val_sum += o.accuracy;
          time_sum += o.seconds;
          g.fold_train_seconds.push_back(o.seconds);
          ++val_n;
        } else {
          test_sum += o.accuracy;
          size_sum += static_cast<double>(o.rule_size);
          g.rule_text = o.rule_text;
          ++test_n;
        }
      }
    }
    if (val_n) {
      g.validation_accuracy = 100.0 * val_sum / static_cast<double>(val_n);
      g.train_seconds = time_sum / static_cast<double>(val_n);
    }
    if (test_n) {
      g.test_accuracy = 100.0 * test_sum / static_cast<double>(test_n);
      g.rule_size = size_sum / static_cast<double>(test_n);
    }
    any_ok = any_ok || g.completed_runs > 0;
    const bool eligible = opts.select_by_validation ? val_n > 0 : test_n > 0;
    if (eligible) {
      const double score = opts.select_by_validation ? g.validation_accuracy : g.test_accuracy;
      if (!report.selected) {
        report.selected = p;
      } else {
        const auto &best = report.points[*report.selected];
        const double best_score =
            opts.select_by_validation ? best.validation_accuracy : best.test_accuracy;
        if (score > best_score) report.selected = p;
      }
    }
    report.points.push_back(std::move(g));
  }
  if (!any_ok) {
    std::string why;
    for (const auto &o : runs)
      if (!o.error.empty()) {
        why = o.error;
        break;
      }
    throw SolverError("every run failed; first error: " + why);
  }
  return report;
}

std::string report_text(const EvalReport &r) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-3s %-7s %9s %9s %10s %9s %s\n", "form", "k", "lambda",
                "test%", "valid%", "train_s", "size", "runs");
  os << line;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto &g = r.points[i];
    std::snprintf(line, sizeof line, "%-4s %-3zu %-7llu %9.2f %9.2f %10.4f %9.2f %zu/%zu%s\n",
                  to_string(g.form), g.k, static_cast<unsigned long long>(g.lambda),
                  g.test_accuracy, g.validation_accuracy, g.train_seconds, g.rule_size,
                  g.completed_runs, g.completed_runs + g.failed_runs,
                  r.selected && *r.selected == i ? "  *" : "");
    os << line;
  }
  if (r.selected) {
    os << "\nselected by " << (r.select_by_validation ? "validation" : "test")
       << " accuracy over " << r.repetitions << " repetition(s) of " << r.folds
       << "-fold CV:\n"
       << r.points[*r.selected].rule_text << '\n';
  }
  return os.str();
}

std::string report_json(const EvalReport &r) {
  nlohmann::json j;
  j["repetitions"] = r.repetitions;
  j["folds"] = r.folds;
  j["select_by"] = r.select_by_validation ? "validation" : "test";
  j["points"] = nlohmann::json::array();
  for (const auto &g : r.points) {
    j["points"].push_back({{"form", to_string(g.form)},
                           {"k", g.k},
                           {"lambda", g.lambda},
                           {"test_accuracy", g.test_accuracy},
                           {"validation_accuracy", g.validation_accuracy},
                           {"train_seconds", g.train_seconds},
                           {"fold_train_seconds", g.fold_train_seconds},
                           {"rule_size", g.rule_size},
                           {"rule", g.rule_text},
                           {"completed_runs", g.completed_runs},
                           {"failed_runs", g.failed_runs}});
  }
  if (r.selected) {
    j["selected"] = *r.selected;
  } else {
    j["selected"] = nullptr;
  }
  return j.dump(2);
}

std::vector<SweepRow> sweep(const RawDataset &data, SweepAxis axis,
                            const std::vector<double> &values, const TrainConfig &base,
                            const BinarizeOptions &bin, const SplitSpec &spec) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) throw UsageError("sweep values must be ascending");

  const Split split = split_and_fold(data.num_rows(), spec, 0);
  const RawDataset train_raw = select_rows(data, split.pool);
  const Binarizer enc = Binarizer::fit(train_raw, bin);
  const BinarizedDataset train_bin = enc.transform(train_raw);
  const BinarizedDataset val_bin = enc.transform(select_rows(data, split.holdout));

  std::vector<SweepRow> rows;
  for (double x : values) {
    SweepRow row;
    row.x = x;
    TrainConfig cfg = base;
    if (axis == SweepAxis::lambda) {
      cfg.lambda = static_cast<Weight>(x);
    } else {
      cfg.partitions = static_cast<std::size_t>(x);
    }
    try {
      const TrainResult res = train(train_bin, cfg);
      row.rule_size = rule_size(res.rule);
      row.train_seconds = res.train_seconds;
      row.train_accuracy = 100.0 * evaluate(res.rule, train_bin.X, train_bin.y).accuracy;
      row.validation_accuracy = 100.0 * evaluate(res.rule, val_bin.X, val_bin.y).accuracy;
      row.queries = res.trace.size();
      for (const auto &t : res.trace) row.total_soft += t.query.soft;
      row.mean_soft_per_query =
          row.queries ? static_cast<double>(row.total_soft) / static_cast<double>(row.queries) : 0;
      row.ok = true;
    } catch (const std::exception &e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(SweepAxis axis, const std::vector<SweepRow> &rows) {
  std::ostringstream os;
  os << (axis == SweepAxis::lambda ? "lambda" : "partitions")
     << ",rule_size,train_time,train_acc,val_acc,queries,mean_soft_per_query,total_soft\n";
  char buf[256];
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof buf, "%g", r.x);
    os << buf;
    if (!r.ok) {
      os << ",,,,,,,\n";
      continue;
    }
    std::snprintf(buf, sizeof buf, ",%zu,%.6f,%.4f,%.4f,%zu,%.2f,%zu\n", r.rule_size,
                  r.train_seconds, r.train_accuracy, r.validation_accuracy, r.queries,
                  r.mean_soft_per_query, r.total_soft);
    os << buf;
  }
  return os.str();
}

}  // namespace imli
