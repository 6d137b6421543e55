#include "imli/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "imli/data.hpp"
#include "imli/discretize.hpp"
#include "imli/encoder.hpp"
#include "imli/harness.hpp"
#include "imli/learner.hpp"
#include "imli/maxsat.hpp"
#include "imli/rules.hpp"

namespace imli::cli {

namespace {

using nlohmann::json;

struct DataArgs {
  std::string path;
  std::string label;
  std::string positive;
  bool impute = false;
  std::size_t bins = 4;
  bool no_complements = false;
  std::string dump_binarization;
};

struct SolverArgs {
  std::string solver = "builtin-ls";
  std::string command;
  double timeout = 1000;
  std::string wcnf_format = "classic";
  std::uint64_t max_flips = 0;
};

struct TrainArgs {
  std::size_t k = 1;
  std::uint64_t lambda = 10;
  std::string partitions = "auto";
  std::string form = "cnf";
  std::uint64_t seed = 42;
  bool stratify = false;
  std::string out;
  std::string trace;
};

void add_data_options(CLI::App *app, DataArgs &d, bool with_label = true) {
  app->add_option("--data", d.path, "CSV file with a header row")->required();
  if (with_label) {
    app->add_option("--label", d.label, "label column name")->required();
    app->add_option("--pos", d.positive, "label value mapped to class 1")->required();
    app->add_flag("--impute", d.impute, "fill missing cells with column mode/median");
    app->add_option("--bins", d.bins, "thresholds per continuous column")
        ->check(CLI::PositiveNumber);
    app->add_flag("--no-complements", d.no_complements,
                  "omit negated features for binary and categorical columns");
    app->add_option("--dump-binarization", d.dump_binarization,
                    "write per-column binarization report (JSON)");
  }
}

void add_solver_options(CLI::App *app, SolverArgs &s) {
  app->add_option("--solver", s.solver, "builtin-bf, builtin-ls or external")
      ->check(CLI::IsMember({"builtin-bf", "builtin-ls", "external"}));
  app->add_option("--solver-cmd", s.command,
                  "external solver command; {} is replaced by the WCNF path "
                  "(falls back to $IMLI_SOLVER_CMD)");
  app->add_option("--timeout", s.timeout, "per-solve time limit in seconds")
      ->check(CLI::PositiveNumber);
  app->add_option("--wcnf-format", s.wcnf_format, "classic or new")
      ->check(CLI::IsMember({"classic", "new"}));
  app->add_option("--max-flips", s.max_flips, "local search flip budget (0 = auto)");
}

void add_train_options(CLI::App *app, TrainArgs &t) {
  app->add_option("--k", t.k, "clauses per rule")->check(CLI::PositiveNumber);
  app->add_option("--lambda", t.lambda, "data fidelity weight")->check(CLI::PositiveNumber);
  app->add_option("--partitions", t.partitions, "partition count or 'auto'");
  app->add_option("--form", t.form, "cnf or dnf")->check(CLI::IsMember({"cnf", "dnf"}));
  app->add_option("--seed", t.seed, "random seed");
  app->add_flag("--stratify", t.stratify, "class-stratified partitions");
}

std::size_t parse_partitions(const std::string &s) {
  if (s == "auto") return 0;
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception &) {
    pos = 0;
  }
  if (pos != s.size() || v < 1)
    throw UsageError("--partitions must be a positive integer or 'auto', got '" + s + "'");
  return static_cast<std::size_t>(v);
}

SolverOptions solver_options(const SolverArgs &s) {
  SolverOptions o;
  o.backend = backend_from_string(s.solver);
  o.command = s.command;
  if (o.command.empty()) {
    if (const char *env = std::getenv("IMLI_SOLVER_CMD")) o.command = env;
  }
  o.dialect = s.wcnf_format == "new" ? WcnfDialect::modern : WcnfDialect::classic;
  o.max_flips = s.max_flips;
  return o;
}

TrainConfig train_config(const TrainArgs &t, const SolverArgs &s) {
  TrainConfig cfg;
  cfg.k = t.k;
  cfg.lambda = t.lambda;
  cfg.partitions = parse_partitions(t.partitions);
  cfg.form = rule_form_from_string(t.form);
  cfg.solver = solver_options(s);
  cfg.seed = t.seed;
  cfg.time_limit = s.timeout;
  cfg.stratify = t.stratify;
  cfg.validate();
  return cfg;
}

RawDataset load_data(const DataArgs &d) {
  LoadOptions lo;
  lo.impute = d.impute;
  return load_csv(d.path, d.label, d.positive, lo);
}

BinarizeOptions binarize_options(const DataArgs &d) { return {d.bins, !d.no_complements}; }

void write_file(const std::string &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << text;
  if (!f) throw DataError("failed writing " + path);
}

Binarizer fit_binarizer(const RawDataset &raw, const DataArgs &d, std::ostream &err) {
  Binarizer enc = Binarizer::fit(raw, binarize_options(d));
  for (const auto &w : enc.warnings()) err << "warning: " << w << '\n';
  if (!d.dump_binarization.empty()) write_file(d.dump_binarization, enc.report_json() + "\n");
  return enc;
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct ModelFile {
  Rule rule;
  std::string label;
  std::string positive;
};

ModelFile read_model(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ModelFile m;
  m.rule = rule_from_json(ss.str());
  const json j = json::parse(ss.str());
  m.label = j.value("label", "");
  m.positive = j.value("positive_label", "");
  return m;
}

// Options from a JSON config file become argv tokens placed before the
// explicit ones; keys whose flag is given explicitly are skipped.
std::vector<std::string> apply_config(const std::vector<std::string> &args, CLI::App &root) {
  if (args.empty()) return args;
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;
  if (rest.empty()) throw UsageError("--config requires a subcommand");

  CLI::App *sub = nullptr;
  try {
    sub = root.get_subcommand(rest.front());
  } catch (const CLI::OptionNotFound &) {
    throw UsageError("--config requires a subcommand");
  }

  std::ifstream in(config_path);
  if (!in) throw UsageError("cannot read config file " + config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw UsageError("config file " + config_path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");

  auto given = [&](const std::string &flag) {
    for (const auto &a : rest)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  auto scalar = [](const json &v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };

  std::vector<std::string> injected;
  for (const auto &[key, value] : j.items()) {
    const std::string flag = "--" + key;
    const CLI::Option *opt = sub->get_option_no_throw(flag);
    if (!opt) throw UsageError("unknown key '" + key + "' in config file for '" + rest.front() + "'");
    if (given(flag)) continue;
    if (opt->get_expected_min() == 0) {
      if (!value.is_boolean()) throw UsageError("config key '" + key + "' must be a boolean");
      if (value.get<bool>()) injected.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto &v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
      injected.push_back(flag);
      injected.push_back(joined);
    } else {
      injected.push_back(flag);
      injected.push_back(scalar(value));
    }
  }
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Interpretable CNF/DNF rule learning by incremental MaxSAT", "imli"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_help_all_flag("--help-all", "help for every subcommand");
  app.add_option("--config", "JSON file of option defaults for the subcommand");

  DataArgs data;
  SolverArgs solver;
  TrainArgs targs;

  // train
  auto *train_cmd = app.add_subcommand("train", "learn a rule and save it as JSON");
  add_data_options(train_cmd, data);
  add_train_options(train_cmd, targs);
  add_solver_options(train_cmd, solver);
  train_cmd->add_option("--out", targs.out, "model file (JSON); stdout if omitted");
  train_cmd->add_option("--trace", targs.trace, "per-partition trace file (JSON)");
  train_cmd->add_option("--config", "JSON file of option defaults");

  // predict
  std::string model_path;
  DataArgs pdata;
  auto *predict_cmd = app.add_subcommand("predict", "print one 0/1 prediction per row");
  predict_cmd->add_option("--model", model_path, "model file from 'train'")->required();
  add_data_options(predict_cmd, pdata, false);
  predict_cmd->add_option("--config", "JSON file of option defaults");

  // eval
  std::string eval_model;
  DataArgs edata;
  auto *eval_cmd = app.add_subcommand("eval", "accuracy and confusion counts of a model");
  eval_cmd->add_option("--model", eval_model, "model file from 'train'")->required();
  eval_cmd->add_option("--data", edata.path, "CSV file")->required();
  eval_cmd->add_option("--label", edata.label, "label column (default: from model)");
  eval_cmd->add_option("--pos", edata.positive, "positive label (default: from model)");
  eval_cmd->add_option("--config", "JSON file of option defaults");

  // cv
  std::string lambdas = "5,10", ks = "1,2,3", forms = "cnf,dnf";
  std::string cv_partitions = "auto", select_by = "test", cv_json, dump_splits;
  SplitSpec spec;
  spec.repetitions = 10;
  std::size_t jobs = 1;
  double cutoff = 1000;
  std::uint64_t cv_seed = 42;
  bool cv_stratify = false;
  auto *cv_cmd = app.add_subcommand("cv", "grid search with holdout and k-fold CV");
  add_data_options(cv_cmd, data);
  add_solver_options(cv_cmd, solver);
  cv_cmd->add_option("--lambdas", lambdas, "comma-separated lambda values");
  cv_cmd->add_option("--ks", ks, "comma-separated clause counts");
  cv_cmd->add_option("--forms", forms, "comma-separated rule forms");
  cv_cmd->add_option("--partitions", cv_partitions, "partition count or 'auto'");
  cv_cmd->add_option("--folds", spec.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  cv_cmd->add_option("--holdout", spec.holdout_fraction, "holdout fraction")
      ->check(CLI::Range(0.0, 1.0));
  cv_cmd->add_option("--repetitions", spec.repetitions, "holdout repetitions")
      ->check(CLI::PositiveNumber);
  cv_cmd->add_option("--seed", cv_seed, "random seed");
  cv_cmd->add_option("--cutoff", cutoff, "per-run wall-clock cutoff in seconds")
      ->check(CLI::PositiveNumber);
  cv_cmd->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  cv_cmd->add_option("--select-by", select_by, "test or validation")
      ->check(CLI::IsMember({"test", "validation"}));
  cv_cmd->add_flag("--stratify", cv_stratify, "class-stratified partitions");
  cv_cmd->add_option("--json", cv_json, "also write the report as JSON");
  cv_cmd->add_option("--dump-splits", dump_splits,
                     "directory for holdout/fold index files (first repetition)");
  cv_cmd->add_option("--config", "JSON file of option defaults");

  // sweep
  std::string vary = "lambda", values = "1,5,10,20", sweep_out;
  SplitSpec sweep_spec;
  auto *sweep_cmd = app.add_subcommand("sweep", "vary lambda or partitions; CSV out");
  add_data_options(sweep_cmd, data);
  add_train_options(sweep_cmd, targs);
  add_solver_options(sweep_cmd, solver);
  sweep_cmd->add_option("--vary", vary, "lambda or partitions")
      ->check(CLI::IsMember({"lambda", "partitions"}));
  sweep_cmd->add_option("--values", values, "ascending comma-separated values");
  sweep_cmd->add_option("--holdout", sweep_spec.holdout_fraction, "validation fraction")
      ->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--out", sweep_out, "CSV file; stdout if omitted");
  sweep_cmd->add_option("--config", "JSON file of option defaults");

  // encode
  std::string encode_out, encode_format = "classic";
  auto *encode_cmd = app.add_subcommand("encode", "write the first partition's WCNF query");
  add_data_options(encode_cmd, data);
  add_train_options(encode_cmd, targs);
  encode_cmd->add_option("--out", encode_out, "WCNF file; stdout if omitted");
  encode_cmd->add_option("--wcnf-format", encode_format, "classic or new")
      ->check(CLI::IsMember({"classic", "new"}));
  encode_cmd->add_option("--config", "JSON file of option defaults");

  try {
    std::vector<std::string> argv = apply_config(args, app);
    std::reverse(argv.begin(), argv.end());
    try {
      app.parse(argv);
    } catch (const CLI::ParseError &e) {
      app.exit(e, out, err);
      return e.get_exit_code() == 0 ? ok : usage_error;
    }

    if (train_cmd->parsed()) {
      const TrainConfig cfg = train_config(targs, solver);
      const RawDataset raw = load_data(data);
      const Binarizer enc = fit_binarizer(raw, data, err);
      const TrainResult res = train(enc.transform(raw), cfg);
      json model = json::parse(to_json(res.rule));
      model["label"] = data.label;
      model["positive_label"] = data.positive;
      model["train"] = {{"k", cfg.k},
                        {"lambda", cfg.lambda},
                        {"partitions", res.partitions},
                        {"solver", to_string(cfg.solver.backend)},
                        {"seed", cfg.seed},
                        {"bins", data.bins},
                        {"complements", !data.no_complements}};
      const std::string text = model.dump(2) + "\n";
      if (targs.out.empty()) {
        out << text;
      } else {
        write_file(targs.out, text);
        out << format_rule(res.rule) << '\n';
      }
      if (!targs.trace.empty()) write_file(targs.trace, trace_json(res) + "\n");
      for (const auto &t : res.trace)
        if (t.best_found)
          err << "note: partition " << t.index << " used a best-found (not proven optimal) model\n";
      return ok;
    }

    if (predict_cmd->parsed()) {
      const ModelFile m = read_model(model_path);
      const Table t = read_csv(pdata.path);
      for (const auto &row : t.rows) out << (predict_raw(m.rule, row, t.header) ? 1 : 0) << '\n';
      return ok;
    }

    if (eval_cmd->parsed()) {
      const ModelFile m = read_model(eval_model);
      const std::string label = edata.label.empty() ? m.label : edata.label;
      const std::string pos = edata.positive.empty() ? m.positive : edata.positive;
      if (label.empty() || pos.empty())
        throw UsageError("model has no label metadata; pass --label and --pos");
      const Table t = read_csv(edata.path);
      const auto li = t.column_index(label);
      if (!li) throw DataError("label column '" + label + "' not found");
      Evaluation e;
      for (const auto &row : t.rows) {
        const bool pred = predict_raw(m.rule, row, t.header);
        const bool truth = row[*li] == pos;
        (pred ? (truth ? e.tp : e.fp) : (truth ? e.fn : e.tn))++;
      }
      if (t.rows.empty()) throw DataError("no rows to evaluate");
      e.accuracy = static_cast<double>(e.tp + e.tn) / static_cast<double>(t.rows.size());
      out << json({{"accuracy", 100.0 * e.accuracy},
                   {"tp", e.tp},
                   {"fp", e.fp},
                   {"tn", e.tn},
                   {"fn", e.fn},
                   {"rule_size", rule_size(m.rule)}})
                 .dump(2)
          << '\n';
      return ok;
    }

    if (cv_cmd->parsed()) {
      Grid grid;
      grid.lambdas.clear();
      grid.ks.clear();
      grid.forms.clear();
      for (const auto &v : split_list(lambdas)) grid.lambdas.push_back(std::stoull(v));
      for (const auto &v : split_list(ks)) grid.ks.push_back(std::stoull(v));
      for (const auto &v : split_list(forms)) grid.forms.push_back(rule_form_from_string(v));
      grid.partitions = parse_partitions(cv_partitions);
      for (auto l : grid.lambdas)
        if (l < 1) throw UsageError("lambda values must be at least 1");
      for (auto k : grid.ks)
        if (k < 1) throw UsageError("k values must be at least 1");
      spec.seed = cv_seed;

      HarnessOptions ho;
      ho.solver = solver_options(solver);
      ho.binarize = binarize_options(data);
      ho.solve_time_limit = solver.timeout;
      ho.run_time_limit = cutoff;
      ho.jobs = jobs;
      ho.select_by_validation = select_by == "validation";
      ho.stratify = cv_stratify;
      ho.seed = cv_seed;
      if (ho.solver.backend == Backend::external && ho.solver.command.empty())
        throw UsageError("external solver selected but no --solver-cmd given");

      const RawDataset raw = load_data(data);
      if (!data.dump_binarization.empty()) fit_binarizer(raw, data, err);
      if (!dump_splits.empty()) dump_split(split_and_fold(raw.num_rows(), spec, 0), dump_splits);
      const EvalReport rep = grid_search(raw, grid, spec, ho);
      out << report_text(rep);
      if (!cv_json.empty()) write_file(cv_json, report_json(rep) + "\n");
      return ok;
    }

    if (sweep_cmd->parsed()) {
      const TrainConfig cfg = train_config(targs, solver);
      std::vector<double> xs;
      for (const auto &v : split_list(values)) xs.push_back(std::stod(v));
      sweep_spec.seed = targs.seed;
      const SweepAxis axis = vary == "lambda" ? SweepAxis::lambda : SweepAxis::partitions;
      const RawDataset raw = load_data(data);
      if (!data.dump_binarization.empty()) fit_binarizer(raw, data, err);
      const auto rows = sweep(raw, axis, xs, cfg, binarize_options(data), sweep_spec);
      const std::string csv = sweep_csv(axis, rows);
      if (sweep_out.empty()) {
        out << csv;
      } else {
        write_file(sweep_out, csv);
      }
      bool any = false;
      for (const auto &r : rows) {
        any = any || r.ok;
        if (!r.ok) err << "sweep value " << r.x << " failed: " << r.error << '\n';
      }
      return any ? ok : solver_error;
    }

    if (encode_cmd->parsed()) {
      if (targs.k < 1 || targs.lambda < 1) throw UsageError("k and lambda must be at least 1");
      const RawDataset raw = load_data(data);
      const Binarizer enc = fit_binarizer(raw, data, err);
      BinarizedDataset bin = enc.transform(raw);
      if (targs.form == "dnf")
        for (auto &v : bin.y) v = !v;
      std::size_t p = parse_partitions(targs.partitions);
      if (p == 0) p = auto_partition_count(bin.num_samples());
      const PartitionPlan plan = targs.stratify
                                     ? make_stratified_partitions(bin.y, p, targs.seed)
                                     : make_partitions(bin.num_samples(), p, targs.seed);
      const auto part = bin.select_rows(plan.parts.front());
      const MaxSatQuery q = build_query(part.X, part.y, targs.k, targs.lambda);
      const std::string text =
          to_wcnf(q, encode_format == "new" ? WcnfDialect::modern : WcnfDialect::classic);
      if (encode_out.empty()) {
        out << text;
      } else {
        write_file(encode_out, text);
      }
      return ok;
    }
  } catch (const UsageError &e) {
    err << "imli: " << e.what() << '\n';
    return usage_error;
  } catch (const DataError &e) {
    err << "imli: data error: " << e.what() << '\n';
    return data_error;
  } catch (const SolverError &e) {
    err << "imli: solver error: " << e.what() << '\n';
    return solver_error;
  } catch (const TimeoutError &e) {
    err << "imli: timeout: " << e.what() << '\n';
    return timeout_error;
  } catch (const std::exception &e) {
    err << "imli: " << e.what() << '\n';
    return data_error;
  }
  return usage_error;
}

}  // namespace imli::cli
