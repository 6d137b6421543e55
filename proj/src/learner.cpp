#include "imli/learner.hpp"

#include <chrono>
#include <map>

#include <json.hpp>

namespace imli {

const char *to_string(Backend b) {
  switch (b) {
    case Backend::bruteforce: return "builtin-bf";
    case Backend::localsearch: return "builtin-ls";
    case Backend::external: return "external";
  }
  return "?";
}

Backend backend_from_string(const std::string &s) {
  if (s == "builtin-bf" || s == "bruteforce") return Backend::bruteforce;
  if (s == "builtin-ls" || s == "localsearch") return Backend::localsearch;
  if (s == "external") return Backend::external;
  throw UsageError("unknown solver '" + s + "' (builtin-bf, builtin-ls, external)");
}

void TrainConfig::validate() const {
  if (k < 1) throw UsageError("k must be at least 1");
  if (lambda < 1) throw UsageError("lambda must be at least 1");
  if (!(time_limit > 0)) throw UsageError("time limit must be positive");
  if (solver.backend == Backend::external && solver.command.empty())
    throw UsageError("external solver selected but no solver command given");
}

SolveOutcome solve(const MaxSatQuery &q, const SolverOptions &opts, double time_limit,
                   std::uint64_t seed) {
  switch (opts.backend) {
    case Backend::bruteforce: return solve_bruteforce(q, opts.bruteforce_budget);
    case Backend::localsearch: {
      LocalSearchOptions ls;
      ls.max_flips = opts.max_flips;
      ls.seed = seed;
      ls.time_limit = time_limit;
      ls.noise = opts.noise;
      return solve_localsearch(q, ls);
    }
    case Backend::external:
      return solve_external(q, {opts.command, time_limit, opts.dialect});
  }
  throw std::logic_error("unknown backend");
}

Rule extract_rule(const Assignment &sigma, const VarTable &vars,
                  const std::vector<LiteralMeta> &meta, std::size_t k) {
  if (meta.size() != vars.m_prime())
    throw UsageError("literal metadata does not match the query's feature count");
  Rule rule;
  rule.form = RuleForm::cnf;
  rule.clauses.resize(k);
  for (std::size_t l = 0; l < k; ++l) {
    for (std::size_t j = 0; j < vars.m_prime(); ++j) {
      const auto id = static_cast<std::size_t>(vars.feature_var(j, l));
      if (id >= sigma.size())
        throw SolverError("assignment lacks feature variable " + std::to_string(id));
      if (sigma[id]) rule.clauses[l].push_back({j, false, meta[j]});
    }
  }
  return rule;
}

Rule remove_redundant_literals(const Rule &rule) {
  Rule out;
  out.form = rule.form;
  for (const auto &clause : rule.clauses) {
    // Weakest literal per (source column, comparator).
    std::map<std::pair<std::size_t, LiteralKind>, std::size_t> keep;
    for (std::size_t i = 0; i < clause.size(); ++i) {
      const auto &m = clause[i].meta;
      if (!m.is_threshold()) continue;
      const auto key = std::make_pair(m.source_column, m.kind);
      auto it = keep.find(key);
      if (it == keep.end()) {
        keep.emplace(key, i);
        continue;
      }
      const double cur = clause[it->second].meta.threshold;
      const bool weaker = m.kind == LiteralKind::thr_ge ? m.threshold < cur : m.threshold > cur;
      if (weaker) it->second = i;
    }
    std::vector<Literal> kept;
    for (std::size_t i = 0; i < clause.size(); ++i) {
      const auto &m = clause[i].meta;
      if (m.is_threshold() && keep.at({m.source_column, m.kind}) != i) continue;
      kept.push_back(clause[i]);
    }
    out.clauses.push_back(std::move(kept));
  }
  return out;
}

TrainResult train(const BinarizedDataset &data, const TrainConfig &cfg) {
  using clock = std::chrono::steady_clock;
  cfg.validate();
  const std::size_t n = data.num_samples();
  if (n == 0) throw DataError("no training samples");
  if (data.meta.size() != data.num_features())
    throw DataError("feature metadata does not match the feature matrix");

  const auto start = clock::now();
  const std::size_t p = cfg.partitions ? cfg.partitions : auto_partition_count(n);

  Labels y = data.y;
  if (cfg.form == RuleForm::dnf)
    for (auto &v : y) v = !v;

  const PartitionPlan plan =
      cfg.stratify ? make_stratified_partitions(y, p, cfg.seed) : make_partitions(n, p, cfg.seed);

  TrainResult result;
  result.partitions = p;
  Rule current;  // R_0: empty
  for (std::size_t i = 0; i < p; ++i) {
    if (cfg.run_time_limit > 0 && i > 0 &&
        std::chrono::duration<double>(clock::now() - start).count() > cfg.run_time_limit) {
      result.cut_off = true;
      break;
    }
    const auto &idx = plan.parts[i];
    const BoolMatrix Xi = data.X.select_rows(idx);
    Labels yi;
    yi.reserve(idx.size());
    for (std::size_t s : idx) yi.push_back(y[s]);

    const MaxSatQuery q = build_query(Xi, yi, cfg.k, cfg.lambda, current);
    const SolveOutcome out = solve(q, cfg.solver, cfg.time_limit, mix_seed(cfg.seed, i + 1));

    const std::string where = "partition " + std::to_string(i + 1) + "/" + std::to_string(p);
    switch (out.status) {
      case SolveStatus::optimum:
      case SolveStatus::best_found: break;
      case SolveStatus::infeasible:
        throw SolverError(where + ": solver reports the query unsatisfiable");
      case SolveStatus::timeout_no_solution:
        throw TimeoutError(where + ": time limit reached without a solution");
      case SolveStatus::solver_error: throw SolverError(where + ": " + out.message);
    }
    if (!out.has_solution())
      throw TimeoutError(where + ": solver stopped without a model (" + out.message + ")");

    const Rule raw = extract_rule(out.assignment, q.vars, data.meta, cfg.k);
    current = remove_redundant_literals(raw);

    PartitionTrace t;
    t.index = i + 1;
    t.samples = idx.size();
    t.query = query_stats(q);
    t.status = out.status;
    t.weight = out.weight.value_or(0);
    t.raw_rule_size = rule_size(raw);
    t.rule_size = rule_size(current);
    t.solve_seconds = out.wall_time;
    t.best_found = out.status == SolveStatus::best_found;
    result.trace.push_back(t);
  }
  if (current.clauses.empty()) current.clauses.resize(cfg.k);

  result.rule = cfg.form == RuleForm::dnf ? negate(current) : current;
  result.train_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return result;
}

std::string trace_json(const TrainResult &result) {
  nlohmann::json j;
  j["partitions"] = result.partitions;
  j["train_seconds"] = result.train_seconds;
  j["cut_off"] = result.cut_off;
  j["rule_size"] = rule_size(result.rule);
  j["trace"] = nlohmann::json::array();
  for (const auto &t : result.trace) {
    j["trace"].push_back({{"partition", t.index},
                          {"samples", t.samples},
                          {"vars", t.query.vars},
                          {"soft", t.query.soft},
                          {"hard", t.query.hard},
                          {"literal_occurrences", t.query.literal_occurrences},
                          {"status", to_string(t.status)},
                          {"weight", t.weight},
                          {"raw_rule_size", t.raw_rule_size},
                          {"rule_size", t.rule_size},
                          {"solve_seconds", t.solve_seconds},
                          {"best_found", t.best_found}});
  }
  return j.dump(2);
}

}  // namespace imli
