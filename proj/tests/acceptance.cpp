// Acceptance gate: one PASS/FAIL line per criterion.  With no argument all
// nine run; "imli_acceptance 4" runs criterion 4 alone.  Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>

#include "helpers.hpp"
#include "imli/discretize.hpp"
#include "imli/encoder.hpp"
#include "imli/harness.hpp"
#include "imli/learner.hpp"
#include "imli/maxsat.hpp"
#include "oracles.hpp"

using namespace imli;

namespace {

// Tolerances and limits, fixed here rather than on the command line.
constexpr double kOracleSeconds = 10;
constexpr double kObjectiveSeconds = 30;
constexpr double kIrisSeconds = 30;
constexpr std::size_t kIrisMaxSize = 6;
constexpr double kIrisMinAccuracy = 93.0;  // percent, training set
constexpr double kSizeLawSeconds = 5;
constexpr double kSpeedupSolveLimit = 120;  // per-solve seconds, both runs
constexpr std::size_t kPruneRules = 500;
constexpr std::size_t kPruneSamples = 10000;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240101);
  std::size_t match = 0;
  const std::size_t total = 200;
  for (std::size_t it = 0; it < total; ++it) {
    auto t = oracle::random_tiny(rng);
    const std::size_t m = t.X.cols();
    auto prior_bits = oracle::random_bits(rng, t.k, m);
    auto q = build_query(t.X, t.y, t.k, t.lambda, oracle::bits_rule(prior_bits, oracle::plain_meta(m)));
    auto out = solve_bruteforce(q);
    if (out.weight && *out.weight == oracle::min_objective(t.X, t.y, t.k, t.lambda, prior_bits))
      ++match;
  }
  const double s = seconds_since(t0);
  return {match == total && s < kOracleSeconds,
          fmt("%zu/%zu instances match the rule enumerator (%.2f s, limit %.0f s)", match, total,
              s, kOracleSeconds)};
}

BinarizedDataset random_bool_data(Rng &rng, std::size_t n, std::size_t m) {
  BinarizedDataset d;
  d.X = BoolMatrix(n, m);
  d.y.resize(n);
  d.meta = oracle::plain_meta(m);
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t j = 0; j < m; ++j) d.X(q, j) = rng.below(2);
    d.y[q] = rng.below(2);
  }
  return d;
}

Verdict objective_realization() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(77);
  std::size_t match = 0;
  const std::size_t total = 50;
  for (std::size_t it = 0; it < total; ++it) {
    const std::size_t n = 1 + rng.below(12), m = 1 + rng.below(5), k = 1 + rng.below(2);
    const Weight lambda = 1 + rng.below(10);
    auto d = random_bool_data(rng, n, m);
    TrainConfig cfg;
    cfg.k = k;
    cfg.lambda = lambda;
    cfg.partitions = 1;
    cfg.solver.backend = Backend::bruteforce;
    auto res = train(d, cfg);
    auto zero = oracle::empty_bits(k, m);
    if (oracle::objective(oracle::rule_bits(res.rule, m), zero, d.X, d.y, lambda) ==
        oracle::min_objective(d.X, d.y, k, lambda, zero))
      ++match;
  }
  const double s = seconds_since(t0);
  return {match == total && s < kObjectiveSeconds,
          fmt("%zu/%zu learned rules attain min |R| + lambda*errors (%.2f s, limit %.0f s)", match,
              total, s, kObjectiveSeconds)};
}

// Every realizable Boolean input for the fitted continuous columns: one
// value per threshold interval, including the thresholds themselves.
std::vector<std::vector<double>> interval_representatives(const Binarizer &enc) {
  std::vector<std::vector<double>> reps;
  for (const auto &c : enc.columns()) {
    std::vector<double> r;
    const auto &t = c.thresholds;
    r.push_back(t.front() - 1);
    for (std::size_t i = 0; i < t.size(); ++i) {
      r.push_back(t[i]);
      r.push_back(i + 1 < t.size() ? (t[i] + t[i + 1]) / 2 : t[i] + 1);
    }
    reps.push_back(std::move(r));
  }
  return reps;
}

std::vector<std::uint8_t> encode_row(const Binarizer &enc, const std::vector<double> &values) {
  std::vector<std::uint8_t> x;
  for (std::size_t c = 0; c < values.size(); ++c) {
    auto b = binarize_continuous(values[c], enc.columns()[c].thresholds);
    x.insert(x.end(), b.begin(), b.end());
  }
  return x;
}

Verdict pruning_suite() {
  Rng rng(4242);
  std::size_t mismatches = 0, grew = 0, exhaustive = 0, sampled = 0, shrunk = 0;
  for (std::size_t it = 0; it < kPruneRules; ++it) {
    // Alternate small feature spaces (checked exhaustively) with larger ones.
    const bool small = it % 2 == 0;
    const std::size_t cols = small ? 1 + rng.below(2) : 2 + rng.below(3);
    const std::size_t t = small ? (cols == 1 ? 2 + rng.below(5) : 2 + rng.below(2)) : 3 + rng.below(4);
    std::string text;
    for (std::size_t c = 0; c < cols; ++c) text += "c" + std::to_string(c) + ",";
    text += "y\n";
    for (int r = 0; r < 60; ++r) {
      for (std::size_t c = 0; c < cols; ++c) text += std::to_string(rng.uniform() * 100) + ",";
      text += r ? "1\n" : "0\n";
    }
    BinarizeOptions bo;
    bo.thresholds = t;
    const Binarizer enc = Binarizer::fit(testutil::csv(text, "y", "1"), bo);
    const auto &meta = enc.meta();

    Rule rule;
    const std::size_t k = 1 + rng.below(3);
    for (std::size_t l = 0; l < k; ++l) {
      std::vector<Literal> c;
      for (std::size_t j = 0; j < meta.size(); ++j)
        if (rng.below(3) == 0) c.push_back({j, false, meta[j]});
      rule.clauses.push_back(std::move(c));
    }
    const Rule pruned = remove_redundant_literals(rule);
    grew += rule_size(pruned) > rule_size(rule);
    shrunk += rule_size(pruned) < rule_size(rule);

    auto check = [&](const std::vector<double> &values) {
      const auto x = encode_row(enc, values);
      mismatches += predict(pruned, x) != predict(rule, x);
    };
    if (meta.size() <= 12) {
      ++exhaustive;
      const auto reps = interval_representatives(enc);
      std::vector<std::size_t> idx(reps.size(), 0);
      for (;;) {
        std::vector<double> v;
        for (std::size_t c = 0; c < reps.size(); ++c) v.push_back(reps[c][idx[c]]);
        check(v);
        std::size_t c = 0;
        while (c < idx.size() && ++idx[c] == reps[c].size()) idx[c++] = 0;
        if (c == idx.size()) break;
      }
    } else {
      ++sampled;
      std::vector<double> v(cols);
      for (std::size_t s = 0; s < kPruneSamples; ++s) {
        for (auto &x : v) x = rng.uniform() * 120 - 10;
        check(v);
      }
    }
  }
  return {mismatches == 0 && grew == 0,
          fmt("%zu rules (%zu exhaustive, %zu sampled), %zu pruned smaller, %zu grew, %zu "
              "prediction mismatches",
              kPruneRules, exhaustive, sampled, shrunk, grew, mismatches)};
}

bool external_available() {
  return std::system("python3 -c 'import scipy.optimize' >/dev/null 2>&1") == 0;
}

Verdict iris_versicolour() {
  const RawDataset raw = load_csv(testutil::data_file("iris.csv"), "species", "versicolor");
  const BinarizedDataset d = binarize(raw, 4, true);
  const std::set<std::string> allowed{"sepal length", "sepal width", "petal length",
                                      "petal width"};

  struct Attempt {
    std::string backend;
    bool pass;
    std::string text;
  };
  auto attempt = [&](const std::string &name, const SolverOptions &so) {
    TrainConfig cfg;
    cfg.k = 1;
    cfg.lambda = 10;
    cfg.partitions = 4;
    cfg.form = RuleForm::dnf;
    cfg.solver = so;
    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult res = train(d, cfg);
    const double s = seconds_since(t0);
    const double acc = 100.0 * evaluate(res.rule, d.X, d.y).accuracy;
    bool cols_ok = true;
    for (const auto &c : res.rule.clauses)
      for (const auto &l : c) cols_ok = cols_ok && l.meta.is_threshold() && allowed.count(l.meta.column_name);
    const std::size_t size = rule_size(res.rule);
    const bool pass = size <= kIrisMaxSize && acc >= kIrisMinAccuracy && cols_ok && s < kIrisSeconds;
    return Attempt{name, pass,
                   fmt("%s: size %zu (max %zu), train accuracy %.2f%% (min %.0f%%), %.2f s: ",
                       name.c_str(), size, kIrisMaxSize, acc, kIrisMinAccuracy, s) +
                       format_rule(res.rule)};
  };

  std::vector<Attempt> attempts;
  attempts.push_back(attempt("local search", SolverOptions{}));
  if (external_available()) {
    SolverOptions ext;
    ext.backend = Backend::external;
    ext.command = "python3 " + testutil::fixture("mini_maxsat.py") + " {}";
    attempts.push_back(attempt("exact external", ext));
  }
  Verdict v;
  for (const auto &a : attempts) {
    v.pass = v.pass || a.pass;
    v.detail += (v.detail.empty() ? "" : "\n       ") + a.text;
  }
  return v;
}

// n samples over m features; labels follow a planted two-clause CNF with
// 3% label noise.
BinarizedDataset synthetic(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  BinarizedDataset d;
  d.X = BoolMatrix(n, m);
  d.y.resize(n);
  d.meta = oracle::plain_meta(m);
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t j = 0; j < m; ++j) d.X(q, j) = rng.below(10) < 3;
    const bool c1 = d.X(q, 0) || d.X(q, 5) || d.X(q, 9);
    const bool c2 = d.X(q, 20) || d.X(q, 33);
    d.y[q] = (c1 && c2) != (rng.below(100) < 3);
  }
  return d;
}

Verdict size_law() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 2000, m = 60, k = 2;
  const auto d = synthetic(n, m, 9);
  std::size_t checked = 0, bad = 0;
  for (std::size_t p : {1, 5, 10, 50}) {
    const auto plan = make_partitions(n, p, 42);
    const std::size_t hi = (n + p - 1) / p, lo = n / p;
    for (const auto &part : plan.parts) {
      const auto sub = d.select_rows(part);
      const auto stats = query_stats(build_query(sub.X, sub.y, k, 10));
      const std::size_t expect = k * m + part.size();
      ++checked;
      bad += stats.soft != expect || (part.size() != hi && part.size() != lo);
    }
  }
  const double s = seconds_since(t0);
  return {bad == 0 && s < kSizeLawSeconds,
          fmt("%zu partition queries over p in {1,5,10,50}, %zu off the k*m'+|part| law (%.2f s, "
              "limit %.0f s)",
              checked, bad, s, kSizeLawSeconds)};
}

Verdict speedup() {
  const auto d = synthetic(2000, 60, 9);
  auto run = [&](std::size_t p) {
    TrainConfig cfg;
    cfg.k = 2;
    cfg.lambda = 10;
    cfg.partitions = p;
    cfg.time_limit = kSpeedupSolveLimit;
    const auto res = train(d, cfg);
    return std::pair{res.train_seconds, 100.0 * evaluate(res.rule, d.X, d.y).accuracy};
  };
  const auto [t1, a1] = run(1);
  const auto [t10, a10] = run(10);
  return {t10 < t1, fmt("local search, p=1 %.3f s (train acc %.1f%%), p=10 %.3f s (train acc "
                        "%.1f%%), speedup %.2fx",
                        t1, a1, t10, a10, t1 / t10)};
}

Verdict dnf_duality() {
  Rng rng(515);
  std::size_t match = 0;
  const std::size_t total = 50;
  for (std::size_t it = 0; it < total; ++it) {
    auto d = random_bool_data(rng, 2 + rng.below(12), 1 + rng.below(4));
    TrainConfig cfg;
    cfg.k = 1 + rng.below(2);
    cfg.lambda = 1 + rng.below(10);
    cfg.partitions = 1 + rng.below(2);
    cfg.solver.backend = Backend::bruteforce;
    cfg.form = RuleForm::dnf;
    const Rule dnf = train(d, cfg).rule;
    for (auto &v : d.y) v = !v;
    cfg.form = RuleForm::cnf;
    match += dnf == negate(train(d, cfg).rule);
  }
  return {match == total, fmt("%zu/%zu datasets give literal-identical dual rules", match, total)};
}

Verdict wcnf_golden() {
  MaxSatQuery q;
  q.vars = VarTable(2, 1, {});
  q.soft = {{{-1}, 1}, {{-2}, 1}};
  q.hard = {{1, 2}};
  const std::string want = "p wcnf 2 3 3\n1 -1 0\n1 -2 0\n3 1 2 0\n";
  const std::string got = to_wcnf(q);
  return {got == want, got == want ? "4 lines, byte-identical" : "got:\n" + got};
}

Verdict discretization_fixtures() {
  std::vector<std::string> fails;
  const auto oh = one_hot({"red", "green", "yellow"}, false);
  const std::string red{char('0' + oh.columns[0][0]), char('0' + oh.columns[1][0]),
                        char('0' + oh.columns[2][0])};
  if (red != "100") fails.push_back("red -> " + red);

  std::string b;
  for (auto v : binarize_continuous(37.5, {25, 50, 75})) b += char('0' + v);
  if (b != "100011") fails.push_back("37.5 -> " + b);

  std::string text = "x,y\n";
  for (int i = 0; i <= 100; ++i) text += std::to_string(i) + "," + (i % 2 ? "1" : "0") + "\n";
  BinarizeOptions bo;
  bo.thresholds = 3;
  const auto enc = Binarizer::fit(testutil::csv(text, "y", "1"), bo);
  const auto &m = enc.meta();
  if (m.size() != 6 || m[0].tval() != 25.0 || m[0].op() != Comparison::ge || !siblings(m[0], m[1]) ||
      siblings(m[0], m[3]))
    fails.push_back("threshold provenance");
  std::string detail = "red -> 100, 37.5 -> 100011, tval(b1)=25, op(b1)=>=, siblings(b1,b2), "
                       "!siblings(b1,b4)";
  if (!fails.empty()) {
    detail = "mismatch:";
    for (const auto &f : fails) detail += " [" + f + "]";
  }
  return {fails.empty(), detail};
}

}  // namespace

int main(int argc, char **argv) {
  const std::vector<std::pair<const char *, std::function<Verdict()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"objective realization", objective_realization},
      {"redundancy pruning", pruning_suite},
      {"iris versicolour rule", iris_versicolour},
      {"encoding size law", size_law},
      {"incremental speedup", speedup},
      {"DNF duality", dnf_duality},
      {"WCNF golden file", wcnf_golden},
      {"discretization fixtures", discretization_fixtures},
  };
  std::size_t only = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 0;
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && only != i + 1) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception &e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::printf("[%s] %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed;
}
