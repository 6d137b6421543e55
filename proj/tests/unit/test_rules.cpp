#include <doctest.h>

#include "../helpers.hpp"
#include "../oracles.hpp"
#include "imli/learner.hpp"
#include "imli/rules.hpp"

using namespace imli;

namespace {

LiteralMeta thr(const std::string &col, std::size_t src, LiteralKind kind, double tau) {
  LiteralMeta m;
  m.column_name = col;
  m.source_column = src;
  m.kind = kind;
  m.threshold = tau;
  return m;
}

Literal lit(std::size_t feature, LiteralMeta meta) { return {feature, false, std::move(meta)}; }

const std::vector<std::string> iris_header{"sepal length", "sepal width", "petal length",
                                           "petal width", "species"};

// Iris versicolour literals, rendered with the strict comparator.
const Literal sw_lt_31 = lit(0, thr("sepal width", 1, LiteralKind::thr_lt, 3.1));
const Literal pl_lt_50 = lit(1, thr("petal length", 2, LiteralKind::thr_lt, 5.0));
const Literal pl_lt_532 = lit(2, thr("petal length", 2, LiteralKind::thr_lt, 5.32));
const Literal pl_ge_17 = lit(3, thr("petal length", 2, LiteralKind::thr_ge, 1.7));
const Literal pw_lt_15 = lit(4, thr("petal width", 3, LiteralKind::thr_lt, 1.5));
const Literal pw_lt_18 = lit(5, thr("petal width", 3, LiteralKind::thr_lt, 1.8));

}  // namespace

TEST_CASE("versicolour rule predicts and sizes") {
  Rule r{RuleForm::dnf, {{sw_lt_31, pl_lt_50, pl_ge_17, pw_lt_18}}};
  CHECK(rule_size(r) == 4);
  CHECK(predict_raw(r, {"5.9", "3.0", "4.5", "1.3", "?"}, iris_header));
  CHECK_FALSE(predict_raw(r, {"5.9", "3.0", "5.5", "1.3", "?"}, iris_header));
  CHECK(format_rule(r) ==
        "(sepal width < 3.1 AND petal length < 5 AND petal length ≥ 1.7 AND petal width < 1.8)");
}

TEST_CASE("redundant sibling literals are pruned") {
  Rule raw{RuleForm::dnf, {{sw_lt_31, pl_lt_50, pl_lt_532, pl_ge_17, pw_lt_15, pw_lt_18}}};
  CHECK(rule_size(raw) == 6);
  // A conjunction keeps the strongest sibling; pruning works on the CNF dual.
  Rule pruned = negate(remove_redundant_literals(negate(raw)));
  Rule expect{RuleForm::dnf, {{sw_lt_31, pl_lt_50, pl_ge_17, pw_lt_15}}};
  CHECK(pruned == expect);

  auto ge25 = lit(0, thr("x", 0, LiteralKind::thr_ge, 25));
  auto ge50 = lit(1, thr("x", 0, LiteralKind::thr_ge, 50));
  auto lt50 = lit(2, thr("x", 0, LiteralKind::thr_lt, 50));
  auto lt75 = lit(3, thr("x", 0, LiteralKind::thr_lt, 75));
  CHECK(remove_redundant_literals(Rule{RuleForm::cnf, {{ge25, ge50}}}) ==
        Rule{RuleForm::cnf, {{ge25}}});
  CHECK(remove_redundant_literals(Rule{RuleForm::cnf, {{lt50, lt75}}}) ==
        Rule{RuleForm::cnf, {{lt75}}});
  // Truth table over the intervals split by 25, 50, 75.
  for (double x : {10.0, 30.0, 60.0, 80.0}) {
    const bool raw_v = x < 50 || x < 75;
    const bool pruned_v = x < 75;
    CHECK(raw_v == pruned_v);
  }
}

TEST_CASE("empty rules") {
  Rule cnf{RuleForm::cnf, {}};
  Rule dnf{RuleForm::dnf, {}};
  const std::uint8_t x[2] = {0, 1};
  CHECK(predict(cnf, {x, 2}));
  CHECK_FALSE(predict(dnf, {x, 2}));
  CHECK_FALSE(predict(Rule{RuleForm::cnf, {{}}}, {x, 2}));
  CHECK(format_rule(cnf) == "(TRUE)");
  CHECK(format_rule(dnf) == "(FALSE)");
  CHECK(negate(cnf) == dnf);
  CHECK(rule_size(cnf) == 0);
}

TEST_CASE("negation renders the dual") {
  LiteralMeta male;
  male.column_name = "Male";
  LiteralMeta grad;
  grad.column_name = "Education";
  grad.kind = LiteralKind::cat_eq;
  grad.category = "Graduate";
  Rule r{RuleForm::cnf,
         {{lit(0, male), lit(1, thr("Age", 1, LiteralKind::thr_lt, 50))},
          {lit(2, grad), lit(3, thr("Income", 3, LiteralKind::thr_ge, 1500))}}};
  CHECK(format_rule(r) == "(is Male OR Age < 50) AND (Education = Graduate OR Income ≥ 1500)");
  auto n = negate(r);
  CHECK(n.form == RuleForm::dnf);
  CHECK(format_rule(n) ==
        "(is not Male AND Age ≥ 50) OR (Education is not Graduate AND Income < 1500)");
  CHECK(negate(n) == r);
  CHECK(rule_size(n) == 4);
}

TEST_CASE("negation flips every prediction") {
  Rng rng(21);
  for (int it = 0; it < 200; ++it) {
    const std::size_t m = 1 + rng.below(10);
    const std::size_t k = 1 + rng.below(3);
    auto meta = oracle::plain_meta(m);
    Rule r;
    r.form = rng.below(2) ? RuleForm::cnf : RuleForm::dnf;
    for (std::size_t l = 0; l < k; ++l) {
      std::vector<Literal> c;
      for (std::size_t j = 0; j < m; ++j) {
        const auto roll = rng.below(6);
        if (roll == 0) c.push_back({j, false, meta[j]});
        if (roll == 1) c.push_back(Literal{j, false, meta[j]}.complement());
      }
      r.clauses.push_back(c);
    }
    const Rule n = negate(r);
    CHECK(rule_size(n) == rule_size(r));
    std::vector<std::uint8_t> x(m);
    for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
      for (std::size_t j = 0; j < m; ++j) x[j] = (mask >> j) & 1;
      REQUIRE(predict(n, x) != predict(r, x));
    }
  }
}

TEST_CASE("predict checks sample length") {
  Rule r{RuleForm::cnf, {{lit(3, oracle::plain_meta(4)[3])}}};
  const std::uint8_t x[2] = {1, 1};
  CHECK_THROWS_AS(predict(r, {x, 2}), DataError);
}

TEST_CASE("duplicate literals are rejected") {
  Rule r{RuleForm::cnf, {{sw_lt_31, sw_lt_31}}};
  CHECK_THROWS_AS(validate(r), DataError);
}

TEST_CASE("JSON persistence") {
  Rule r{RuleForm::dnf, {{sw_lt_31, pl_ge_17, pw_lt_18}, {}}};
  LiteralMeta cat;
  cat.column_name = "colour";
  cat.kind = LiteralKind::cat_neq;
  cat.category = "red, \"dark\"";
  r.clauses[1].push_back(Literal{7, true, cat});
  const auto text = to_json(r);
  const Rule back = rule_from_json(text);
  CHECK(back == r);
  CHECK(to_json(back) == text);

  testutil::TempDir dir;
  save(r, dir.file("rule.json"));
  CHECK(load(dir.file("rule.json")) == r);

  CHECK_THROWS_AS(rule_from_json("{not json"), DataError);
  auto bad = text;
  bad.replace(bad.find("thr_lt"), 6, "thr_xx");
  CHECK_THROWS_AS(rule_from_json(bad), DataError);
  CHECK_THROWS_AS(load(dir.file("missing.json")), DataError);
}
