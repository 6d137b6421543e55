#pragma once

#include <span>
#include <string>
#include <vector>

#include "imli/discretize.hpp"

namespace imli {

enum class RuleForm { cnf, dnf };

const char *to_string(RuleForm form);
RuleForm rule_form_from_string(const std::string &s);

// A literal points at a Boolean feature column; `negated` literals read the
// complement of that column.  `meta` always describes the literal as it
// reads, so negation flips both.
struct Literal {
  std::size_t feature = 0;
  bool negated = false;
  LiteralMeta meta;

  Literal complement() const { return {feature, !negated, meta.complement()}; }
  bool eval(const std::uint8_t *sample) const { return (sample[feature] != 0) != negated; }

  bool operator==(const Literal &) const = default;
};

// "petal length < 5", "workclass is not Federal-gov", "is Male".
std::string display(const LiteralMeta &meta);

struct Rule {
  RuleForm form = RuleForm::cnf;
  std::vector<std::vector<Literal>> clauses;

  std::size_t k() const { return clauses.size(); }
  bool operator==(const Rule &) const = default;
};

// Throws DataError on duplicate literals within a clause.
void validate(const Rule &rule);

bool predict(const Rule &rule, std::span<const std::uint8_t> sample);

// Evaluates literals directly on raw cells, locating each literal's source
// column by name in `header`.
bool predict_raw(const Rule &rule, const std::vector<std::string> &row,
                 const std::vector<std::string> &header);

Rule negate(const Rule &rule);

std::size_t rule_size(const Rule &rule);

std::string format_rule(const Rule &rule);

std::string to_json(const Rule &rule);
Rule rule_from_json(const std::string &text);

void save(const Rule &rule, const std::string &path);
Rule load(const std::string &path);

}  // namespace imli
