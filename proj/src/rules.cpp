#include "imli/rules.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace imli {

using nlohmann::json;

const char *to_string(RuleForm form) { return form == RuleForm::cnf ? "CNF" : "DNF"; }

RuleForm rule_form_from_string(const std::string &s) {
  if (s == "CNF" || s == "cnf") return RuleForm::cnf;
  if (s == "DNF" || s == "dnf") return RuleForm::dnf;
  throw UsageError("unknown rule form '" + s + "' (expected cnf or dnf)");
}

namespace {

// Six significant digits; quantile interpolation leaves float noise that
// would otherwise show up in rendered thresholds.
std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, ptr);
}

}  // namespace

std::string display(const LiteralMeta &m) {
  switch (m.kind) {
    case LiteralKind::bool_pos: return "is " + m.column_name;
    case LiteralKind::bool_neg: return "is not " + m.column_name;
    case LiteralKind::cat_eq: return m.column_name + " = " + m.category;
    case LiteralKind::cat_neq: return m.column_name + " is not " + m.category;
    case LiteralKind::thr_ge: return m.column_name + " ≥ " + format_number(m.threshold);
    case LiteralKind::thr_lt: return m.column_name + " < " + format_number(m.threshold);
  }
  return {};
}

void validate(const Rule &rule) {
  for (std::size_t l = 0; l < rule.clauses.size(); ++l) {
    const auto &c = rule.clauses[l];
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b)
        if (c[a].feature == c[b].feature && c[a].negated == c[b].negated)
          throw DataError("duplicate literal '" + display(c[a].meta) + "' in clause " +
                          std::to_string(l + 1));
  }
}

bool predict(const Rule &rule, std::span<const std::uint8_t> sample) {
  for (const auto &clause : rule.clauses)
    for (const auto &lit : clause)
      if (lit.feature >= sample.size())
        throw DataError("sample has " + std::to_string(sample.size()) +
                        " features, rule references feature " + std::to_string(lit.feature));

  const std::uint8_t *x = sample.data();
  if (rule.form == RuleForm::cnf) {
    return std::all_of(rule.clauses.begin(), rule.clauses.end(), [&](const auto &clause) {
      return std::any_of(clause.begin(), clause.end(), [&](const Literal &l) { return l.eval(x); });
    });
  }
  return std::any_of(rule.clauses.begin(), rule.clauses.end(), [&](const auto &clause) {
    return std::all_of(clause.begin(), clause.end(), [&](const Literal &l) { return l.eval(x); });
  });
}

bool predict_raw(const Rule &rule, const std::vector<std::string> &row,
                 const std::vector<std::string> &header) {
  auto holds = [&](const Literal &lit) {
    auto it = std::find(header.begin(), header.end(), lit.meta.column_name);
    if (it == header.end())
      throw DataError("input data lacks column '" + lit.meta.column_name + "'");
    return lit.meta.holds(row[static_cast<std::size_t>(it - header.begin())]);
  };
  if (rule.form == RuleForm::cnf) {
    return std::all_of(rule.clauses.begin(), rule.clauses.end(), [&](const auto &clause) {
      return std::any_of(clause.begin(), clause.end(), holds);
    });
  }
  return std::any_of(rule.clauses.begin(), rule.clauses.end(), [&](const auto &clause) {
    return std::all_of(clause.begin(), clause.end(), holds);
  });
}

Rule negate(const Rule &rule) {
  Rule out;
  out.form = rule.form == RuleForm::cnf ? RuleForm::dnf : RuleForm::cnf;
  out.clauses.reserve(rule.clauses.size());
  for (const auto &clause : rule.clauses) {
    std::vector<Literal> c;
    c.reserve(clause.size());
    for (const auto &lit : clause) c.push_back(lit.complement());
    out.clauses.push_back(std::move(c));
  }
  return out;
}

std::size_t rule_size(const Rule &rule) {
  std::size_t n = 0;
  for (const auto &c : rule.clauses) n += c.size();
  return n;
}

std::string format_rule(const Rule &rule) {
  const bool cnf = rule.form == RuleForm::cnf;
  if (rule.clauses.empty()) return cnf ? "(TRUE)" : "(FALSE)";
  const char *inner = cnf ? " OR " : " AND ";
  const char *outer = cnf ? " AND " : " OR ";
  std::string out;
  for (std::size_t l = 0; l < rule.clauses.size(); ++l) {
    if (l) out += outer;
    const auto &clause = rule.clauses[l];
    if (clause.empty()) {
      out += cnf ? "(FALSE)" : "(TRUE)";
      continue;
    }
    out += '(';
    for (std::size_t i = 0; i < clause.size(); ++i) {
      if (i) out += inner;
      out += display(clause[i].meta);
    }
    out += ')';
  }
  return out;
}

namespace {

json literal_json(const Literal &lit) {
  json j;
  j["feature"] = lit.feature;
  j["negated"] = lit.negated;
  j["column"] = lit.meta.column_name;
  j["source_column"] = lit.meta.source_column;
  j["kind"] = to_string(lit.meta.kind);
  if (lit.meta.is_threshold()) j["threshold"] = lit.meta.threshold;
  if (lit.meta.kind == LiteralKind::cat_eq || lit.meta.kind == LiteralKind::cat_neq)
    j["category"] = lit.meta.category;
  return j;
}

Literal literal_from_json(const json &j) {
  Literal lit;
  lit.feature = j.at("feature").get<std::size_t>();
  lit.negated = j.at("negated").get<bool>();
  lit.meta.column_name = j.at("column").get<std::string>();
  lit.meta.source_column = j.at("source_column").get<std::size_t>();
  const auto tag = j.at("kind").get<std::string>();
  auto kind = literal_kind_from_string(tag);
  if (!kind) throw DataError("unknown literal kind '" + tag + "'");
  lit.meta.kind = *kind;
  if (lit.meta.is_threshold()) lit.meta.threshold = j.at("threshold").get<double>();
  if (lit.meta.kind == LiteralKind::cat_eq || lit.meta.kind == LiteralKind::cat_neq)
    lit.meta.category = j.at("category").get<std::string>();
  return lit;
}

}  // namespace

std::string to_json(const Rule &rule) {
  json j;
  j["schema"] = 1;
  j["form"] = to_string(rule.form);
  j["k"] = rule.k();
  j["size"] = rule_size(rule);
  j["text"] = format_rule(rule);
  j["clauses"] = json::array();
  for (const auto &clause : rule.clauses) {
    json c = json::array();
    for (const auto &lit : clause) c.push_back(literal_json(lit));
    j["clauses"].push_back(std::move(c));
  }
  return j.dump(2);
}

Rule rule_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed rule JSON: ") + e.what());
  }
  try {
    if (j.at("schema").get<int>() != 1)
      throw DataError("unsupported rule schema " + j.at("schema").dump());
    Rule rule;
    rule.form = rule_form_from_string(j.at("form").get<std::string>());
    for (const auto &c : j.at("clauses")) {
      std::vector<Literal> clause;
      for (const auto &l : c) clause.push_back(literal_from_json(l));
      rule.clauses.push_back(std::move(clause));
    }
    if (j.contains("k") && j["k"].get<std::size_t>() != rule.k())
      throw DataError("rule JSON declares k=" + j["k"].dump() + " but has " +
                      std::to_string(rule.k()) + " clauses");
    validate(rule);
    return rule;
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed rule JSON: ") + e.what());
  }
}

void save(const Rule &rule, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << to_json(rule) << '\n';
}

Rule load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return rule_from_json(ss.str());
}

}  // namespace imli
