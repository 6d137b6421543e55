#include "imli/encoder.hpp"

#include <cstdlib>

namespace imli {

VarTable::VarTable(std::size_t m_prime, std::size_t k, const Labels &y)
    : m_prime_(m_prime), k_(k), aux_slot_(y.size(), -1) {
  for (std::size_t q = 0; q < y.size(); ++q)
    if (!y[q]) aux_slot_[q] = static_cast<long>(num_negative_++);
}

int VarTable::aux_var(std::size_t q, std::size_t l) const {
  const long slot = aux_slot_.at(q);
  if (slot < 0) throw std::logic_error("aux var requested for positive sample");
  return static_cast<int>(num_feature_vars() + num_samples() +
                          static_cast<std::size_t>(slot) * k_ + l + 1);
}

MaxSatQuery build_query(const BoolMatrix &X, const Labels &y, std::size_t k, Weight lambda,
                        const Rule &prior) {
  if (k < 1) throw UsageError("clause count k must be at least 1");
  if (lambda < 1) throw UsageError("lambda must be at least 1");
  if (X.rows() != y.size())
    throw DataError("feature matrix has " + std::to_string(X.rows()) + " rows but " +
                    std::to_string(y.size()) + " labels");
  const std::size_t m = X.cols();

  std::vector<std::uint8_t> in_prior(k * m, 0);
  if (!prior.clauses.empty()) {
    if (prior.form != RuleForm::cnf) throw UsageError("prior rule must be CNF");
    if (prior.k() != k)
      throw UsageError("prior rule has " + std::to_string(prior.k()) + " clauses, expected " +
                       std::to_string(k));
    for (std::size_t l = 0; l < k; ++l) {
      for (const auto &lit : prior.clauses[l]) {
        if (lit.negated || lit.feature >= m)
          throw UsageError("prior rule literal outside the feature space");
        in_prior[l * m + lit.feature] = 1;
      }
    }
  }

  MaxSatQuery q;
  q.vars = VarTable(m, k, y);
  q.lambda = lambda;
  q.k = k;
  q.m_prime = m;
  const VarTable &v = q.vars;

  q.soft.reserve(k * m + y.size());
  for (std::size_t l = 0; l < k; ++l)
    for (std::size_t j = 0; j < m; ++j) {
      const int b = v.feature_var(j, l);
      q.soft.push_back({{in_prior[l * m + j] ? b : -b}, 1});
    }
  for (std::size_t s = 0; s < y.size(); ++s) q.soft.push_back({{-v.noise_var(s)}, lambda});

  for (std::size_t s = 0; s < y.size(); ++s) {
    const int eta = v.noise_var(s);
    const std::uint8_t *row = X.row(s);
    if (y[s]) {
      // Every clause must contain a literal true on this sample.
      for (std::size_t l = 0; l < k; ++l) {
        Clause c{eta};
        for (std::size_t j = 0; j < m; ++j)
          if (row[j]) c.push_back(v.feature_var(j, l));
        q.hard.push_back(std::move(c));
      }
    } else {
      // Some clause l must be falsified: z(s,l) -> no selected literal true on s.
      Clause head{eta};
      for (std::size_t l = 0; l < k; ++l) head.push_back(v.aux_var(s, l));
      q.hard.push_back(std::move(head));
      for (std::size_t l = 0; l < k; ++l) {
        const int z = v.aux_var(s, l);
        for (std::size_t j = 0; j < m; ++j)
          if (row[j]) q.hard.push_back({-z, -v.feature_var(j, l)});
      }
    }
  }
  return q;
}

QueryStats query_stats(const MaxSatQuery &q) {
  QueryStats s;
  s.vars = q.vars.num_vars();
  s.soft = q.soft.size();
  s.hard = q.hard.size();
  for (const auto &c : q.soft) s.literal_occurrences += c.lits.size();
  for (const auto &c : q.hard) s.literal_occurrences += c.size();
  return s;
}

bool clause_satisfied(const Clause &c, const Assignment &a) {
  for (Lit lit : c) {
    const bool val = a[static_cast<std::size_t>(std::abs(lit))] != 0;
    if (val == (lit > 0)) return true;
  }
  return false;
}

std::optional<Weight> weight_of_assignment(const MaxSatQuery &q, const Assignment &a) {
  if (a.size() < q.vars.num_vars() + 1)
    throw UsageError("assignment covers " + std::to_string(a.size() ? a.size() - 1 : 0) +
                     " of " + std::to_string(q.vars.num_vars()) + " variables");
  for (const auto &c : q.hard)
    if (!clause_satisfied(c, a)) return std::nullopt;
  Weight w = 0;
  for (const auto &c : q.soft)
    if (!clause_satisfied(c.lits, a)) w += c.weight;
  return w;
}

void complete_assignment(const MaxSatQuery &q, Assignment &a) {
  const auto &v = q.vars;
  a.resize(v.num_vars() + 1, 0);
  const int first_noise = static_cast<int>(v.num_feature_vars()) + 1;
  const int first_aux = first_noise + static_cast<int>(v.num_samples());
  auto is_noise = [&](int x) { return x >= first_noise && x < first_aux; };
  auto is_aux = [&](int x) { return x >= first_aux; };

  for (int x = first_noise; x <= static_cast<int>(v.num_vars()); ++x) a[x] = is_aux(x) ? 1 : 0;

  // An aux var is forced false when a guard clause needs it.
  for (const auto &c : q.hard) {
    int aux = 0;
    bool others_true = false;
    for (Lit lit : c) {
      const int x = std::abs(lit);
      if (lit < 0 && is_aux(x)) {
        aux = x;
      } else if ((a[x] != 0) == (lit > 0)) {
        others_true = true;
      }
    }
    if (aux && !others_true) a[aux] = 0;
  }
  for (const auto &c : q.hard) {
    int eta = 0;
    for (Lit lit : c)
      if (lit > 0 && is_noise(lit)) eta = lit;
    if (eta && !clause_satisfied(c, a)) a[eta] = 1;
  }
}

}  // namespace imli
