#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "imli/common.hpp"
#include "imli/rules.hpp"

namespace imli {

// DIMACS-style literal: +id or -id, id >= 1.
using Lit = int;
using Clause = std::vector<Lit>;
using Weight = std::uint64_t;

struct WeightedClause {
  Clause lits;
  Weight weight = 1;
  bool operator==(const WeightedClause &) const = default;
};

// Dense variable ids: feature vars b(j,l) first (clause-major), then one
// noise var per sample, then k auxiliary vars per negative sample.
class VarTable {
 public:
  VarTable() = default;
  VarTable(std::size_t m_prime, std::size_t k, const Labels &y);

  std::size_t m_prime() const { return m_prime_; }
  std::size_t k() const { return k_; }
  std::size_t num_samples() const { return aux_slot_.size(); }
  std::size_t num_negative() const { return num_negative_; }

  std::size_t num_feature_vars() const { return k_ * m_prime_; }
  std::size_t num_vars() const { return num_feature_vars() + num_samples() + k_ * num_negative_; }

  int feature_var(std::size_t j, std::size_t l) const {
    return static_cast<int>(l * m_prime_ + j + 1);
  }
  int noise_var(std::size_t q) const {
    return static_cast<int>(num_feature_vars() + q + 1);
  }
  // Only defined for negative samples.
  int aux_var(std::size_t q, std::size_t l) const;
  bool has_aux(std::size_t q) const { return aux_slot_[q] >= 0; }

  bool is_feature_var(int v) const { return v >= 1 && v <= static_cast<int>(num_feature_vars()); }

  bool operator==(const VarTable &) const = default;

 private:
  std::size_t m_prime_ = 0;
  std::size_t k_ = 0;
  std::size_t num_negative_ = 0;
  std::vector<long> aux_slot_;
};

struct MaxSatQuery {
  VarTable vars;
  std::vector<WeightedClause> soft;
  std::vector<Clause> hard;
  Weight lambda = 1;
  std::size_t k = 0;
  std::size_t m_prime = 0;
};

// Prior must be an empty rule or a k-clause CNF over the same feature space.
MaxSatQuery build_query(const BoolMatrix &X, const Labels &y, std::size_t k, Weight lambda,
                        const Rule &prior = {});

struct QueryStats {
  std::size_t vars = 0;
  std::size_t soft = 0;
  std::size_t hard = 0;
  std::size_t literal_occurrences = 0;
  bool operator==(const QueryStats &) const = default;
};

QueryStats query_stats(const MaxSatQuery &q);

// Index 0 unused; assignment[v] is the value of variable v.
using Assignment = std::vector<std::uint8_t>;

bool clause_satisfied(const Clause &c, const Assignment &a);

// Sum of falsified soft weights, or nullopt if a hard clause is falsified.
// Throws UsageError when the assignment does not cover every variable.
std::optional<Weight> weight_of_assignment(const MaxSatQuery &q, const Assignment &a);

// Given the feature variables in `a`, sets every auxiliary and noise
// variable to its cheapest hard-feasible value.
void complete_assignment(const MaxSatQuery &q, Assignment &a);

}  // namespace imli
