#include <chrono>

#include "imli/maxsat.hpp"

namespace imli {

SolveOutcome solve_bruteforce(const MaxSatQuery &q, std::uint64_t budget) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = q.vars.num_feature_vars();
  if (n >= 63 || (1ULL << n) > budget)
    throw UsageError("brute force needs 2^" + std::to_string(n) +
                     " feature assignments, over budget " + std::to_string(budget));

  SolveOutcome best;
  best.status = SolveStatus::infeasible;
  Assignment a(q.vars.num_vars() + 1, 0);
  // Feature var 1 is the most significant bit, so increasing masks visit
  // assignments in lexicographic order and the first optimum wins ties.
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) a[i + 1] = (mask >> (n - 1 - i)) & 1;
    complete_assignment(q, a);
    const auto w = weight_of_assignment(q, a);
    if (w && (!best.weight || *w < *best.weight)) {
      best.weight = w;
      best.assignment = a;
      best.status = SolveStatus::optimum;
    }
  }
  best.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return best;
}

}  // namespace imli
