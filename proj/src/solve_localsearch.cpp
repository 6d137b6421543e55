#include <algorithm>
#include <chrono>
#include <cstdlib>

#include "imli/maxsat.hpp"

namespace imli {

namespace {

// Indexed set with O(1) insert/erase, used for the broken-item lists.
class IndexSet {
 public:
  explicit IndexSet(std::size_t universe) : pos_(universe, npos) {}
  void insert(std::size_t x) {
    if (pos_[x] != npos) return;
    pos_[x] = items_.size();
    items_.push_back(x);
  }
  void erase(std::size_t x) {
    const std::size_t p = pos_[x];
    if (p == npos) return;
    items_[p] = items_.back();
    pos_[items_[p]] = p;
    items_.pop_back();
    pos_[x] = npos;
  }
  const std::vector<std::size_t> &items() const { return items_; }
  bool empty() const { return items_.empty(); }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> pos_;
  std::vector<std::size_t> items_;
};

// The query seen through its feature variables.  Each noise variable owns a
// list of cover sets (feature vars).  A positive-type owner is misclassified
// when some cover set has no true var; a negative-type owner when every
// cover set has a true var.
class FeatureView {
 public:
  explicit FeatureView(const MaxSatQuery &q) {
    const auto &v = q.vars;
    nf_ = v.num_feature_vars();
    const int first_noise = static_cast<int>(nf_) + 1;
    const int first_aux = first_noise + static_cast<int>(v.num_samples());
    const std::size_t owners = v.num_samples();

    desired_.assign(nf_, 0);
    vweight_.assign(nf_, 0);
    penalty_.assign(owners, 0);
    negative_.assign(owners, 0);
    owner_sets_.assign(owners, {});
    occ_.assign(nf_, {});

    for (const auto &c : q.soft) {
      if (c.lits.size() != 1) throw SolverError("local search: non-unit soft clause");
      const int lit = c.lits[0];
      const int x = std::abs(lit);
      if (x <= static_cast<int>(nf_)) {
        desired_[x - 1] = lit > 0;
        vweight_[x - 1] += c.weight;
      } else if (x < first_aux && lit < 0) {
        penalty_[x - first_noise] += c.weight;
      } else {
        throw SolverError("local search: unexpected soft clause shape");
      }
    }

    std::vector<long> aux_set(v.num_vars() + 1, -1);
    for (const auto &c : q.hard) {
      if (!c.empty() && c[0] >= first_noise && c[0] < first_aux) {
        const std::size_t owner = static_cast<std::size_t>(c[0] - first_noise);
        const bool head = c.size() > 1 && c[1] >= first_aux;
        if (head) {
          negative_[owner] = 1;
          for (std::size_t i = 1; i < c.size(); ++i) {
            aux_set[c[i]] = static_cast<long>(new_set(owner));
          }
        } else {
          const std::size_t s = new_set(owner);
          for (std::size_t i = 1; i < c.size(); ++i) {
            if (c[i] <= 0 || c[i] > static_cast<int>(nf_))
              throw SolverError("local search: unexpected cover clause");
            add_member(s, static_cast<std::size_t>(c[i] - 1));
          }
        }
      } else if (c.size() == 2 && c[0] < 0 && -c[0] >= first_aux && c[1] < 0 &&
                 -c[1] <= static_cast<int>(nf_)) {
        const long s = aux_set[-c[0]];
        if (s < 0) throw SolverError("local search: guard before its head clause");
        add_member(static_cast<std::size_t>(s), static_cast<std::size_t>(-c[1] - 1));
      } else {
        throw SolverError("local search: unexpected hard clause shape");
      }
    }
    for (std::size_t f = 0; f < nf_; ++f) {
      std::vector<std::size_t> owners_seen;
      for (std::size_t s : occ_[f]) owners_seen.push_back(set_owner_[s]);
      std::sort(owners_seen.begin(), owners_seen.end());
      if (std::adjacent_find(owners_seen.begin(), owners_seen.end()) != owners_seen.end())
        throw SolverError("local search: feature var in two cover sets of one sample");
    }
  }

  std::size_t num_features() const { return nf_; }
  std::size_t num_owners() const { return penalty_.size(); }
  const std::vector<std::uint8_t> &desired() const { return desired_; }

  friend class Walker;

 private:
  std::size_t new_set(std::size_t owner) {
    const std::size_t s = set_owner_.size();
    set_owner_.push_back(owner);
    members_.emplace_back();
    owner_sets_[owner].push_back(s);
    return s;
  }
  void add_member(std::size_t s, std::size_t f) {
    members_[s].push_back(f);
    occ_[f].push_back(s);
  }

  std::size_t nf_ = 0;
  std::vector<std::uint8_t> desired_;
  std::vector<Weight> vweight_;
  std::vector<Weight> penalty_;
  std::vector<std::uint8_t> negative_;
  std::vector<std::size_t> set_owner_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::vector<std::size_t>> owner_sets_;
  std::vector<std::vector<std::size_t>> occ_;
};

class Walker {
 public:
  Walker(const FeatureView &view, std::uint64_t seed)
      : v_(view), rng_(seed), bits_(view.nf_, 0), cnt_(view.set_owner_.size(), 0),
        zeros_(view.num_owners(), 0), mis_(view.num_owners()), violated_(view.nf_) {}

  void reset(const std::vector<std::uint8_t> &bits) {
    bits_ = bits;
    mis_ = IndexSet(zeros_.size());
    violated_ = IndexSet(bits_.size());
    mis_flags_.assign(zeros_.size(), 0);
    violated_flags_.assign(bits_.size(), 0);
    violated_weight_ = 0;
    std::fill(cnt_.begin(), cnt_.end(), 0);
    for (std::size_t s = 0; s < cnt_.size(); ++s)
      for (std::size_t f : v_.members_[s]) cnt_[s] += bits_[f];
    std::fill(zeros_.begin(), zeros_.end(), 0);
    for (std::size_t s = 0; s < cnt_.size(); ++s)
      if (cnt_[s] == 0) ++zeros_[v_.set_owner_[s]];
    cost_ = 0;
    mis_weight_ = 0;
    for (std::size_t o = 0; o < zeros_.size(); ++o) refresh_owner(o);
    for (std::size_t f = 0; f < bits_.size(); ++f) refresh_var(f);
  }

  Weight cost() const { return cost_; }
  const std::vector<std::uint8_t> &bits() const { return bits_; }

  // Cost change if feature f were flipped.
  long long delta(std::size_t f) const {
    const bool on = !bits_[f];
    long long d = 0;
    if (v_.vweight_[f]) {
      const bool was_ok = bits_[f] == v_.desired_[f];
      d += was_ok ? static_cast<long long>(v_.vweight_[f]) : -static_cast<long long>(v_.vweight_[f]);
    }
    for (std::size_t s : v_.occ_[f]) {
      const std::size_t o = v_.set_owner_[s];
      const auto z = zeros_[o];
      const auto pen = static_cast<long long>(v_.penalty_[o]);
      if (on && cnt_[s] == 0 && z == 1) d += v_.negative_[o] ? pen : -pen;
      if (!on && cnt_[s] == 1 && z == 0) d += v_.negative_[o] ? -pen : pen;
    }
    return d;
  }

  void flip(std::size_t f) {
    const bool on = !bits_[f];
    bits_[f] = on;
    for (std::size_t s : v_.occ_[f]) {
      const std::size_t o = v_.set_owner_[s];
      if (on) {
        if (cnt_[s]++ == 0) {
          --zeros_[o];
          refresh_owner(o);
        }
      } else {
        if (--cnt_[s] == 0) {
          ++zeros_[o];
          refresh_owner(o);
        }
      }
    }
    refresh_var(f);
  }

  // Repeated best-improvement moves until no flip lowers the cost.
  void descend() {
    for (;;) {
      long long best = 0;
      std::size_t arg = 0;
      for (std::size_t f = 0; f < bits_.size(); ++f) {
        const long long d = delta(f);
        if (d < best) {
          best = d;
          arg = f;
        }
      }
      if (best >= 0) return;
      flip(arg);
    }
  }

  // One WalkSAT-style move.  Returns false when nothing is broken.
  bool step(double noise) {
    const Weight total = mis_weight_ + violated_weight_;
    if (total == 0) return false;
    candidates_.clear();
    Weight r = rng_.below(total);
    if (r < violated_weight_) {
      for (std::size_t f : violated_.items()) {
        if (r < v_.vweight_[f]) {
          candidates_.push_back(f);
          break;
        }
        r -= v_.vweight_[f];
      }
    } else {
      r -= violated_weight_;
      std::size_t owner = mis_.items().front();
      for (std::size_t o : mis_.items()) {
        if (r < v_.penalty_[o]) {
          owner = o;
          break;
        }
        r -= v_.penalty_[o];
      }
      collect_repairs(owner);
    }
    if (candidates_.empty()) return true;

    std::size_t pick;
    if (rng_.uniform() < noise) {
      pick = candidates_[rng_.below(candidates_.size())];
    } else {
      long long best = 0;
      std::size_t ties = 0;
      pick = candidates_.front();
      for (std::size_t f : candidates_) {
        const long long d = delta(f);
        if (ties == 0 || d < best) {
          best = d;
          pick = f;
          ties = 1;
        } else if (d == best && rng_.below(++ties) == 0) {
          pick = f;
        }
      }
    }
    flip(pick);
    return true;
  }

 private:
  void collect_repairs(std::size_t o) {
    const auto &sets = v_.owner_sets_[o];
    if (!v_.negative_[o]) {
      // Turn on a var in one unsatisfied cover set.
      std::size_t seen = 0, chosen = 0;
      for (std::size_t s : sets)
        if (cnt_[s] == 0 && !v_.members_[s].empty() && rng_.below(++seen) == 0) chosen = s;
      if (seen) candidates_ = v_.members_[chosen];
      return;
    }
    // Turn off true vars in the cover sets closest to empty.
    std::uint32_t least = UINT32_MAX;
    for (std::size_t s : sets) least = std::min(least, cnt_[s]);
    for (std::size_t s : sets) {
      if (cnt_[s] != least) continue;
      for (std::size_t f : v_.members_[s])
        if (bits_[f]) candidates_.push_back(f);
    }
  }

  void refresh_owner(std::size_t o) {
    const bool now = v_.negative_[o] ? zeros_[o] == 0 : zeros_[o] > 0;
    const bool was = mis_flag(o);
    if (now == was) return;
    if (now) {
      mis_.insert(o);
      mis_weight_ += v_.penalty_[o];
      cost_ += v_.penalty_[o];
    } else {
      mis_.erase(o);
      mis_weight_ -= v_.penalty_[o];
      cost_ -= v_.penalty_[o];
    }
    set_mis_flag(o, now);
  }

  void refresh_var(std::size_t f) {
    const bool now = v_.vweight_[f] && bits_[f] != v_.desired_[f];
    const bool was = violated_flag(f);
    if (now == was) return;
    if (now) {
      violated_.insert(f);
      violated_weight_ += v_.vweight_[f];
      cost_ += v_.vweight_[f];
    } else {
      violated_.erase(f);
      violated_weight_ -= v_.vweight_[f];
      cost_ -= v_.vweight_[f];
    }
    set_violated_flag(f, now);
  }

  bool mis_flag(std::size_t o) const { return mis_flags_[o]; }
  void set_mis_flag(std::size_t o, bool b) { mis_flags_[o] = b; }
  bool violated_flag(std::size_t f) const { return violated_flags_[f]; }
  void set_violated_flag(std::size_t f, bool b) { violated_flags_[f] = b; }

  const FeatureView &v_;
  Rng rng_;
  std::vector<std::uint8_t> bits_;
  std::vector<std::uint32_t> cnt_;
  std::vector<std::uint32_t> zeros_;
  IndexSet mis_;
  IndexSet violated_;
  std::vector<std::uint8_t> mis_flags_;
  std::vector<std::uint8_t> violated_flags_;
  std::vector<std::size_t> candidates_;
  Weight cost_ = 0;
  Weight mis_weight_ = 0;
  Weight violated_weight_ = 0;
};

}  // namespace

SolveOutcome solve_localsearch(const MaxSatQuery &q, const LocalSearchOptions &opts) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  const FeatureView view(q);
  Walker walker(view, opts.seed);

  const std::uint64_t max_flips =
      opts.max_flips ? opts.max_flips : std::max<std::uint64_t>(2000, 20 * q.soft.size());
  const std::uint64_t restart_after =
      opts.restart_after ? opts.restart_after : std::max<std::uint64_t>(100, max_flips / 10);

  // Start from the assignment that satisfies every V clause, i.e. the prior.
  walker.reset(view.desired());
  walker.descend();
  std::vector<std::uint8_t> best_bits = walker.bits();
  Weight best_cost = walker.cost();
  bool timed_out = false;

  std::uint64_t since_best = 0;
  for (std::uint64_t flip = 0; flip < max_flips && best_cost > 0; ++flip) {
    if ((flip & 127) == 0 && elapsed() > opts.time_limit) {
      timed_out = true;
      break;
    }
    if (!walker.step(opts.noise)) break;
    if (walker.cost() < best_cost) {
      walker.descend();
      best_cost = walker.cost();
      best_bits = walker.bits();
      since_best = 0;
    } else if (++since_best >= restart_after) {
      walker.reset(best_bits);
      since_best = 0;
    }
  }

  SolveOutcome out;
  out.status = SolveStatus::best_found;
  out.assignment.assign(q.vars.num_vars() + 1, 0);
  for (std::size_t f = 0; f < best_bits.size(); ++f) out.assignment[f + 1] = best_bits[f];
  complete_assignment(q, out.assignment);
  out.weight = weight_of_assignment(q, out.assignment);
  if (!out.weight || *out.weight != best_cost)
    throw std::logic_error("local search bookkeeping disagrees with clause evaluation");
  if (timed_out) out.message = "time limit reached";
  out.wall_time = elapsed();
  return out;
}

}  // namespace imli
