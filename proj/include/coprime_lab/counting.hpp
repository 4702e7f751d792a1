#pragma once

// Exact counts of constrained tuples in boxes x <= bounds.
//
// Counters:
//   count_box_bruteforce  enumeration with prefix pruning (the oracle)
//   count_mutual_mobius   Σ_d μ(d) ∏_j #{x_j <= B_j : d | x_j, side_j(x_j)}
//   count_kwise_mobius    the same expansion applied to every k-subset of
//                         coordinates: [x ∈ kC] = ∏_S Σ_{d_S | gcd(x_S)} μ(d_S)
//   count_toth            P_r^{(u)} by conditioning on the last coordinate
// plus divisibility-pattern counts and gcd/lcm weighted sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coprime_lab/arith.hpp"
#include "coprime_lab/constants.hpp"
#include "coprime_lab/constraint.hpp"
#include "coprime_lab/error.hpp"
#include "coprime_lab/parallel.hpp"
#include "coprime_lab/rational.hpp"

namespace coprime_lab {

inline constexpr std::uint64_t kBruteForceBudget = 1'000'000'000;

struct Box {
  std::vector<std::uint64_t> bounds;
  std::uint64_t n = 0;

  static Box make(std::uint64_t n, std::vector<std::uint64_t> bounds) {
    if (bounds.empty()) throw invalid_argument("box needs at least one bound");
    for (const auto b : bounds)
      if (b > n) throw invalid_argument("box bound " + std::to_string(b) + " exceeds scale " + std::to_string(n));
    return {std::move(bounds), n};
  }

  static Box cube(std::uint64_t n, int r) { return {std::vector<std::uint64_t>(static_cast<std::size_t>(r), n), n}; }

  // Bounds ⌊n α_j⌋.
  static Box from_alpha(std::uint64_t n, const std::vector<double>& alpha) {
    std::vector<std::uint64_t> bounds;
    for (const double a : alpha) {
      if (!(a >= 0.0 && a <= 1.0)) throw invalid_argument("alpha components must lie in [0, 1]");
      bounds.push_back(static_cast<std::uint64_t>(std::floor(static_cast<long double>(n) * a)));
    }
    return make(n, std::move(bounds));
  }

  int r() const { return static_cast<int>(bounds.size()); }
  std::uint64_t min_bound() const { return *std::min_element(bounds.begin(), bounds.end()); }
  std::uint64_t max_bound() const { return *std::max_element(bounds.begin(), bounds.end()); }

  // ∏ bounds, saturating.
  uint128 cells() const {
    uint128 c = 1;
    for (const auto b : bounds) {
      if (b == 0) return 0;
      if (c > (~uint128{0}) / b) return ~uint128{0};
      c *= b;
    }
    return c;
  }

  friend bool operator==(const Box&, const Box&) = default;
};

enum class CountMethod { brute_force, mobius, toth, prefix_grid };

inline const char* to_string(CountMethod m) {
  switch (m) {
    case CountMethod::brute_force: return "brute_force";
    case CountMethod::mobius: return "mobius";
    case CountMethod::toth: return "toth";
    case CountMethod::prefix_grid: return "prefix_grid";
  }
  return "?";
}

struct CountResult {
  uint128 count;
  TupleConstraint constraint;
  Box box;
  CountMethod method;
};

namespace detail {

inline void require_matching(const Box& box, const TupleConstraint& c) {
  if (box.r() != c.r())
    throw invalid_argument("box has " + std::to_string(box.r()) + " coordinates, constraint has r=" +
                           std::to_string(c.r()));
}

inline void push_distinct_primes(std::uint64_t v, const ArithTables* tables, std::vector<std::uint64_t>& out) {
  if (tables && v <= tables->limit()) {
    tables->distinct_primes(v, [&](std::uint64_t p) { out.push_back(p); });
    return;
  }
  for (const auto& pp : factorize(v).pairs) out.push_back(pp.prime);
}

}  // namespace detail

// Membership of a positive r-tuple. The k-wise test counts, for every prime,
// how many coordinates it divides.
inline bool member(std::span<const std::uint64_t> x, const TupleConstraint& c, const ArithTables* tables = nullptr) {
  const int r = c.r();
  if (x.size() != static_cast<std::size_t>(r))
    throw invalid_argument("tuple has " + std::to_string(x.size()) + " coordinates, constraint has r=" +
                           std::to_string(r));
  for (int j = 0; j < r; ++j) {
    if (x[static_cast<std::size_t>(j)] == 0) throw invalid_argument("tuple coordinates must be positive");
    if (!c.condition(j).accepts(x[static_cast<std::size_t>(j)])) return false;
  }
  const int k = c.effective_k();
  if (k == r) {
    std::uint64_t g = 0;
    for (const auto v : x) {
      g = std::gcd(g, v);
      if (g == 1) return true;
    }
    return g == 1;
  }
  if (k == 2) {
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i + 1; j < x.size(); ++j)
        if (std::gcd(x[i], x[j]) != 1) return false;
    return true;
  }
  std::vector<std::uint64_t> primes;
  for (const auto v : x) detail::push_distinct_primes(v, tables, primes);
  std::sort(primes.begin(), primes.end());
  for (std::size_t i = 0; i < primes.size();) {
    std::size_t j = i;
    while (j < primes.size() && primes[j] == primes[i]) ++j;
    if (static_cast<int>(j - i) >= k) return false;
    i = j;
  }
  return true;
}

inline bool member(std::initializer_list<std::uint64_t> x, const TupleConstraint& c) {
  return member(std::span<const std::uint64_t>(x.begin(), x.size()), c);
}

// ---------------------------------------------------------------------------
// Brute force

struct BruteForceOptions {
  std::uint64_t max_cells = kBruteForceBudget;
  unsigned workers = 0;  // 0: worker_count()
};

namespace detail {

// Row-major enumeration; each coordinate is checked against the prefix as soon
// as it is placed, so the first violated gcd prunes the whole subtree.
class BruteForceEnumerator {
 public:
  BruteForceEnumerator(const Box& box, const TupleConstraint& c)
      : bounds_(box.bounds), c_(c), r_(c.r()), k_(c.effective_k()) {
    for (int j = 0; j < r_; ++j) conds_.push_back(c.condition(j));
    const std::uint64_t maxb = box.max_bound();
    if (k_ == 2 && r_ > 2 && maxb <= kCoprimeTableLimit) {
      stride_ = maxb + 1;
      coprime_.assign(stride_ * stride_, 0);
      for (std::uint64_t a = 1; a <= maxb; ++a)
        for (std::uint64_t b = 1; b <= maxb; ++b) coprime_[a * stride_ + b] = std::gcd(a, b) == 1 ? 1 : 0;
    }
    if (k_ != 2 && k_ != r_) {
      // Distinct prime lists for every value; multiplicity counters per prime.
      const ArithTables tables(std::max<std::uint64_t>(2, maxb));
      offsets_.assign(maxb + 2, 0);
      for (std::uint64_t v = 1; v <= maxb; ++v) {
        offsets_[v] = static_cast<std::uint32_t>(plist_.size());
        tables.distinct_primes(v, [&](std::uint64_t p) { plist_.push_back(static_cast<std::uint32_t>(p)); });
      }
      offsets_[maxb + 1] = static_cast<std::uint32_t>(plist_.size());
    }
  }

  uint128 count_first(std::uint64_t lo, std::uint64_t hi) const {
    State s;
    s.x.assign(static_cast<std::size_t>(r_), 0);
    s.g.assign(static_cast<std::size_t>(r_) + 1, 0);
    if (k_ != 2 && k_ != r_) s.mult.assign(bounds_.empty() ? 1 : (*std::max_element(bounds_.begin(), bounds_.end()) + 1), 0);
    uint128 total = 0;
    for (std::uint64_t v = lo; v < hi; ++v) total += place(s, 0, v + 1);
    return total;
  }

 private:
  static constexpr std::uint64_t kCoprimeTableLimit = 4096;

  struct State {
    std::vector<std::uint64_t> x;
    std::vector<std::uint64_t> g;      // prefix gcds for the mutual test
    std::vector<std::uint8_t> mult;    // prime multiplicities for k-wise
  };

  bool coprime(std::uint64_t a, std::uint64_t b) const {
    if (!coprime_.empty()) return coprime_[a * stride_ + b] != 0;
    return std::gcd(a, b) == 1;
  }

  std::span<const std::uint32_t> primes_of(std::uint64_t v) const {
    return {plist_.data() + offsets_[v], plist_.data() + offsets_[v + 1]};
  }

  // Places value v at `depth` and counts completions.
  uint128 place(State& s, int depth, std::uint64_t v) const {
    const auto d = static_cast<std::size_t>(depth);
    if (!conds_[d].accepts(v)) return 0;
    if (k_ == r_) {
      s.g[d + 1] = std::gcd(s.g[d], v);
      if (depth == r_ - 1) return s.g[d + 1] == 1 ? 1 : 0;
    } else if (k_ == 2) {
      for (std::size_t i = 0; i < d; ++i)
        if (!coprime(s.x[i], v)) return 0;
    } else {
      for (const auto p : primes_of(v))
        if (s.mult[p] + 1 >= k_) return 0;
    }
    if (depth == r_ - 1) return 1;
    s.x[d] = v;
    if (k_ != 2 && k_ != r_)
      for (const auto p : primes_of(v)) ++s.mult[p];
    uint128 total = 0;
    if (depth + 1 == r_ - 1) {
      total = last_level(s, d + 1);
    } else {
      const std::uint64_t b = bounds_[d + 1];
      for (std::uint64_t w = 1; w <= b; ++w) total += place(s, depth + 1, w);
    }
    if (k_ != 2 && k_ != r_)
      for (const auto p : primes_of(v)) --s.mult[p];
    return total;
  }

  // Innermost coordinate: one membership test per value.
  uint128 last_level(State& s, std::size_t d) const {
    const std::uint64_t b = bounds_[d];
    const auto& cond = conds_[d];
    std::uint64_t total = 0;
    if (k_ == 2 && !coprime_.empty()) {
      const std::uint8_t* rows[64];
      for (std::size_t i = 0; i < d; ++i) rows[i] = coprime_.data() + s.x[i] * stride_;
      for (std::uint64_t w = 1; w <= b; ++w) {
        std::uint8_t ok = 1;
        for (std::size_t i = 0; i < d; ++i) ok &= rows[i][w];
        if (ok && cond.accepts(w)) ++total;
      }
      return total;
    }
    if (k_ == r_) {
      const std::uint64_t g = s.g[d];
      for (std::uint64_t w = 1; w <= b; ++w)
        if (std::gcd(g, w) == 1 && cond.accepts(w)) ++total;
      return total;
    }
    if (k_ == 2) {
      for (std::uint64_t w = 1; w <= b; ++w) {
        bool ok = cond.accepts(w);
        for (std::size_t i = 0; ok && i < d; ++i) ok = std::gcd(s.x[i], w) == 1;
        if (ok) ++total;
      }
      return total;
    }
    // k-wise: w fails iff one of its primes already divides k−1 coordinates.
    bool saturated = false;
    for (std::size_t i = 0; i < d && !saturated; ++i)
      for (const auto p : primes_of(s.x[i]))
        if (s.mult[p] + 1 >= k_) saturated = true;
    if (!saturated && cond.kind == SideCondition::Kind::none) return b;
    for (std::uint64_t w = 1; w <= b; ++w) {
      if (!cond.accepts(w)) continue;
      bool ok = true;
      for (const auto p : primes_of(w))
        if (s.mult[p] + 1 >= k_) {
          ok = false;
          break;
        }
      if (ok) ++total;
    }
    return total;
  }

  std::vector<std::uint64_t> bounds_;
  const TupleConstraint& c_;
  int r_;
  int k_;
  std::vector<SideCondition> conds_;
  std::uint64_t stride_ = 0;
  std::vector<std::uint8_t> coprime_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> plist_;
};

}  // namespace detail

inline CountResult count_box_bruteforce(const Box& box, const TupleConstraint& c, BruteForceOptions opts = {}) {
  detail::require_matching(box, c);
  const uint128 cells = box.cells();
  if (cells > opts.max_cells)
    throw capacity_error("brute-force box has " + to_string(cells) + " cells, budget is " +
                         std::to_string(opts.max_cells));
  if (cells == 0) return {0, c, box, CountMethod::brute_force};
  const detail::BruteForceEnumerator e(box, c);
  const uint128 count = parallel_sum(
      0, box.bounds[0], [&](std::uint64_t lo, std::uint64_t hi) { return e.count_first(lo, hi); },
      opts.workers ? opts.workers : worker_count());
  return {count, c, box, CountMethod::brute_force};
}

// ---------------------------------------------------------------------------
// Möbius counters

namespace detail {

inline std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
  if (m == 1) return 0;
  std::int64_t g = m, x = 0, x1 = 1, a1 = a % m;
  while (a1 != 0) {
    const std::int64_t q = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - q * a1);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  return ((x % m) + m) % m;
}

// #{1 <= x <= B : L | x and x satisfies one side condition}.
class CoordinateCounter {
 public:
  explicit CoordinateCounter(const SideCondition& s) : cond_(s) {
    if (s.kind == SideCondition::Kind::coprime_to) divisors_ = squarefree_divisors(factorize(s.modulus).primes());
  }

  std::uint64_t count(std::uint64_t B, std::uint64_t L) const {
    if (L > B) return 0;
    switch (cond_.kind) {
      case SideCondition::Kind::none: return B / L;
      case SideCondition::Kind::coprime_to: {
        if (std::gcd(L, cond_.modulus) != 1) return 0;
        std::int64_t total = 0;
        for (const auto& [e, mu] : divisors_) {
          const std::uint64_t m = L * e;
          if (m <= B) total += mu * static_cast<std::int64_t>(B / m);
        }
        return static_cast<std::uint64_t>(total);
      }
      case SideCondition::Kind::divisible_by:
      case SideCondition::Kind::residue: return progression(B, L, cond_.modulus, cond_.residue);
    }
    return 0;
  }

  // x ≡ 0 (mod L), x ≡ b (mod a); solvable iff gcd(L, a) | b.
  static std::uint64_t progression(std::uint64_t B, std::uint64_t L, std::uint64_t a, std::uint64_t b) {
    const std::uint64_t g = std::gcd(L, a);
    if (b % g != 0) return 0;
    const std::uint64_t a1 = a / g;
    const std::uint64_t L1 = L / g;
    const auto t0 = static_cast<std::uint64_t>(
        (static_cast<uint128>(b / g) *
         static_cast<std::uint64_t>(mod_inverse(static_cast<std::int64_t>(L1 % a1), static_cast<std::int64_t>(a1)))) %
        a1);
    const uint128 M = static_cast<uint128>(L) * a1;
    const uint128 c = static_cast<uint128>(L) * t0;
    if (c == 0) return static_cast<std::uint64_t>(B / M);
    if (c > B) return 0;
    return static_cast<std::uint64_t>((B - c) / M + 1);
  }

 private:
  SideCondition cond_;
  std::vector<SignedDivisor> divisors_;
};

inline std::vector<CoordinateCounter> coordinate_counters(const TupleConstraint& c) {
  std::vector<CoordinateCounter> out;
  for (int j = 0; j < c.r(); ++j) out.emplace_back(c.condition(j));
  return out;
}

inline void require_tables(const ArithTables& tables, std::uint64_t needed) {
  if (tables.limit() < needed)
    throw capacity_error("arith tables up to " + std::to_string(tables.limit()) + " but " + std::to_string(needed) +
                         " is needed");
}

}  // namespace detail

// Mutual coprimality (any class whose set coincides with it: kwise k=r, or
// pairwise at r=2) with any per-coordinate side conditions.
inline CountResult count_mutual_mobius(const Box& box, const TupleConstraint& c, const ArithTables& tables) {
  detail::require_matching(box, c);
  if (c.effective_k() != c.r())
    throw unsupported_formula("count_mutual_mobius handles mutual coprimality only; use count_kwise_mobius");
  const std::uint64_t top = box.min_bound();
  if (top == 0) return {0, c, box, CountMethod::mobius};
  detail::require_tables(tables, top);
  const auto counters = detail::coordinate_counters(c);
  int128 total = 0;
  for (std::uint64_t d = 1; d <= top; ++d) {
    const int mu = tables.mobius(d);
    if (mu == 0) continue;
    int128 term = mu;
    for (int j = 0; j < c.r() && term != 0; ++j)
      term = detail::checked_mul(term, counters[static_cast<std::size_t>(j)].count(box.bounds[static_cast<std::size_t>(j)], d));
    total = detail::checked_add(total, term);
  }
  if (total < 0) throw error("negative Möbius count; arithmetic invariant violated");
  return {static_cast<uint128>(total), c, box, CountMethod::mobius};
}

inline CountResult count_mutual_mobius(const Box& box, const TupleConstraint& c) {
  const ArithTables tables(std::max<std::uint64_t>(2, box.min_bound()));
  return count_mutual_mobius(box, c, tables);
}

inline constexpr std::size_t kDefaultMobiusTerms = 20'000'000;

// Expansion of ∏_{|S|=k} [gcd(x_S) = 1] into a signed sum over squarefree
// (d_S); term weights are aggregated by the per-coordinate lcms
// L_j = lcm{d_S : j ∈ S}. The plan depends on the box and k only, so one plan
// serves every side-condition variant.
class MobiusPlan {
 public:
  static MobiusPlan build(const std::vector<std::uint64_t>& bounds, int k, const ArithTables& tables,
                          std::size_t max_terms = kDefaultMobiusTerms) {
    const int r = static_cast<int>(bounds.size());
    if (r < 2 || k < 2 || k > r) throw invalid_argument("MobiusPlan needs 2 <= k <= r");
    MobiusPlan plan;
    plan.bounds_ = bounds;
    plan.r_ = r;
    plan.k_ = k;
    if (*std::min_element(bounds.begin(), bounds.end()) == 0) return plan;
    detail::require_tables(tables, *std::max_element(bounds.begin(), bounds.end()));

    std::vector<std::vector<int>> subsets;
    std::vector<int> cur;
    std::function<void(int)> choose = [&](int start) {
      if (static_cast<int>(cur.size()) == k) {
        subsets.push_back(cur);
        return;
      }
      for (int i = start; i < r; ++i) {
        cur.push_back(i);
        choose(i + 1);
        cur.pop_back();
      }
    };
    choose(0);

    // Level-by-level over the subsets; states with equal lcm vectors merge.
    using State = std::vector<std::uint32_t>;
    struct StateHash {
      std::size_t operator()(const State& s) const {
        std::uint64_t h = 0x84222325cbf29ce4ull;
        for (const auto v : s) h = (h ^ v) * 0x100000001b3ull;
        return static_cast<std::size_t>(h);
      }
    };
    std::unordered_map<State, std::int64_t, StateHash> level{{State(static_cast<std::size_t>(r), 1), 1}};
    std::vector<std::uint64_t> primes;
    for (const auto& S : subsets) {
      std::unordered_map<State, std::int64_t, StateHash> next;
      next.reserve(level.size() * 2);
      for (const auto& [L, w] : level) {
        // Tightest coordinate of S bounds the new prime factors of d_S.
        int tight = S[0];
        for (const int j : S)
          if (bounds[static_cast<std::size_t>(j)] / L[static_cast<std::size_t>(j)] <
              bounds[static_cast<std::size_t>(tight)] / L[static_cast<std::size_t>(tight)])
            tight = j;
        const std::uint64_t Lt = L[static_cast<std::size_t>(tight)];
        const std::uint64_t room = bounds[static_cast<std::size_t>(tight)] / Lt;
        primes.clear();
        tables.distinct_primes(Lt, [&](std::uint64_t p) { primes.push_back(p); });
        const auto shared = squarefree_divisors(primes);
        State out = L;
        for (std::uint64_t e = 1; e <= room; ++e) {
          const int mue = tables.mobius(e);
          if (mue == 0 || std::gcd(e, Lt) != 1) continue;
          for (const auto& [g, mug] : shared) {
            const std::uint64_t dS = g * e;
            bool fits = true;
            for (const int j : S) {
              const auto jj = static_cast<std::size_t>(j);
              const std::uint64_t l = L[jj] / std::gcd<std::uint64_t>(L[jj], dS) * dS;
              if (l > bounds[jj]) {
                fits = false;
                break;
              }
              out[jj] = static_cast<std::uint32_t>(l);
            }
            if (fits) {
              next[out] += w * mue * mug;
              if (next.size() > max_terms)
                throw capacity_error("Möbius expansion exceeds " + std::to_string(max_terms) + " terms");
            }
            for (const int j : S) out[static_cast<std::size_t>(j)] = L[static_cast<std::size_t>(j)];
          }
        }
      }
      std::erase_if(next, [](const auto& kv) { return kv.second == 0; });
      level = std::move(next);
    }

    std::vector<const std::pair<const State, std::int64_t>*> order;
    order.reserve(level.size());
    for (const auto& kv : level) order.push_back(&kv);
    std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->first < b->first; });
    for (const auto* kv : order) {
      plan.lcms_.insert(plan.lcms_.end(), kv->first.begin(), kv->first.end());
      plan.weights_.push_back(kv->second);
    }
    return plan;
  }

  std::size_t terms() const { return weights_.size(); }
  const std::vector<std::uint64_t>& bounds() const { return bounds_; }
  int k() const { return k_; }

  uint128 evaluate(const TupleConstraint& c) const {
    if (c.r() != r_ || c.effective_k() != k_) throw invalid_argument("constraint does not match Möbius plan");
    const auto counters = detail::coordinate_counters(c);
    int128 total = 0;
    const std::size_t r = static_cast<std::size_t>(r_);
    for (std::size_t t = 0; t < weights_.size(); ++t) {
      int128 term = weights_[t];
      for (std::size_t j = 0; j < r && term != 0; ++j) term *= counters[j].count(bounds_[j], lcms_[t * r + j]);
      total += term;
    }
    if (total < 0) throw error("negative Möbius count; arithmetic invariant violated");
    return static_cast<uint128>(total);
  }

 private:
  std::vector<std::uint64_t> bounds_;
  int r_ = 0;
  int k_ = 0;
  std::vector<std::uint32_t> lcms_;
  std::vector<std::int64_t> weights_;
};

inline CountResult count_kwise_mobius(const Box& box, const TupleConstraint& c, const ArithTables& tables,
                                      std::size_t max_terms = kDefaultMobiusTerms) {
  detail::require_matching(box, c);
  if (c.effective_k() == c.r()) return count_mutual_mobius(box, c, tables);
  const auto plan = MobiusPlan::build(box.bounds, c.effective_k(), tables, max_terms);
  return {plan.evaluate(c), c, box, CountMethod::mobius};
}

inline CountResult count_kwise_mobius(const Box& box, const TupleConstraint& c,
                                      std::size_t max_terms = kDefaultMobiusTerms) {
  const ArithTables tables(std::max<std::uint64_t>(2, box.max_bound()));
  return count_kwise_mobius(box, c, tables, max_terms);
}

// ---------------------------------------------------------------------------
// Toth recursion

inline constexpr std::uint64_t kDefaultTothCalls = 200'000'000;

namespace detail {

class TothCounter {
 public:
  TothCounter(const std::vector<std::uint64_t>& bounds, const ArithTables& tables, std::uint64_t max_calls)
      : bounds_(bounds), tables_(tables), max_calls_(max_calls), memo_(bounds.size() + 1) {}

  // Pairwise-coprime tuples over the first `depth` coordinates, each coprime to
  // the squarefree `rad` whose primes are listed in `primes`.
  uint128 count(std::size_t depth, std::uint64_t rad, std::vector<std::uint64_t>& primes) {
    if (++calls_ > max_calls_) throw capacity_error("Toth recursion exceeds " + std::to_string(max_calls_) + " calls");
    const std::uint64_t n = bounds_[depth - 1];
    if (depth == 1) return coprime_count(n, primes);
    auto& memo = memo_[depth];
    if (auto it = memo.find(rad); it != memo.end()) return it->second;
    uint128 total = 0;
    const std::size_t base = primes.size();
    for (std::uint64_t t = 1; t <= n; ++t) {
      if (std::gcd(t, rad) != 1) continue;
      std::uint64_t next = rad;
      tables_.distinct_primes(t, [&](std::uint64_t p) {
        primes.push_back(p);
        if (__builtin_mul_overflow(next, p, &next)) throw overflow_error("Toth radical overflow");
      });
      total += count(depth - 1, next, primes);
      primes.resize(base);
    }
    memo.emplace(rad, total);
    return total;
  }

 private:
  // #{t <= n : gcd(t, ∏ primes) = 1} by Möbius over squarefree divisors <= n.
  static uint128 coprime_count(std::uint64_t n, const std::vector<std::uint64_t>& primes) {
    int128 total = static_cast<int128>(n);
    std::function<void(std::size_t, std::uint64_t, int)> walk = [&](std::size_t from, std::uint64_t prod, int s) {
      for (std::size_t j = from; j < primes.size(); ++j) {
        if (primes[j] > n / prod) continue;
        const std::uint64_t next = prod * primes[j];
        total += -s * static_cast<int128>(n / next);
        walk(j + 1, next, -s);
      }
    };
    walk(0, 1, 1);
    return static_cast<uint128>(total);
  }

  std::vector<std::uint64_t> bounds_;
  const ArithTables& tables_;
  std::uint64_t max_calls_;
  std::uint64_t calls_ = 0;
  std::vector<std::unordered_map<std::uint64_t, uint128>> memo_;
};

}  // namespace detail

// P_r^{(u)}(n_1..n_r): pairwise-coprime tuples x <= bounds with every
// coordinate coprime to u, via
//   P_{r+1}^{(u)}(n_1..n_{r+1}) = Σ_{t <= n_{r+1}, gcd(t,u)=1} P_r^{(tu)}(n_1..n_r),
// memoized on (depth, radical of tu).
inline CountResult count_toth(const std::vector<std::uint64_t>& bounds, std::uint64_t u, const ArithTables& tables,
                              std::uint64_t max_calls = kDefaultTothCalls) {
  if (bounds.empty()) throw invalid_argument("count_toth needs r >= 1");
  if (u == 0) throw invalid_argument("count_toth needs u >= 1");
  const std::uint64_t n = *std::max_element(bounds.begin(), bounds.end());
  const int r = static_cast<int>(bounds.size());
  // Every coordinate coprime to u: one grouping block carrying u.
  const int rc = std::max(2, r);
  auto constraint = TupleConstraint::make(rc, CoprimalityClass::pairwise(), {},
                                          Grouping{std::vector<int>(static_cast<std::size_t>(rc), 0), {u}});
  Box box{bounds, n};
  if (*std::min_element(bounds.begin(), bounds.end()) == 0) return {0, constraint, box, CountMethod::toth};
  detail::require_tables(tables, n);
  auto primes = factorize(u).primes();
  detail::TothCounter counter(bounds, tables, max_calls);
  return {counter.count(bounds.size(), radical(u), primes), std::move(constraint), std::move(box), CountMethod::toth};
}

inline CountResult count_toth(const std::vector<std::uint64_t>& bounds, std::uint64_t u) {
  const std::uint64_t n = bounds.empty() ? 2 : *std::max_element(bounds.begin(), bounds.end());
  const ArithTables tables(std::max<std::uint64_t>(2, n));
  return count_toth(bounds, u, tables);
}

// ---------------------------------------------------------------------------
// Divisibility patterns

struct PatternMatrix {
  std::vector<std::uint64_t> primes;               // row labels, strictly increasing
  std::vector<std::vector<std::uint8_t>> entries;  // N x r, entries 0/1

  static PatternMatrix make(std::vector<std::uint64_t> primes, std::vector<std::vector<std::uint8_t>> entries) {
    if (primes.empty()) throw invalid_argument("pattern needs at least one prime row");
    if (entries.size() != primes.size()) throw invalid_argument("pattern needs one row per prime");
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if (factorize(primes[i]).pairs.size() != 1 || factorize(primes[i]).pairs[0].exponent != 1)
        throw invalid_argument("pattern row label " + std::to_string(primes[i]) + " is not prime");
      if (i && primes[i] <= primes[i - 1]) throw invalid_argument("pattern primes must be strictly increasing");
      if (entries[i].size() != entries[0].size() || entries[i].empty())
        throw invalid_argument("pattern rows must have equal positive length");
      for (const auto e : entries[i])
        if (e > 1) throw invalid_argument("pattern entries must be 0 or 1");
    }
    return {std::move(primes), std::move(entries)};
  }

  int rows() const { return static_cast<int>(primes.size()); }
  int cols() const { return static_cast<int>(entries.front().size()); }
};

// Column j: #{x <= B : s̃ | x, t ∤ x for the zero-entry primes t}
//   = ⌊B/s̃⌋ − Σ ⌊B/(s̃ t_i)⌋ + Σ ⌊B/(s̃ t_i t_j)⌋ − ...
inline uint128 pattern_column_count(std::uint64_t B, const PatternMatrix& m, int col) {
  uint128 s = 1;
  std::vector<std::uint64_t> zeros;
  for (int i = 0; i < m.rows(); ++i) {
    if (m.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)]) {
      s *= m.primes[static_cast<std::size_t>(i)];
      if (s > B) return 0;
    } else {
      zeros.push_back(m.primes[static_cast<std::size_t>(i)]);
    }
  }
  int128 total = 0;
  for (const auto& [d, mu] : squarefree_divisors(zeros)) {
    const uint128 q = s * d;
    if (q <= B) total += mu * static_cast<int128>(B / q);
  }
  return static_cast<uint128>(total);
}

inline uint128 pattern_count(std::uint64_t n, const PatternMatrix& m, const std::vector<double>& alpha) {
  if (static_cast<int>(alpha.size()) != m.cols()) throw invalid_argument("alpha length must match pattern columns");
  const Box box = Box::from_alpha(n, alpha);
  uint128 total = 1;
  for (int j = 0; j < m.cols(); ++j) total = detail::checked_mul(total, pattern_column_count(box.bounds[static_cast<std::size_t>(j)], m, j));
  return total;
}

// P(I = M) for independent Bernoulli(1/p_i) entries.
inline Rational pattern_probability(const PatternMatrix& m) {
  Rational out{1};
  for (int i = 0; i < m.rows(); ++i) {
    const auto p = static_cast<int128>(m.primes[static_cast<std::size_t>(i)]);
    for (const auto e : m.entries[static_cast<std::size_t>(i)]) out *= e ? Rational(1, p) : Rational(p - 1, p);
  }
  return out;
}

// Every N x r 0/1 matrix with the given labels, in lexicographic bit order.
inline std::vector<PatternMatrix> all_patterns(const std::vector<std::uint64_t>& primes, int r) {
  const std::size_t N = primes.size();
  const std::size_t bits = N * static_cast<std::size_t>(r);
  if (bits > 20) throw capacity_error("too many pattern matrices to enumerate");
  std::vector<PatternMatrix> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
    std::vector<std::vector<std::uint8_t>> e(N, std::vector<std::uint8_t>(static_cast<std::size_t>(r)));
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < static_cast<std::size_t>(r); ++j)
        e[i][j] = static_cast<std::uint8_t>((mask >> (i * static_cast<std::size_t>(r) + j)) & 1);
    out.push_back(PatternMatrix::make(primes, std::move(e)));
  }
  return out;
}

// #{x <= n : p_i divides at most h_i coordinates}, summed over patterns.
inline uint128 bounded_multiplicity_count(std::uint64_t n, const std::vector<std::uint64_t>& primes,
                                          const std::vector<int>& h, int r) {
  if (h.size() != primes.size()) throw invalid_argument("need one multiplicity cap per prime");
  uint128 total = 0;
  const std::vector<double> ones(static_cast<std::size_t>(r), 1.0);
  for (const auto& m : all_patterns(primes, r)) {
    bool ok = true;
    for (std::size_t i = 0; i < primes.size() && ok; ++i) {
      int s = 0;
      for (const auto e : m.entries[i]) s += e;
      ok = s <= h[i];
    }
    if (ok) total += pattern_count(n, m, ones);
  }
  return total;
}

// ∏_i P(bin(r, 1/p_i) <= h_i).
inline Rational bounded_multiplicity_limit(const std::vector<std::uint64_t>& primes, const std::vector<int>& h, int r) {
  Rational out{1};
  for (std::size_t i = 0; i < primes.size(); ++i) out *= binomial_cdf(r, primes[i], std::min(h[i], r));
  return out;
}

// ---------------------------------------------------------------------------
// gcd / lcm weighted sums over x <= an, y <= bn

namespace detail {

inline std::pair<std::uint64_t, std::uint64_t> scaled_bounds(std::uint64_t n, double a, double b) {
  const Box box = Box::from_alpha(n, {a, b});
  return {box.bounds[0], box.bounds[1]};
}

}  // namespace detail

// Σ gcd(x, y) over x <= A, y <= B, as Σ_d d Σ_k μ(k) ⌊A/(dk)⌋ ⌊B/(dk)⌋.
inline uint128 gcd_sum_box(std::uint64_t A, std::uint64_t B, const ArithTables& tables) {
  const std::uint64_t top = std::min(A, B);
  if (top == 0) return 0;
  detail::require_tables(tables, top);
  int128 total = 0;
  for (std::uint64_t d = 1; d <= top; ++d) {
    int128 inner = 0;
    for (std::uint64_t k = 1; d * k <= top; ++k) {
      const int mu = tables.mobius(k);
      if (mu == 0) continue;
      inner += mu * static_cast<int128>(A / (d * k)) * static_cast<int128>(B / (d * k));
    }
    total = detail::checked_add(total, detail::checked_mul(static_cast<int128>(d), inner));
  }
  return static_cast<uint128>(total);
}

inline uint128 weighted_sum_gcd(std::uint64_t n, double a, double b, const ArithTables& tables) {
  const auto [A, B] = detail::scaled_bounds(n, a, b);
  return gcd_sum_box(A, B, tables);
}

inline uint128 weighted_sum_gcd(std::uint64_t n, double a = 1.0, double b = 1.0) {
  const ArithTables tables(std::max<std::uint64_t>(2, n));
  return weighted_sum_gcd(n, a, b, tables);
}

// Σ lcm(x, y) = Σ_g g Σ_k μ(k) k² S(⌊A/(gk)⌋) S(⌊B/(gk)⌋), S(m) = m(m+1)/2.
inline uint128 lcm_sum_box(std::uint64_t A, std::uint64_t B, const ArithTables& tables) {
  const std::uint64_t top = std::min(A, B);
  if (top == 0) return 0;
  detail::require_tables(tables, top);
  const auto tri = [](std::uint64_t m) { return static_cast<int128>(m) * static_cast<int128>(m + 1) / 2; };
  int128 total = 0;
  for (std::uint64_t g = 1; g <= top; ++g) {
    int128 inner = 0;
    for (std::uint64_t k = 1; g * k <= top; ++k) {
      const int mu = tables.mobius(k);
      if (mu == 0) continue;
      const int128 kk = static_cast<int128>(k) * static_cast<int128>(k);
      const int128 term = detail::checked_mul(detail::checked_mul(kk, tri(A / (g * k))), tri(B / (g * k)));
      inner = detail::checked_add(inner, mu * term);
    }
    total = detail::checked_add(total, detail::checked_mul(static_cast<int128>(g), inner));
  }
  return static_cast<uint128>(total);
}

inline uint128 weighted_sum_lcm(std::uint64_t n, double a, double b, const ArithTables& tables) {
  const auto [A, B] = detail::scaled_bounds(n, a, b);
  return lcm_sum_box(A, B, tables);
}

inline uint128 weighted_sum_lcm(std::uint64_t n, double a = 1.0, double b = 1.0) {
  const ArithTables tables(std::max<std::uint64_t>(2, n));
  return weighted_sum_lcm(n, a, b, tables);
}

}  // namespace coprime_lab
