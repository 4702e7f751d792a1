#pragma once

// Validated enclosures of the asymptotic density constants: ζ(r), 1/ζ(r),
// the pairwise constant T_r, the k-wise Euler product, and the closed-form
// densities of constrained coprime tuples.
//
// Euler products are truncated at a prime cutoff P. The upper end is the
// finite product; the lower end multiplies by 1 − C(r,k)·P^{1−k}/(k−1), which
// bounds the omitted factors since P(bin(r,1/p) ≥ k) ≤ C(r,k) p^{−k} and
// Σ_{p>P} p^{−k} ≤ P^{1−k}/(k−1). Floating-point error of the finite product
// is bounded and added outward.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "coprime_lab/arith.hpp"
#include "coprime_lab/constraint.hpp"
#include "coprime_lab/error.hpp"
#include "coprime_lab/rational.hpp"

namespace coprime_lab {

inline constexpr std::uint64_t kDefaultPrimeCutoff = 1'000'000;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval make(double lo, double hi) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw invalid_argument("invalid interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return {lo, hi};
  }

  double width() const { return hi - lo; }
  double midpoint() const { return lo + (hi - lo) / 2; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  // Distance from x to the interval; zero inside.
  double distance(double x) const { return x < lo ? lo - x : (x > hi ? x - hi : 0.0); }
};

namespace detail {

inline double down(long double v) {
  const double d = static_cast<double>(v);
  return static_cast<long double>(d) > v ? std::nextafter(d, -std::numeric_limits<double>::infinity()) : d;
}

inline double up(long double v) {
  const double d = static_cast<double>(v);
  return static_cast<long double>(d) < v ? std::nextafter(d, std::numeric_limits<double>::infinity()) : d;
}

inline double step_down(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }
inline double step_up(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Eratosthenes over [2, limit]; separate from ArithTables to keep the
// Euler-product path light on memory.
inline std::vector<std::uint32_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint32_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

// P(bin(r, 1/p) <= h) in extended precision, written as 1 − upper tail so the
// near-one factors of large primes keep their relative accuracy.
inline long double binomial_cdf_ld(int r, std::uint64_t p, int h) {
  if (h >= r) return 1.0L;
  const long double q = 1.0L / static_cast<long double>(p);
  const long double q1 = 1.0L - q;
  long double tail = 0.0L;
  for (int j = h + 1; j <= r; ++j)
    tail += static_cast<long double>(binomial(r, j)) * std::pow(q, j) * std::pow(q1, r - j);
  return 1.0L - tail;
}

inline long double pairwise_factor_ld(int r, std::uint64_t p) {
  const long double q = 1.0L / static_cast<long double>(p);
  return std::pow(1.0L - q, r - 1) * (1.0L + static_cast<long double>(r - 1) * q);
}

template <class Factor>
Interval truncated_euler_product(int r, int k, std::uint64_t cutoff, Factor factor) {
  if (cutoff < 5) throw invalid_argument("prime cutoff must be >= 5");
  if (cutoff > kMaxTableLimit)
    throw capacity_error("prime cutoff " + std::to_string(cutoff) + " exceeds capacity " +
                         std::to_string(kMaxTableLimit));
  const auto primes = primes_up_to(cutoff);
  long double prod = 1.0L;
  for (const auto p : primes) prod *= factor(p);
  // Each factor and multiply carries a few ulps of relative error.
  const long double rel = static_cast<long double>(primes.size() + 16) * 8.0L * LDBL_EPSILON;
  const long double upper = prod * (1.0L + rel);
  const long double finite_lower = prod * (1.0L - rel);
  const long double tail = static_cast<long double>(binomial(r, k)) *
                           std::pow(static_cast<long double>(cutoff), static_cast<long double>(1 - k)) /
                           static_cast<long double>(k - 1);
  const long double lower = tail < 1.0L ? finite_lower * (1.0L - tail) * (1.0L - 4 * LDBL_EPSILON) : 0.0L;
  return Interval::make(std::max(0.0, down(lower)), std::min(1.0, up(upper)));
}

}  // namespace detail

// ζ(r) = Σ_{m<M} m^{−r} + (Euler–Maclaurin tail from M through the B_2 term),
// remainder bounded by |f'''(M)|/720 with f(x) = x^{−r}.
inline Interval zeta(int r) {
  if (r < 2 || r > 64) throw invalid_argument("zeta needs 2 <= r <= 64");
  constexpr int M = 256;
  long double partial = 0.0L;
  for (int m = M - 1; m >= 1; --m) partial += 1.0L / std::pow(static_cast<long double>(m), r);
  const long double Mf = M;
  const long double rf = r;
  const long double tail = std::pow(Mf, 1 - r) / (rf - 1) + std::pow(Mf, -r) / 2 + rf * std::pow(Mf, -r - 1) / 12;
  const long double remainder = rf * (rf + 1) * (rf + 2) * std::pow(Mf, -r - 3) / 720;
  const long double value = partial + tail;
  const long double rounding = static_cast<long double>(M + 16) * 4.0L * LDBL_EPSILON * value;
  return Interval::make(detail::down(value - remainder - rounding), detail::up(value + remainder + rounding));
}

inline Interval reciprocal(const Interval& x) {
  if (x.lo <= 0.0) throw invalid_argument("reciprocal of an interval containing zero");
  return Interval::make(detail::step_down(1.0 / x.hi), detail::step_up(1.0 / x.lo));
}

inline Interval inverse_zeta(int r) { return reciprocal(zeta(r)); }

// Enclosure of x·q for a non-negative exact rational q.
inline Interval scale(const Interval& x, const Rational& q) {
  if (q < Rational{0}) throw invalid_argument("scale factor must be non-negative");
  if (q == Rational{1}) return x;
  const auto [qlo, qhi] = q.enclose();
  return Interval::make(std::max(0.0, detail::step_down(x.lo * qlo)), detail::step_up(x.hi * qhi));
}

// Exact Σ_{j<=h} C(r,j) p^{−j} (1 − 1/p)^{r−j}.
inline Rational binomial_cdf(int r, std::uint64_t p, int h) {
  if (r < 1 || h < 0 || h > r) throw invalid_argument("binomial_cdf needs 0 <= h <= r");
  if (p < 2) throw invalid_argument("binomial_cdf needs p >= 2");
  const int128 pr = detail::checked_pow(static_cast<int128>(p), static_cast<unsigned>(r));
  int128 num = 0;
  for (int j = 0; j <= h; ++j)
    num = detail::checked_add(
        num, detail::checked_mul(detail::binomial(r, j),
                                 detail::checked_pow(static_cast<int128>(p) - 1, static_cast<unsigned>(r - j))));
  return {num, pr};
}

// Per-prime factor of T_r in closed form: (1 − 1/p)^r + (r/p)(1 − 1/p)^{r−1}.
inline Rational pairwise_factor(int r, std::uint64_t p) {
  const Rational q(1, static_cast<int128>(p));
  const Rational q1 = Rational{1} - q;
  return q1.pow(static_cast<unsigned>(r)) + Rational{r} * q * q1.pow(static_cast<unsigned>(r - 1));
}

namespace detail {

struct ConstantCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int, std::uint64_t>, Interval> values;

  static ConstantCache& instance() {
    static ConstantCache cache;
    return cache;
  }

  template <class Compute>
  Interval get(int tag, int r, int k, std::uint64_t cutoff, Compute compute) {
    const auto key = std::make_tuple(tag, r, k, cutoff);
    {
      std::lock_guard lock(mutex);
      if (auto it = values.find(key); it != values.end()) return it->second;
    }
    const Interval v = compute();
    std::lock_guard lock(mutex);
    values.emplace(key, v);
    return v;
  }
};

}  // namespace detail

inline Interval kwise_constant(int r, int k, std::uint64_t prime_cutoff = kDefaultPrimeCutoff) {
  if (r < 2 || k < 2 || k > r) throw invalid_argument("kwise_constant needs 2 <= k <= r");
  return detail::ConstantCache::instance().get(0, r, k, prime_cutoff, [&] {
    return detail::truncated_euler_product(r, k, prime_cutoff,
                                           [&](std::uint64_t p) { return detail::binomial_cdf_ld(r, p, k - 1); });
  });
}

inline Interval pairwise_constant(int r, std::uint64_t prime_cutoff = kDefaultPrimeCutoff) {
  if (r < 2) throw invalid_argument("pairwise_constant needs r >= 2");
  return detail::ConstantCache::instance().get(1, r, 2, prime_cutoff, [&] {
    return detail::truncated_euler_product(r, 2, prime_cutoff,
                                           [&](std::uint64_t p) { return detail::pairwise_factor_ld(r, p); });
  });
}

// Which closed form a density evaluation used.
enum class DensityFormula {
  mutual,
  pairwise,
  kwise,
  mutual_coprime_to,
  pairwise_coprime_to,
  mutual_grouped,
  pairwise_grouped,
  mutual_divisible,
  pairwise_divisible,
  mutual_progression,
  pairwise_progression,
};

inline const char* to_string(DensityFormula f) {
  switch (f) {
    case DensityFormula::mutual: return "mutual";
    case DensityFormula::pairwise: return "pairwise";
    case DensityFormula::kwise: return "kwise";
    case DensityFormula::mutual_coprime_to: return "mutual_coprime_to";
    case DensityFormula::pairwise_coprime_to: return "pairwise_coprime_to";
    case DensityFormula::mutual_grouped: return "mutual_grouped";
    case DensityFormula::pairwise_grouped: return "pairwise_grouped";
    case DensityFormula::mutual_divisible: return "mutual_divisible";
    case DensityFormula::pairwise_divisible: return "pairwise_divisible";
    case DensityFormula::mutual_progression: return "mutual_progression";
    case DensityFormula::pairwise_progression: return "pairwise_progression";
  }
  return "?";
}

// Density = base constant (1/ζ(r), T_r or the k-wise product) × exact factor.
struct DensityFactor {
  DensityFormula formula;
  Rational factor;
};

namespace formulas {

inline std::uint64_t product(const std::vector<std::uint64_t>& a) {
  std::uint64_t out = 1;
  for (const auto v : a)
    if (__builtin_mul_overflow(out, v, &out)) throw overflow_error("modulus product overflow");
  return out;
}

inline Rational integer_pow(std::uint64_t a, int e) {
  return Rational::from_int128(detail::checked_pow(static_cast<int128>(a), static_cast<unsigned>(e)));
}

// x ⊥ a, pairwise: Ψ_{r−2}(|a|)/Ψ_{r−1}(|a|).
inline Rational pairwise_coprime_to(int r, const std::vector<std::uint64_t>& a) {
  const auto A = product(a);
  return psi(r - 2, A) / psi(r - 1, A);
}

// x ⊥ a, mutual: φ(|a|)/φ_r(|a|) · |a|^{r−1}.
inline Rational mutual_coprime_to(int r, const std::vector<std::uint64_t>& a) {
  const auto A = product(a);
  return jordan_totient(1, A) / jordan_totient(r, A) * integer_pow(A, r - 1);
}

// Grouped coprime-to, pairwise: ∏_i Ψ_{r−b_i−1}(a_i) / Ψ_{r−1}(|a|).
inline Rational pairwise_grouped(int r, const std::vector<std::uint64_t>& a, const std::vector<int>& sizes) {
  Rational out = Rational{1} / psi(r - 1, product(a));
  for (std::size_t i = 0; i < a.size(); ++i) out *= psi(r - sizes[i] - 1, a[i]);
  return out;
}

// Grouped coprime-to, mutual: |a|^r/φ_r(|a|) · ∏_i (φ(a_i)/a_i)^{b_i}.
inline Rational mutual_grouped(int r, const std::vector<std::uint64_t>& a, const std::vector<int>& sizes) {
  const auto A = product(a);
  Rational out = integer_pow(A, r) / jordan_totient(r, A);
  for (std::size_t i = 0; i < a.size(); ++i)
    out *= (jordan_totient(1, a[i]) / Rational(static_cast<int128>(a[i]), 1)).pow(static_cast<unsigned>(sizes[i]));
  return out;
}

// a | x, pairwise: 1/Ψ_{r−1}(|a|).
inline Rational pairwise_divisible(int r, const std::vector<std::uint64_t>& a) {
  return Rational{1} / psi(r - 1, product(a));
}

// a | x, mutual: φ_{r−1}(|a|)/φ_r(|a|).
inline Rational mutual_divisible(int r, const std::vector<std::uint64_t>& a) {
  const auto A = product(a);
  return jordan_totient(r - 1, A) / jordan_totient(r, A);
}

// gcd(a, 0) = a, so b = 0 reproduces the divisible case.
inline std::uint64_t progression_gcd(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

// a | x − b, pairwise:
//   Ψ_{r−2}(|a|)/Ψ_{r−1}(|a|) · 1/φ(|a|) · ∏_i φ(g_i)/Ψ_{r−2}(g_i),  g_i = gcd(a_i, b_i).
inline Rational pairwise_progression(int r, const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  const auto A = product(a);
  Rational out = psi(r - 2, A) / psi(r - 1, A) / jordan_totient(1, A);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto g = progression_gcd(a[i], b[i]);
    out *= jordan_totient(1, g) / psi(r - 2, g);
  }
  return out;
}

// a | x − b, mutual: (1/|a|) · |a|^r/φ_r(|a|) · ∏_i φ_{r−1}(g_i)/g_i^{r−1}.
inline Rational mutual_progression(int r, const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  const auto A = product(a);
  Rational out = integer_pow(A, r - 1) / jordan_totient(r, A);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto g = progression_gcd(a[i], b[i]);
    out *= jordan_totient(r - 1, g) / integer_pow(g, r - 1);
  }
  return out;
}

}  // namespace formulas

inline DensityFactor density_factor(const TupleConstraint& c) {
  const int r = c.r();
  const auto kind = c.coprimality().kind;
  const bool mutual = kind == Coprimality::mutual;

  if (const auto& g = c.grouping()) {
    const auto sizes = g->block_sizes();
    if (mutual) return {DensityFormula::mutual_grouped, formulas::mutual_grouped(r, g->moduli, sizes)};
    return {DensityFormula::pairwise_grouped, formulas::pairwise_grouped(r, g->moduli, sizes)};
  }

  bool any_coprime = false;
  bool any_progression = false;
  bool any_residue = false;
  for (const auto& s : c.sides()) {
    if (s.trivial()) continue;
    if (s.kind == SideCondition::Kind::coprime_to) any_coprime = true;
    if (s.progression()) any_progression = true;
    if (s.progression() && s.residue != 0) any_residue = true;
  }

  if (!any_coprime && !any_progression) {
    switch (kind) {
      case Coprimality::mutual: return {DensityFormula::mutual, Rational{1}};
      case Coprimality::pairwise: return {DensityFormula::pairwise, Rational{1}};
      case Coprimality::kwise: return {DensityFormula::kwise, Rational{1}};
    }
  }
  if (kind == Coprimality::kwise)
    throw unsupported_formula("no closed-form density for k-wise coprimality with side conditions");
  if (any_coprime && any_progression)
    throw unsupported_formula("no closed-form density mixing coprime-to with divisibility/progression conditions");

  std::vector<std::uint64_t> a;
  std::vector<std::uint64_t> b;
  for (const auto& s : c.sides()) {
    a.push_back(s.trivial() ? 1 : s.modulus);
    b.push_back(s.trivial() ? 0 : s.residue);
  }
  if (any_coprime) {
    if (mutual) return {DensityFormula::mutual_coprime_to, formulas::mutual_coprime_to(r, a)};
    return {DensityFormula::pairwise_coprime_to, formulas::pairwise_coprime_to(r, a)};
  }
  if (!any_residue) {
    if (mutual) return {DensityFormula::mutual_divisible, formulas::mutual_divisible(r, a)};
    return {DensityFormula::pairwise_divisible, formulas::pairwise_divisible(r, a)};
  }
  if (mutual) return {DensityFormula::mutual_progression, formulas::mutual_progression(r, a, b)};
  return {DensityFormula::pairwise_progression, formulas::pairwise_progression(r, a, b)};
}

// Base constant for a class, without side conditions.
inline Interval class_constant(const TupleConstraint& c, std::uint64_t prime_cutoff = kDefaultPrimeCutoff) {
  switch (c.coprimality().kind) {
    case Coprimality::mutual: return inverse_zeta(c.r());
    case Coprimality::pairwise: return pairwise_constant(c.r(), prime_cutoff);
    case Coprimality::kwise: return kwise_constant(c.r(), c.coprimality().k, prime_cutoff);
  }
  return inverse_zeta(c.r());
}

inline Interval density(const TupleConstraint& c, std::uint64_t prime_cutoff = kDefaultPrimeCutoff) {
  const auto f = density_factor(c);
  return scale(class_constant(c, prime_cutoff), f.factor);
}

}  // namespace coprime_lab
