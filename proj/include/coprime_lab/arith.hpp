#pragma once

// Sieve-backed arithmetic kernel: primes, smallest prime factors, Möbius,
// totient-family functions and the small helpers used by the density formulas.

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "coprime_lab/error.hpp"
#include "coprime_lab/rational.hpp"

namespace coprime_lab {

inline constexpr std::uint64_t kMaxTableLimit = 100'000'000;

struct PrimePower {
  std::uint64_t prime;
  int exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

struct Factorization {
  std::vector<PrimePower> pairs;  // strictly increasing primes, exponents >= 1

  std::uint64_t value() const {
    std::uint64_t v = 1;
    for (const auto& [p, e] : pairs)
      for (int i = 0; i < e; ++i) v *= p;
    return v;
  }

  std::vector<std::uint64_t> primes() const {
    std::vector<std::uint64_t> out;
    out.reserve(pairs.size());
    for (const auto& pp : pairs) out.push_back(pp.prime);
    return out;
  }

  friend bool operator==(const Factorization&, const Factorization&) = default;
};

class ArithTables {
 public:
  // Linear sieve over [1, limit]; the Möbius values come out of the same pass.
  explicit ArithTables(std::uint64_t limit) : limit_(limit) {
    if (limit < 2 || limit > kMaxTableLimit)
      throw capacity_error("arith table limit " + std::to_string(limit) + " outside [2, " +
                           std::to_string(kMaxTableLimit) + "]");
    spf_.assign(limit + 1, 0);
    mobius_.assign(limit + 1, 0);
    spf_[1] = 1;
    mobius_[1] = 1;
    for (std::uint64_t i = 2; i <= limit; ++i) {
      if (spf_[i] == 0) {
        spf_[i] = static_cast<std::uint32_t>(i);
        mobius_[i] = -1;
        primes_.push_back(static_cast<std::uint32_t>(i));
      }
      for (const std::uint32_t p : primes_) {
        if (p > spf_[i] || i * p > limit) break;
        spf_[i * p] = p;
        mobius_[i * p] = (p == spf_[i]) ? 0 : static_cast<std::int8_t>(-mobius_[i]);
      }
    }
  }

  std::uint64_t limit() const { return limit_; }
  std::uint32_t spf(std::uint64_t m) const { return spf_.at(m); }
  int mobius(std::uint64_t m) const { return mobius_[checked(m)]; }
  bool is_prime(std::uint64_t m) const { return m >= 2 && spf_[checked(m)] == m; }
  const std::vector<std::uint32_t>& primes() const { return primes_; }

  Factorization factorize(std::uint64_t m) const {
    if (m == 0) throw invalid_argument("factorize(0)");
    checked(m);
    Factorization f;
    while (m > 1) {
      const std::uint32_t p = spf_[m];
      int e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      f.pairs.push_back({p, e});
    }
    return f;
  }

  // Distinct prime divisors without building a Factorization.
  template <class Out>
  void distinct_primes(std::uint64_t m, Out&& out) const {
    checked(m);
    while (m > 1) {
      const std::uint32_t p = spf_[m];
      out(p);
      while (m % p == 0) m /= p;
    }
  }

 private:
  std::uint64_t checked(std::uint64_t m) const {
    if (m > limit_)
      throw capacity_error(std::to_string(m) + " exceeds arith table limit " + std::to_string(limit_));
    return m;
  }

  std::uint64_t limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::int8_t> mobius_;
  std::vector<std::uint32_t> primes_;
};

inline ArithTables build_tables(std::uint64_t limit) { return ArithTables(limit); }

inline Factorization factorize(std::uint64_t m, const ArithTables& tables) { return tables.factorize(m); }

// Trial division; used for the small moduli that appear in density formulas.
inline Factorization factorize(std::uint64_t m) {
  if (m == 0) throw invalid_argument("factorize(0)");
  Factorization f;
  for (std::uint64_t p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
    if (m % p != 0) continue;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    f.pairs.push_back({p, e});
  }
  if (m > 1) f.pairs.push_back({m, 1});
  return f;
}

inline std::uint64_t radical(std::uint64_t m) {
  std::uint64_t r = 1;
  for (const auto& pp : factorize(m).pairs) r *= pp.prime;
  return r;
}

inline std::uint64_t lcm_checked(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  const std::uint64_t q = a / std::gcd(a, b);
  std::uint64_t out;
  if (__builtin_mul_overflow(q, b, &out)) throw overflow_error("lcm overflow");
  return out;
}

// Squarefree divisors of the product of `primes` paired with their Möbius value.
struct SignedDivisor {
  std::uint64_t divisor;
  int mobius;
};

inline std::vector<SignedDivisor> squarefree_divisors(const std::vector<std::uint64_t>& primes) {
  std::vector<SignedDivisor> out{{1, 1}};
  out.reserve(std::size_t{1} << primes.size());
  for (const std::uint64_t p : primes) {
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) out.push_back({out[i].divisor * p, -out[i].mobius});
  }
  return out;
}

// φ_r(a) = a^r ∏_{p|a} (1 − p^{−r}); always an integer.
inline Rational jordan_totient(int r, std::uint64_t a) {
  if (r < 1) throw invalid_argument("jordan_totient needs r >= 1");
  if (a == 0) throw invalid_argument("jordan_totient needs a >= 1");
  int128 v = 1;
  for (const auto& [p, e] : factorize(a).pairs) {
    const int128 pr = detail::checked_pow(static_cast<int128>(p), static_cast<unsigned>(r));
    v = detail::checked_mul(v, pr - 1);
    v = detail::checked_mul(v, detail::checked_pow(pr, static_cast<unsigned>(e - 1)));
  }
  return Rational::from_int128(v);
}

inline std::uint64_t euler_phi(std::uint64_t a) {
  return static_cast<std::uint64_t>(jordan_totient(1, a).num());
}

// Ψ_s(a) = a ∏_{p|a} (1 + s/p), s >= −1. Ψ_0 is the identity and Ψ_{−1} is φ.
inline Rational psi(int s, std::uint64_t a) {
  if (s < -1) throw invalid_argument("psi order must be >= -1");
  if (a == 0) throw invalid_argument("psi needs a >= 1");
  int128 v = 1;
  for (const auto& [p, e] : factorize(a).pairs) {
    v = detail::checked_mul(v, static_cast<int128>(p) + s);
    v = detail::checked_mul(v, detail::checked_pow(static_cast<int128>(p), static_cast<unsigned>(e - 1)));
  }
  return Rational::from_int128(v);
}

// θ(u): number of squarefree divisors.
inline std::uint64_t squarefree_divisor_count(std::uint64_t u) {
  if (u == 0) throw invalid_argument("squarefree_divisor_count needs u >= 1");
  return std::uint64_t{1} << factorize(u).pairs.size();
}

// f_r(u) = ∏_{p|u} (1 − r/(p + r − 1)) = ∏_{p|u} (p − 1)/(p + r − 1).
inline Rational toth_factor(int r, std::uint64_t u) {
  if (r < 2) throw invalid_argument("toth_factor needs r >= 2");
  if (u == 0) throw invalid_argument("toth_factor needs u >= 1");
  Rational out{1};
  for (const auto& pp : factorize(u).pairs)
    out *= Rational(static_cast<int128>(pp.prime) - 1, static_cast<int128>(pp.prime) + r - 1);
  return out;
}

}  // namespace coprime_lab
