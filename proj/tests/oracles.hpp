#pragma once

// Independent reference implementations for the tests. Nothing here calls the
// library's counting or arithmetic code: membership goes through gcds of every
// k-subset, arithmetic functions through their defining sums.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;
using Tuple = std::vector<u64>;

inline u64 gcd_all(const Tuple& x) {
  u64 g = 0;
  for (const auto v : x) g = std::gcd(g, v);
  return g;
}

// Every k-subset has gcd 1.
inline bool kwise(const Tuple& x, int k) {
  const int r = static_cast<int>(x.size());
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    u64 g = 0;
    for (const int i : idx) g = std::gcd(g, x[static_cast<std::size_t>(i)]);
    if (g != 1) return false;
    int p = k - 1;
    while (p >= 0 && idx[static_cast<std::size_t>(p)] == r - k + p) --p;
    if (p < 0) return true;
    ++idx[static_cast<std::size_t>(p)];
    for (int q = p + 1; q < k; ++q) idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
  }
}

inline bool mutual(const Tuple& x) { return gcd_all(x) == 1; }
inline bool pairwise(const Tuple& x) { return x.size() < 2 || kwise(x, 2); }

// Visits every x with 1 <= x_j <= bounds_j.
inline void for_each_tuple(const Tuple& bounds, const std::function<void(const Tuple&)>& f) {
  for (const auto b : bounds)
    if (b == 0) return;
  Tuple x(bounds.size(), 1);
  while (true) {
    f(x);
    std::size_t j = x.size();
    while (j > 0 && x[j - 1] == bounds[j - 1]) x[--j] = 1;
    if (j == 0) return;
    ++x[j - 1];
  }
}

inline u64 count(const Tuple& bounds, const std::function<bool(const Tuple&)>& pred) {
  u64 c = 0;
  for_each_tuple(bounds, [&](const Tuple& x) { c += pred(x) ? 1 : 0; });
  return c;
}

inline int mobius(u64 n) {
  int mu = 1;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

// φ_r(a) = #{x ∈ (Z/a)^r : gcd(x_1, ..., x_r, a) = 1}.
inline u64 jordan_by_count(int r, u64 a) {
  u64 c = 0;
  for_each_tuple(Tuple(static_cast<std::size_t>(r), a), [&](const Tuple& x) { c += std::gcd(gcd_all(x), a) == 1; });
  return c;
}

// Ψ_s(a) = Σ_{d | a} μ(d)² s^{ω(d)} a/d, s >= 0.
inline long long psi_by_divisors(int s, u64 a) {
  long long total = 0;
  for (u64 d = 1; d <= a; ++d) {
    if (a % d || mobius(d) == 0) continue;
    int omega = 0;
    for (u64 p = 2; p <= d; ++p)
      if (d % p == 0 && is_prime(p)) ++omega;
    long long term = static_cast<long long>(a / d);
    for (int i = 0; i < omega; ++i) term *= s;
    total += term;
  }
  return total;
}

inline u64 gcd_sum(u64 A, u64 B) {
  u64 s = 0;
  for (u64 x = 1; x <= A; ++x)
    for (u64 y = 1; y <= B; ++y) s += std::gcd(x, y);
  return s;
}

inline unsigned __int128 lcm_sum(u64 A, u64 B) {
  unsigned __int128 s = 0;
  for (u64 x = 1; x <= A; ++x)
    for (u64 y = 1; y <= B; ++y) s += x / std::gcd(x, y) * y;
  return s;
}

// Dense-grid estimate of the sup-discrepancy for r = 2: α on the grid of step
// 1/(4n), with the count term taken as #{x ∈ S : x <= ⌊nα⌋}.
inline double dense_grid_discrepancy(u64 n, const std::function<bool(u64, u64)>& in_set) {
  std::vector<std::vector<u64>> c(n + 1, std::vector<u64>(n + 1, 0));
  for (u64 i = 1; i <= n; ++i)
    for (u64 j = 1; j <= n; ++j)
      c[i][j] = (in_set(i, j) ? 1 : 0) + c[i - 1][j] + c[i][j - 1] - c[i - 1][j - 1];
  const double total = static_cast<double>(c[n][n]);
  double best = 0;
  const u64 steps = 4 * n;
  for (u64 a = 0; a <= steps; ++a)
    for (u64 b = 0; b <= steps; ++b) {
      const u64 ma = a / 4, mb = b / 4;
      const double vol = (static_cast<double>(a) / steps) * (static_cast<double>(b) / steps);
      best = std::max(best, std::fabs(static_cast<double>(c[ma][mb]) / total - vol));
    }
  return best;
}

// Pairwise-coprime tuples of a given length; a_j in [1, max_a].
inline std::vector<Tuple> coprime_vectors(int len, u64 max_a) {
  std::vector<Tuple> out;
  for_each_tuple(Tuple(static_cast<std::size_t>(len), max_a), [&](const Tuple& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j)
        if (std::gcd(a[i], a[j]) != 1) return;
    out.push_back(a);
  });
  return out;
}

// Cumulative counts over [0, n]^r: at(b) = #{1 <= x <= b : pred(x)}.
struct PrefixTable {
  u64 n = 0;
  int r = 0;
  std::vector<u64> c;

  std::size_t index(const Tuple& b) const {
    std::size_t i = 0;
    for (const auto v : b) i = i * (n + 1) + v;
    return i;
  }
  u64 at(const Tuple& b) const { return c[index(b)]; }
};

inline PrefixTable prefix_table(u64 n, int r, const std::function<bool(const Tuple&)>& pred) {
  PrefixTable t;
  t.n = n;
  t.r = r;
  std::size_t cells = 1;
  for (int j = 0; j < r; ++j) cells *= n + 1;
  t.c.assign(cells, 0);
  for_each_tuple(Tuple(static_cast<std::size_t>(r), n), [&](const Tuple& x) { t.c[t.index(x)] = pred(x) ? 1 : 0; });
  // Running sums along each axis in turn.
  std::size_t stride = 1;
  for (int j = r - 1; j >= 0; --j) {
    for (std::size_t i = 0; i < cells; ++i)
      if ((i / stride) % (n + 1) != 0) t.c[i] += t.c[i - stride];
    stride *= n + 1;
  }
  return t;
}

// Reference constants (mpmath, 30 digits; the Euler products multiplied over
// primes below 10^7 with the leading tail term added back).
inline constexpr double inv_zeta2 = 0.607927101854026628663;
inline constexpr double inv_zeta3 = 0.831907372580707468683;
inline constexpr double inv_zeta4 = 0.923938402921590167024;
inline constexpr double inv_zeta5 = 0.964387340429262459126;
inline constexpr double inv_zeta6 = 0.982952592264580419805;
inline constexpr double zeta3 = 1.20205690315959428540;
inline constexpr double pairwise3 = 0.2867474281;
inline constexpr double pairwise4 = 0.1148840438;
inline constexpr double kwise43 = 0.5842806723;

}  // namespace oracle
