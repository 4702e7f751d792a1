#pragma once

// Exact sup-discrepancy over origin-anchored boxes, rate diagnostics, and the
// CDF errors of the gcd/lcm weighted measures.
//
// The count term ⌊nα⌋ is constant on the half-open cell ∏[m_j/n, (m_j+1)/n)
// while |α| increases in every coordinate, so the sup over a cell is reached
// either at its lower corner or in the limit at its upper corner. Both are
// evaluated for every lattice point m, in integers.

#include <cmath>
#include <cstdint>
#include <functional>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coprime_lab/arith.hpp"
#include "coprime_lab/constraint.hpp"
#include "coprime_lab/counting.hpp"
#include "coprime_lab/error.hpp"
#include "coprime_lab/rational.hpp"

namespace coprime_lab {

inline constexpr std::uint64_t kGridBudget = 1'000'000'000;

// Normalization applied to Δ in the rate diagnostics.
enum class RateShape { over_n, log_over_n, logpow_over_n };

class CountGrid {
 public:
  CountGrid(std::uint64_t n, int r, std::uint64_t max_cells = kGridBudget) : n_(n), r_(r) {
    if (r < 1 || r > 16) throw invalid_argument("grid dimension must be in [1, 16]");
    uint128 cells = 1;
    for (int j = 0; j < r; ++j) {
      cells *= n;
      if (cells > max_cells)
        throw capacity_error("grid n^r exceeds budget of " + std::to_string(max_cells) + " cells");
    }
    std::uint64_t total = 1;
    stride_.assign(static_cast<std::size_t>(r), 1);
    for (int j = r - 1; j >= 0; --j) {
      stride_[static_cast<std::size_t>(j)] = total;
      total *= n + 1;
    }
    try {
      cells_.assign(total, 0);
    } catch (const std::bad_alloc&) {
      throw capacity_error("cannot allocate " + std::to_string(total) + " grid cells");
    }
  }

  std::uint64_t n() const { return n_; }
  int r() const { return r_; }

  std::uint64_t index(std::span<const std::uint64_t> m) const {
    std::uint64_t i = 0;
    for (std::size_t j = 0; j < m.size(); ++j) i += m[j] * stride_[j];
    return i;
  }

  // Cumulative count #{x ∈ S : x_j <= m_j}, 0 <= m_j <= n.
  std::uint32_t at(std::span<const std::uint64_t> m) const {
    if (m.size() != static_cast<std::size_t>(r_)) throw invalid_argument("grid index has wrong dimension");
    for (const auto v : m)
      if (v > n_) throw invalid_argument("grid index exceeds n");
    return cells_[index(m)];
  }
  std::uint32_t at(std::initializer_list<std::uint64_t> m) const {
    return at(std::span<const std::uint64_t>(m.begin(), m.size()));
  }

  std::uint32_t total() const { return cells_.back(); }

  std::vector<std::uint32_t>& raw() { return cells_; }
  const std::vector<std::uint32_t>& raw() const { return cells_; }

  // Turns indicator cells into cumulative counts: one pass per axis.
  void accumulate() {
    const std::uint64_t side = n_ + 1;
    for (int axis = 0; axis < r_; ++axis) {
      const std::uint64_t s = stride_[static_cast<std::size_t>(axis)];
      for (std::uint64_t i = 0; i < cells_.size(); ++i)
        if ((i / s) % side != 0) cells_[i] += cells_[i - s];
    }
  }

 private:
  std::uint64_t n_;
  int r_;
  std::vector<std::uint64_t> stride_;
  std::vector<std::uint32_t> cells_;
};

// Grid for an arbitrary membership predicate over {1..n}^r; also used by tests
// to inject the all-points set.
inline CountGrid build_grid_if(std::uint64_t n, int r, const std::function<bool(std::span<const std::uint64_t>)>& pred,
                               std::uint64_t max_cells = kGridBudget) {
  CountGrid grid(n, r, max_cells);
  if (n == 0) return grid;
  auto& cells = grid.raw();
  std::vector<std::uint64_t> x(static_cast<std::size_t>(r), 1);
  while (true) {
    if (pred(x)) cells[grid.index(x)] = 1;
    int j = r - 1;
    while (j >= 0 && x[static_cast<std::size_t>(j)] == n) x[static_cast<std::size_t>(j--)] = 1;
    if (j < 0) break;
    ++x[static_cast<std::size_t>(j)];
  }
  grid.accumulate();
  return grid;
}

inline CountGrid build_grid(std::uint64_t n, const TupleConstraint& c, std::uint64_t max_cells = kGridBudget) {
  const ArithTables tables(std::max<std::uint64_t>(2, n));
  return build_grid_if(
      n, c.r(), [&](std::span<const std::uint64_t> x) { return member(x, c, &tables); }, max_cells);
}

// Count via the grid, for boxes inside it.
inline CountResult count_prefix_grid(const CountGrid& grid, const Box& box, const TupleConstraint& c) {
  detail::require_matching(box, c);
  if (box.n > grid.n() || box.max_bound() > grid.n()) throw invalid_argument("box exceeds grid");
  return {grid.at(box.bounds), c, box, CountMethod::prefix_grid};
}

enum class CornerKind { at_corner, left_limit };

inline const char* to_string(CornerKind k) { return k == CornerKind::at_corner ? "at_corner" : "left_limit"; }

struct DiscrepancyReport {
  std::uint64_t n = 0;
  double value = 0;        // num / den rounded to nearest
  uint128 num = 0;         // exact sup = num / den
  uint128 den = 1;
  std::vector<std::uint64_t> argmax;
  CornerKind kind = CornerKind::at_corner;
  std::uint64_t total = 0;
  std::optional<double> rate_ratio;
  double witness = 0;      // the candidate at m = (0, n, ..., n), left limit
};

inline RateShape rate_shape(const TupleConstraint& c) {
  if (c.effective_k() == 2 && c.r() > 2) return RateShape::logpow_over_n;
  if (c.effective_k() == 2) return RateShape::log_over_n;  // r = 2: mutual and pairwise coincide
  return RateShape::over_n;
}

inline std::optional<double> rate_ratio(double value, std::uint64_t n, int r, RateShape shape) {
  const long double nn = static_cast<long double>(n);
  switch (shape) {
    case RateShape::over_n: return static_cast<double>(value * nn);
    case RateShape::log_over_n:
      if (n < 2) return std::nullopt;
      return static_cast<double>(value * nn / std::log(nn));
    case RateShape::logpow_over_n:
      if (n < 2) return std::nullopt;
      return static_cast<double>(value * nn / std::pow(std::log(nn), static_cast<long double>(r - 1)));
  }
  return std::nullopt;
}

// Δ at scale n using the sub-grid {0..n}^r of `grid` (n <= grid.n()); the
// cumulative counts do not depend on the ambient scale.
inline DiscrepancyReport sup_discrepancy(const CountGrid& grid, std::uint64_t n, RateShape shape = RateShape::over_n) {
  if (n > grid.n()) throw invalid_argument("scale exceeds grid");
  const int r = grid.r();
  std::vector<std::uint64_t> full(static_cast<std::size_t>(r), n);
  const std::uint64_t T = n == 0 ? 0 : grid.at(full);
  if (T == 0) throw undefined_discrepancy("discrepancy undefined: no members in the box at n=" + std::to_string(n));

  uint128 npow = 1;
  for (int j = 0; j < r; ++j) npow = detail::checked_mul(npow, static_cast<uint128>(n));
  const auto& cells = grid.raw();

  DiscrepancyReport rep;
  rep.n = n;
  rep.total = T;
  rep.den = detail::checked_mul(npow, static_cast<uint128>(T));
  rep.argmax.assign(static_cast<std::size_t>(r), 0);

  std::vector<std::uint64_t> m(static_cast<std::size_t>(r), 0);
  while (true) {
    const uint128 cn = static_cast<uint128>(cells[grid.index(m)]) * npow;
    uint128 lower = 1, upper = 1;
    for (const auto v : m) {
      lower *= v;
      upper *= std::min(v + 1, n);
    }
    lower *= T;
    upper *= T;
    const uint128 d_lo = cn > lower ? cn - lower : lower - cn;
    const uint128 d_up = cn > upper ? cn - upper : upper - cn;
    if (d_lo > rep.num) {
      rep.num = d_lo;
      rep.argmax = m;
      rep.kind = CornerKind::at_corner;
    }
    if (d_up > rep.num) {
      rep.num = d_up;
      rep.argmax = m;
      rep.kind = CornerKind::left_limit;
    }
    int j = r - 1;
    while (j >= 0 && m[static_cast<std::size_t>(j)] == n) m[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
    ++m[static_cast<std::size_t>(j)];
  }
  rep.value = static_cast<double>(static_cast<long double>(rep.num) / static_cast<long double>(rep.den));
  uint128 a = rep.num, b = rep.den;
  while (b != 0) a = std::exchange(b, a % b);
  rep.num /= a;
  rep.den /= a;

  // Left-limit candidate at (0, n, ..., n): C = 0 there and |α| -> 1/n.
  std::vector<std::uint64_t> w(static_cast<std::size_t>(r), n);
  w[0] = 0;
  const long double cw = static_cast<long double>(grid.at(w)) / static_cast<long double>(T);
  rep.witness = static_cast<double>(std::fabs(cw - 1.0L / static_cast<long double>(n)));
  rep.rate_ratio = rate_ratio(rep.value, n, r, shape);
  return rep;
}

inline DiscrepancyReport sup_discrepancy(const CountGrid& grid, RateShape shape = RateShape::over_n) {
  return sup_discrepancy(grid, grid.n(), shape);
}

// One grid at max(n_values) serves every scale in the scan.
inline std::vector<DiscrepancyReport> rate_scan(const TupleConstraint& c, const std::vector<std::uint64_t>& n_values,
                                                std::uint64_t max_cells = kGridBudget) {
  if (n_values.empty()) return {};
  const std::uint64_t top = *std::max_element(n_values.begin(), n_values.end());
  const CountGrid grid = build_grid(top, c, max_cells);
  std::vector<DiscrepancyReport> out;
  for (const auto n : n_values) out.push_back(sup_discrepancy(grid, n, rate_shape(c)));
  return out;
}

enum class MeasureKind { gcd, lcm };

inline const char* to_string(MeasureKind k) { return k == MeasureKind::gcd ? "gcd" : "lcm"; }

struct CdfErrorReport {
  MeasureKind kind;
  std::uint64_t n;
  std::uint64_t step;
  double max_error;
  double a;  // grid point attaining it
  double b;
  uint128 normalizer;  // the weighted sum over the full square
};

// max over a, b ∈ {i/step} of |ν_n([0,a]×[0,b]) / ν_n([0,1]²) − ab| (gcd), or
// of |η_n(...) / η_n([0,1]²) − a²b²| (lcm).
inline CdfErrorReport measure_cdf_error(MeasureKind kind, std::uint64_t n, std::uint64_t step,
                                        const ArithTables& tables) {
  if (n < 1) throw invalid_argument("measure_cdf_error needs n >= 1");
  if (step < 1) throw invalid_argument("grid step must be positive");
  const auto sum = [&](std::uint64_t A, std::uint64_t B) {
    return kind == MeasureKind::gcd ? gcd_sum_box(A, B, tables) : lcm_sum_box(A, B, tables);
  };
  const uint128 full = sum(n, n);
  CdfErrorReport rep{kind, n, step, 0.0, 0.0, 0.0, full};
  for (std::uint64_t i = 0; i <= step; ++i) {
    for (std::uint64_t j = 0; j <= step; ++j) {
      const std::uint64_t A = static_cast<std::uint64_t>(static_cast<uint128>(n) * i / step);
      const std::uint64_t B = static_cast<std::uint64_t>(static_cast<uint128>(n) * j / step);
      const long double a = static_cast<long double>(i) / step;
      const long double b = static_cast<long double>(j) / step;
      const long double target = kind == MeasureKind::gcd ? a * b : a * a * b * b;
      const long double err =
          std::fabs(static_cast<long double>(sum(A, B)) / static_cast<long double>(full) - target);
      if (err > rep.max_error) {
        rep.max_error = static_cast<double>(err);
        rep.a = static_cast<double>(a);
        rep.b = static_cast<double>(b);
      }
    }
  }
  return rep;
}

inline CdfErrorReport measure_cdf_error(MeasureKind kind, std::uint64_t n, std::uint64_t step) {
  const ArithTables tables(std::max<std::uint64_t>(2, n));
  return measure_cdf_error(kind, n, step, tables);
}

}  // namespace coprime_lab
