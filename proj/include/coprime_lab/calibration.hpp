#pragma once

// Regression constants for the rate diagnostics. The asymptotic statements
// only assert that such constants exist; the values below were measured once
// with `coprime_lab calibrate` (same protocol as measure()), rounded up to
// three digits, and are asserted with kHeadroom on top.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "coprime_lab/constants.hpp"
#include "coprime_lab/constraint.hpp"
#include "coprime_lab/counting.hpp"
#include "coprime_lab/discrepancy.hpp"

namespace coprime_lab::calibration {

inline constexpr double kHeadroom = 1.5;

inline const std::vector<std::uint64_t> kScanR2{256, 512, 1024, 2048};
inline const std::vector<std::uint64_t> kScanR3{64, 128, 256};
inline const std::vector<std::uint64_t> kMeasureScales{1024, 4096};
inline constexpr std::uint64_t kMeasureStep = 8;
inline const std::vector<std::uint64_t> kGcdNormScales{1024, 4096, 16384};
inline const std::vector<std::uint64_t> kLcmNormScales{1024, 4096};
inline const std::vector<std::uint64_t> kPatternScales{1000, 10000};
// Bounded-multiplicity family: primes 2, 3 across r = 3 coordinates, each prime
// dividing at most one coordinate.
inline const std::vector<std::uint64_t> kPatternPrimes{2, 3};
inline const std::vector<int> kPatternCaps{1, 1};
inline constexpr int kPatternR = 3;

namespace frozen {
// max Δ_C(n) n / ln n, mutual r = 2 over kScanR2
inline constexpr double mutual_r2 = 0.443;
// max Δ_C(n) n, mutual r = 3 over kScanR3
inline constexpr double mutual_r3 = 3.22;
// max Δ_PC(n) n / ln n, pairwise r = 2 over kScanR2
inline constexpr double pairwise_r2 = 0.443;
// max CDF error · ln n, gcd measure
inline constexpr double gcd_cdf = 0.293;
// max CDF error · n / ln n, lcm measure
inline constexpr double lcm_cdf = 0.124;
// max |ν_n / (n² ln n) − 1/ζ(2)| over kGcdNormScales
inline constexpr double gcd_norm_dev = 0.0360;
// max |η_n / n⁴ − ζ(3)/(4ζ(2))| · n / ln n over kLcmNormScales
inline constexpr double lcm_norm = 0.0488;
// max |frequency − limit| · n for the pattern family
inline constexpr double pattern = 0.112;
}  // namespace frozen

inline double gcd_norm_target() { return inverse_zeta(2).midpoint(); }

// ζ(3) / (4 ζ(2)) as an interval.
inline Interval lcm_norm_target() {
  const Interval z3 = zeta(3);
  const Interval iz2 = inverse_zeta(2);
  return Interval::make(detail::step_down(z3.lo * iz2.lo / 4), detail::step_up(z3.hi * iz2.hi / 4));
}

struct Measured {
  double mutual_r2;
  double mutual_r3;
  double pairwise_r2;
  double gcd_cdf;
  double lcm_cdf;
  double gcd_norm_dev;
  double lcm_norm;
  double pattern;
};

inline double max_rate(const TupleConstraint& c, const std::vector<std::uint64_t>& scan) {
  double m = 0;
  for (const auto& rep : rate_scan(c, scan)) m = std::max(m, rep.rate_ratio.value_or(0.0));
  return m;
}

inline double gcd_norm_ratio(std::uint64_t n, const ArithTables& tables) {
  const long double nn = static_cast<long double>(n);
  return static_cast<double>(static_cast<long double>(gcd_sum_box(n, n, tables)) / (nn * nn * std::log(nn)));
}

inline double lcm_norm_ratio(std::uint64_t n, const ArithTables& tables) {
  const long double nn = static_cast<long double>(n);
  return static_cast<double>(static_cast<long double>(lcm_sum_box(n, n, tables)) / (nn * nn * nn * nn));
}

inline double pattern_deviation(std::uint64_t n) {
  const long double freq = static_cast<long double>(bounded_multiplicity_count(n, kPatternPrimes, kPatternCaps, kPatternR)) /
                           std::pow(static_cast<long double>(n), kPatternR);
  return static_cast<double>(
      std::fabs(freq - bounded_multiplicity_limit(kPatternPrimes, kPatternCaps, kPatternR).to_long_double()));
}

inline Measured measure() {
  Measured m{};
  m.mutual_r2 = max_rate(TupleConstraint::make(2, CoprimalityClass::mutual()), kScanR2);
  m.mutual_r3 = max_rate(TupleConstraint::make(3, CoprimalityClass::mutual()), kScanR3);
  m.pairwise_r2 = max_rate(TupleConstraint::make(2, CoprimalityClass::pairwise()), kScanR2);

  std::uint64_t top = std::max(*std::max_element(kGcdNormScales.begin(), kGcdNormScales.end()),
                               *std::max_element(kMeasureScales.begin(), kMeasureScales.end()));
  const ArithTables tables(top);
  for (const auto n : kMeasureScales) {
    const double ln = std::log(static_cast<double>(n));
    m.gcd_cdf = std::max(m.gcd_cdf, measure_cdf_error(MeasureKind::gcd, n, kMeasureStep, tables).max_error * ln);
    m.lcm_cdf = std::max(m.lcm_cdf, measure_cdf_error(MeasureKind::lcm, n, kMeasureStep, tables).max_error *
                                        static_cast<double>(n) / ln);
  }
  for (const auto n : kGcdNormScales)
    m.gcd_norm_dev = std::max(m.gcd_norm_dev, std::fabs(gcd_norm_ratio(n, tables) - gcd_norm_target()));
  for (const auto n : kLcmNormScales) {
    const double ln = std::log(static_cast<double>(n));
    const double dev = lcm_norm_target().distance(lcm_norm_ratio(n, tables));
    m.lcm_norm = std::max(m.lcm_norm, dev * static_cast<double>(n) / ln);
  }
  for (const auto n : kPatternScales) m.pattern = std::max(m.pattern, pattern_deviation(n) * static_cast<double>(n));
  return m;
}

inline Measured frozen_values() {
  return {frozen::mutual_r2, frozen::mutual_r3,  frozen::pairwise_r2, frozen::gcd_cdf,
          frozen::lcm_cdf,   frozen::gcd_norm_dev, frozen::lcm_norm,  frozen::pattern};
}

// Envelopes asserted by the tests and the CLI bound check.
inline double gcd_cdf_bound(std::uint64_t n) { return kHeadroom * frozen::gcd_cdf / std::log(static_cast<double>(n)); }
inline double lcm_cdf_bound(std::uint64_t n) {
  return kHeadroom * frozen::lcm_cdf * std::log(static_cast<double>(n)) / static_cast<double>(n);
}
inline double lcm_norm_bound(std::uint64_t n) {
  return kHeadroom * frozen::lcm_norm * std::log(static_cast<double>(n)) / static_cast<double>(n);
}
inline Interval gcd_norm_band() {
  const double t = gcd_norm_target();
  return Interval::make(t - kHeadroom * frozen::gcd_norm_dev, t + kHeadroom * frozen::gcd_norm_dev);
}

}  // namespace coprime_lab::calibration
