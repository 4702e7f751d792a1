#pragma once

// Monte Carlo density estimates with a counter-based generator.
//
// Generator (bit-exact):
//   mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//            z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//            z =  z ^ (z >> 31)                           (all mod 2^64)
//   coordinate j of sample i (0-based) uses
//            z = mix(seed + (i*r + j + 1) * 0x9E3779B97F4A7C15)
//            x = 1 + floor(z * n / 2^64)
// The map z -> x is off uniform by at most n / 2^64 per value. Every sample is
// a pure function of (seed, i, j), so any partition of the sample range gives
// the same estimate.

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "coprime_lab/arith.hpp"
#include "coprime_lab/constraint.hpp"
#include "coprime_lab/counting.hpp"
#include "coprime_lab/error.hpp"
#include "coprime_lab/parallel.hpp"

namespace coprime_lab {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t splitmix_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t sample_coordinate(std::uint64_t seed, std::uint64_t i, int r, int j, std::uint64_t n) {
  const std::uint64_t z = splitmix_mix(seed + (i * static_cast<std::uint64_t>(r) + static_cast<std::uint64_t>(j) + 1) * kGolden);
  return 1 + static_cast<std::uint64_t>((static_cast<uint128>(z) * n) >> 64);
}

struct McEstimate {
  double mean;
  double half_width;
  std::uint64_t samples;
  std::uint64_t seed;
  double confidence;
  std::uint64_t hits;

  bool covers(double x) const { return std::fabs(x - mean) <= half_width; }
};

inline double hoeffding_half_width(std::uint64_t samples, double confidence) {
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(samples)));
}

inline McEstimate estimate(const TupleConstraint& c, std::uint64_t n, std::uint64_t samples, std::uint64_t seed,
                           double confidence = 0.99, unsigned workers = 0) {
  if (samples < 100) throw invalid_argument("Monte Carlo needs at least 100 samples");
  if (!(confidence > 0.0 && confidence < 1.0)) throw invalid_argument("confidence must lie in (0, 1)");
  if (n < 1) throw invalid_argument("Monte Carlo needs n >= 1");
  std::unique_ptr<ArithTables> tables;
  if (c.effective_k() != 2 && c.effective_k() != c.r() && n <= 10'000'000)
    tables = std::make_unique<ArithTables>(std::max<std::uint64_t>(2, n));
  const int r = c.r();
  const uint128 hits = parallel_sum(
      0, samples,
      [&](std::uint64_t lo, std::uint64_t hi) {
        std::vector<std::uint64_t> x(static_cast<std::size_t>(r));
        uint128 h = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
          for (int j = 0; j < r; ++j) x[static_cast<std::size_t>(j)] = sample_coordinate(seed, i, r, j, n);
          if (member(x, c, tables.get())) ++h;
        }
        return h;
      },
      workers ? workers : worker_count());
  const auto h = static_cast<std::uint64_t>(hits);
  return {static_cast<double>(h) / static_cast<double>(samples), hoeffding_half_width(samples, confidence), samples,
          seed, confidence, h};
}

struct CoverageReport {
  std::uint64_t runs;
  std::uint64_t covered;
  double fraction;
};

// Fraction of seeds seed0, seed0+1, ... whose interval contains `truth`.
inline CoverageReport coverage(const TupleConstraint& c, std::uint64_t n, std::uint64_t samples, double confidence,
                               double truth, std::uint64_t runs, std::uint64_t seed0 = 1) {
  std::uint64_t covered = 0;
  for (std::uint64_t s = 0; s < runs; ++s)
    if (estimate(c, n, samples, seed0 + s, confidence).covers(truth)) ++covered;
  return {runs, covered, runs ? static_cast<double>(covered) / static_cast<double>(runs) : 0.0};
}

}  // namespace coprime_lab
