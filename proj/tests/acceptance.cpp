// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every tolerance is pinned below; nothing is read from the environment.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cases.hpp"
#include "coprime_lab/calibration.hpp"
#include "coprime_lab/commands.hpp"
#include "coprime_lab/constants.hpp"
#include "coprime_lab/counting.hpp"
#include "coprime_lab/discrepancy.hpp"
#include "coprime_lab/montecarlo.hpp"
#include "oracles.hpp"

using namespace coprime_lab;
using oracle::Tuple;

namespace {

// 1. mutual density
constexpr std::uint64_t kC1N2 = 10000;
constexpr double kC1Tol2 = 1e-3;
constexpr double kC1Seconds = 1.0;
constexpr std::uint64_t kC1N3 = 1000;
constexpr double kC1Tol3 = 3e-3;
// 2. pairwise density, brute force
constexpr std::uint64_t kC2N = 1500;
constexpr double kC2Tol = 2e-3;
constexpr double kC2Width = 1e-5;
// 3. k-wise density, brute force
constexpr std::uint64_t kC3N = 300;
constexpr double kC3Tol = 5e-3;
// 4. side-condition formulas
constexpr std::uint64_t kC4N = 5040;
constexpr std::uint64_t kC4MaxA = 10;
constexpr std::uint64_t kC4MaxResidueA = 6;
constexpr double kC4Tol = 1e-2;
constexpr std::uint64_t kC4MaxU = 210;
// 5. oracle equivalence
constexpr std::uint64_t kC5N2 = 128;
constexpr std::uint64_t kC5N3 = 40;
constexpr std::uint64_t kC5Toth = 100;
// 8. patterns
constexpr std::uint64_t kC8N = 10000;
constexpr int kC8Slack = 10;  // |freq − P| <= kC8Slack / n
// 9. Monte Carlo coverage
constexpr std::uint64_t kC9Runs = 200;
constexpr std::uint64_t kC9N = 1'000'000;
constexpr std::uint64_t kC9Samples = 10000;
constexpr double kC9Confidence = 0.99;
constexpr double kC9Slack = 0.05;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "failed: ";
      pass = false;
      detail << what << "; ";
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double frequency(uint128 count, std::uint64_t n, int r) {
  return static_cast<double>(static_cast<long double>(count) / std::pow(static_cast<long double>(n), r));
}

void criterion1(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto c2 = count_mutual_mobius(Box::cube(kC1N2, 2), TupleConstraint::make(2, CoprimalityClass::mutual()));
  const double secs = seconds_since(t0);
  const double f2 = frequency(c2.count, kC1N2, 2);
  const double d2 = std::fabs(f2 - inverse_zeta(2).midpoint());
  const auto c3 = count_mutual_mobius(Box::cube(kC1N3, 3), TupleConstraint::make(3, CoprimalityClass::mutual()));
  const double d3 = std::fabs(frequency(c3.count, kC1N3, 3) - inverse_zeta(3).midpoint());
  o.require(d2 <= kC1Tol2, "r=2 deviation " + fmt(d2));
  o.require(secs < kC1Seconds, "r=2 took " + fmt(secs) + " s");
  o.require(d3 <= kC1Tol3, "r=3 deviation " + fmt(d3));
  o.detail << "r=2 n=" << kC1N2 << " dev " << fmt(d2) << " (" << fmt(secs) << " s); r=3 n=" << kC1N3 << " dev "
           << fmt(d3);
}

void criterion2(Outcome& o) {
  const auto c = TupleConstraint::make(3, CoprimalityClass::pairwise());
  const auto res = count_box_bruteforce(Box::cube(kC2N, 3), c, {10'000'000'000ull, 0});
  const double f = frequency(res.count, kC2N, 3);
  const auto T3 = pairwise_constant(3);
  o.require(T3.distance(f) <= kC2Tol, "distance " + fmt(T3.distance(f)));
  o.require(T3.width() <= kC2Width, "interval width " + fmt(T3.width()));
  o.detail << "G(" << kC2N << ")/n^3 = " << fmt(f) << ", distance " << fmt(T3.distance(f)) << ", width "
           << fmt(T3.width());
}

void criterion3(Outcome& o) {
  const auto c = TupleConstraint::make(4, CoprimalityClass::kwise(3));
  const auto res = count_box_bruteforce(Box::cube(kC3N, 4), c, {10'000'000'000ull, 0});
  const double f = frequency(res.count, kC3N, 4);
  const auto K = kwise_constant(4, 3);
  o.require(K.distance(f) <= kC3Tol, "distance " + fmt(K.distance(f)));
  for (int r = 2; r <= 6; ++r)
    o.require(kwise_constant(r, r).overlaps(inverse_zeta(r)), "k=r overlap fails at r=" + std::to_string(r));
  o.detail << "(4,3) n=" << kC3N << " freq " << fmt(f) << ", distance " << fmt(K.distance(f))
           << "; k=r overlaps 1/zeta(r) for r=2..6";
}

void criterion4(Outcome& o) {
  const ArithTables tables(kC4N);
  std::size_t checked = 0;
  double worst = 0;
  for (int r = 2; r <= 3; ++r) {
    const Tuple bounds(static_cast<std::size_t>(r), kC4N);
    const Box box = Box::cube(kC4N, r);
    const auto plan = MobiusPlan::build(bounds, 2, tables);
    for (const char cls : {'m', 'p'}) {
      for (const auto& cs_case : cases::side_cases(cls, 0, r, kC4MaxA, kC4MaxResidueA)) {
        if (cs_case.side == 'n') continue;
        const auto c = cs_case.build(r);
        const uint128 count = c.effective_k() == r ? count_mutual_mobius(box, c, tables).count : plan.evaluate(c);
        const double dev = std::fabs(frequency(count, kC4N, r) - density(c).midpoint());
        worst = std::max(worst, dev);
        ++checked;
        o.require(dev <= kC4Tol, cs_case.label() + " deviation " + fmt(dev));
      }
    }
  }

  // Exact collapses.
  std::size_t collapses = 0;
  for (int r = 2; r <= 3; ++r) {
    for (const auto& a : oracle::coprime_vectors(r, kC4MaxA)) {
      for (const char cls : {'m', 'p'}) {
        const Tuple zero(a.size(), 0);
        const auto residue = density_factor(cases::Case{cls, 0, 'e', a, zero, {}}.build(r)).factor;
        const auto divisible = density_factor(cases::Case{cls, 0, 'd', a, {}, {}}.build(r)).factor;
        o.require(residue == divisible, "b=0 collapse at " + cases::Case{cls, 0, 'd', a, {}, {}}.label());
        std::vector<int> own(a.size());
        for (std::size_t j = 0; j < own.size(); ++j) own[j] = static_cast<int>(j);
        const auto grouped = density_factor(cases::Case{cls, 0, 'g', a, {}, own}.build(r)).factor;
        const auto coprime = density_factor(cases::Case{cls, 0, 'c', a, {}, {}}.build(r)).factor;
        o.require(grouped == coprime, "m=r collapse at " + cases::Case{cls, 0, 'c', a, {}, {}}.label());
        collapses += 2;
      }
    }
    for (std::uint64_t u = 1; u <= kC4MaxU; ++u) {
      // Single block: pairwise ∏ (p − 1)/(p + r − 1), mutual ∏ (1 − 1/p)^r / (1 − p^{−r}).
      Rational pw{1}, mu{1};
      for (std::uint64_t p = 2; p <= u; ++p) {
        if (u % p || !oracle::is_prime(p)) continue;
        const auto pl = static_cast<int128>(p);
        pw *= Rational(pl - 1, pl + r - 1);
        mu *= Rational(pl - 1, pl).pow(static_cast<unsigned>(r)) / (Rational(1) - Rational(1, pl).pow(static_cast<unsigned>(r)));
      }
      const std::vector<int> one(static_cast<std::size_t>(r), 0);
      o.require(density_factor(cases::Case{'p', 0, 'g', {u}, {}, one}.build(r)).factor == pw,
                "m=1 pairwise collapse at u=" + std::to_string(u));
      o.require(density_factor(cases::Case{'m', 0, 'g', {u}, {}, one}.build(r)).factor == mu,
                "m=1 mutual collapse at u=" + std::to_string(u));
      collapses += 2;
    }
  }
  o.detail << checked << " side-condition densities at n=" << kC4N << ", max deviation " << fmt(worst) << "; "
           << collapses << " exact collapses";
}

void criterion5(Outcome& o) {
  std::size_t boxes = 0;
  // r = 2: every box, unconditioned against the library's brute force, side
  // families against the oracle's prefix table.
  {
    const ArithTables tables(kC5N2);
    for (const auto& c : {TupleConstraint::make(2, CoprimalityClass::mutual()), TupleConstraint::make(2, CoprimalityClass::pairwise())})
      for (std::uint64_t i = 0; i <= kC5N2; ++i)
        for (std::uint64_t j = 0; j <= kC5N2; ++j) {
          const Box box = Box::make(kC5N2, {i, j});
          if (count_mutual_mobius(box, c, tables).count != count_box_bruteforce(box, c, {kBruteForceBudget, 1}).count) {
            o.require(false, "r=2 box " + std::to_string(i) + "," + std::to_string(j));
            return;
          }
          ++boxes;
        }
    auto cs = cases::side_cases('m', 0, 2, 10, 6);
    for (const Tuple& g : {Tuple{6}, Tuple{2, 15}}) {
      std::vector<int> blocks = g.size() == 1 ? std::vector<int>{0, 0} : std::vector<int>{0, 1};
      cs.push_back({'m', 0, 'g', g, {}, blocks});
    }
    for (const auto& cs_case : cs) {
      const auto c = cs_case.build(2);
      const auto table = oracle::prefix_table(kC5N2, 2, [&](const Tuple& x) { return cs_case.accepts(x); });
      for (std::uint64_t i = 0; i <= kC5N2; ++i)
        for (std::uint64_t j = 0; j <= kC5N2; ++j) {
          if (count_mutual_mobius(Box::make(kC5N2, {i, j}), c, tables).count != table.at({i, j})) {
            o.require(false, cs_case.label() + " box " + std::to_string(i) + "," + std::to_string(j));
            return;
          }
          ++boxes;
        }
    }
  }
  // r = 3: every box up to kC5N3.
  {
    const ArithTables tables(kC5N3);
    auto cs = cases::side_cases('m', 0, 3, 5, 3);
    cs.push_back({'m', 0, 'g', {2, 3}, {}, {0, 0, 1}});
    for (const auto& cs_case : cs) {
      const auto c = cs_case.build(3);
      const auto table = oracle::prefix_table(kC5N3, 3, [&](const Tuple& x) { return cs_case.accepts(x); });
      for (std::uint64_t i = 0; i <= kC5N3; ++i)
        for (std::uint64_t j = 0; j <= kC5N3; ++j)
          for (std::uint64_t l = 0; l <= kC5N3; ++l) {
            if (count_mutual_mobius(Box::make(kC5N3, {i, j, l}), c, tables).count != table.at({i, j, l})) {
              o.require(false, cs_case.label() + " r=3 box");
              return;
            }
            ++boxes;
          }
    }
  }
  // Toth against brute force on every cube n <= kC5Toth.
  std::size_t toth = 0;
  const ArithTables tables(kC5Toth);
  for (const std::uint64_t u : {1u, 2u, 6u, 30u}) {
    for (std::uint64_t n = 1; n <= kC5Toth; ++n) {
      std::uint64_t coprime = 0;
      for (std::uint64_t x = 1; x <= n; ++x) coprime += std::gcd(x, u) == 1;
      o.require(count_toth({n}, u, tables).count == coprime, "toth r=1");
      for (int r = 2; r <= 4; ++r) {
        const auto c = cases::Case{'p', 0, 'g', {u}, {}, std::vector<int>(static_cast<std::size_t>(r), 0)}.build(r);
        const Tuple bounds(static_cast<std::size_t>(r), n);
        if (count_toth(bounds, u, tables).count != count_box_bruteforce(Box::make(n, bounds), c).count) {
          o.require(false, "toth r=" + std::to_string(r) + " u=" + std::to_string(u) + " n=" + std::to_string(n));
          return;
        }
        ++toth;
      }
    }
  }
  o.detail << boxes << " Mobius boxes (n<=" << kC5N2 << " r=2, n<=" << kC5N3 << " r=3), " << toth
           << " Toth cubes (n<=" << kC5Toth << ", r<=4, u in 1,2,6,30), zero tolerance";
}

void criterion6(Outcome& o) {
  using namespace calibration;
  struct Scan {
    const char* name;
    TupleConstraint c;
    const std::vector<std::uint64_t>& ns;
    double frozen_value;
  };
  const std::vector<Scan> scans{{"C r=2", TupleConstraint::make(2, CoprimalityClass::mutual()), kScanR2, frozen::mutual_r2},
                                {"C r=3", TupleConstraint::make(3, CoprimalityClass::mutual()), kScanR3, frozen::mutual_r3},
                                {"PC r=2", TupleConstraint::make(2, CoprimalityClass::pairwise()), kScanR2, frozen::pairwise_r2}};
  for (const auto& s : scans) {
    double worst = 0;
    for (const auto& rep : rate_scan(s.c, s.ns)) {
      const double ratio = rep.rate_ratio.value_or(INFINITY);
      worst = std::max(worst, ratio);
      o.require(ratio <= kHeadroom * s.frozen_value, std::string(s.name) + " ratio " + fmt(ratio) + " at n=" + std::to_string(rep.n));
      o.require(rep.witness > 1.0 / (2.0 * static_cast<double>(rep.n)), std::string(s.name) + " witness at n=" + std::to_string(rep.n));
      o.require(rep.value >= rep.witness, std::string(s.name) + " value below witness");
    }
    o.detail << s.name << " max " << fmt(worst) << " <= " << fmt(kHeadroom * s.frozen_value) << "; ";
  }
  o.detail << "witness > 1/(2n) on every scale";
}

void criterion7(Outcome& o) {
  using namespace calibration;
  const ArithTables tables(4096);
  for (const std::uint64_t n : {1024u, 4096u}) {
    const double nu = gcd_norm_ratio(n, tables);
    o.require(gcd_norm_band().contains(nu), "nu ratio " + fmt(nu) + " at n=" + std::to_string(n));
    const double eta_dev = lcm_norm_target().distance(lcm_norm_ratio(n, tables));
    o.require(eta_dev <= lcm_norm_bound(n), "eta deviation " + fmt(eta_dev) + " at n=" + std::to_string(n));
    o.detail << "n=" << n << ": nu " << fmt(nu) << ", eta dev " << fmt(eta_dev) << " <= " << fmt(lcm_norm_bound(n)) << "; ";
  }
  for (const auto n : kMeasureScales) {
    const double g = measure_cdf_error(MeasureKind::gcd, n, kMeasureStep, tables).max_error;
    const double l = measure_cdf_error(MeasureKind::lcm, n, kMeasureStep, tables).max_error;
    o.require(g <= gcd_cdf_bound(n), "gcd CDF error " + fmt(g));
    o.require(l <= lcm_cdf_bound(n), "lcm CDF error " + fmt(l));
  }
  o.detail << "band " << fmt(gcd_norm_band().lo) << ".." << fmt(gcd_norm_band().hi) << "; CDF envelopes hold";
}

void criterion8(Outcome& o) {
  const auto patterns = all_patterns({2, 3}, 2);
  const uint128 nn = static_cast<uint128>(kC8N) * kC8N;
  double worst = 0;
  for (const auto& m : patterns) {
    const auto count = pattern_count(kC8N, m, {1.0, 1.0});
    const Rational p = pattern_probability(m);
    // |count/n² − num/den| <= slack/n, cross-multiplied.
    const int128 lhs = static_cast<int128>(count) * p.den() - p.num() * static_cast<int128>(nn);
    const int128 bound = static_cast<int128>(kC8Slack) * kC8N * p.den();
    o.require((lhs < 0 ? -lhs : lhs) <= bound, "pattern deviation too large");
    worst = std::max(worst, std::fabs(static_cast<double>(lhs) / static_cast<double>(p.den()) / static_cast<double>(nn)));
  }
  o.detail << patterns.size() << " patterns at n=" << kC8N << ", max deviation " << fmt(worst) << " ("
           << fmt(worst * kC8N) << "/n)";
}

void criterion9(Outcome& o) {
  const auto suite = paper_suite();
  std::ostringstream first, second;
  const int code1 = cmd_verify(suite, VerifyOptions{}, "jsonl", first);
  const int code2 = cmd_verify(suite, VerifyOptions{}, "jsonl", second);
  o.require(!first.str().empty(), "empty verify output");
  o.require(first.str() == second.str(), "verify output differs between runs");
  o.require(code1 == exit_ok && code2 == exit_ok, "verify exit code " + std::to_string(code1));
  const auto rep = coverage(TupleConstraint::make(2, CoprimalityClass::mutual()), kC9N, kC9Samples, kC9Confidence,
                            inverse_zeta(2).midpoint(), kC9Runs);
  o.require(rep.fraction >= kC9Confidence - kC9Slack, "coverage " + fmt(rep.fraction));
  o.detail << suite.size() << " suite rows byte-identical over two runs (exit " << code1 << "); coverage "
           << rep.covered << "/" << rep.runs;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"mutual density", criterion1},        {"pairwise density", criterion2},
      {"k-wise density", criterion3},        {"side-condition densities", criterion4},
      {"oracle equivalence", criterion5},    {"discrepancy rates", criterion6},
      {"gcd/lcm measures", criterion7},      {"divisibility patterns", criterion8},
      {"determinism and coverage", criterion9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail.str()
              << " (" << fmt(seconds_since(t0)) << " s)" << std::endl;
  }
  return failed ? 1 : 0;
}
