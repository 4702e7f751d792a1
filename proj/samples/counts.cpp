// Same count by every exact method. Timing differences are the point.
#include <chrono>
#include <cstdio>

#include "coprime_lab/counting.hpp"

using namespace coprime_lab;

int main() {
  const std::uint64_t n = 300;
  const auto c = TupleConstraint::make(3, CoprimalityClass::pairwise());
  const Box box = Box::cube(n, 3);
  const auto time = [](const char* name, auto f) {
    const auto t0 = std::chrono::steady_clock::now();
    const uint128 v = f();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-12s %s  %.3f s\n", name, to_string(v).c_str(), s);
  };
  time("brute_force", [&] { return count_box_bruteforce(box, c).count; });
  time("toth", [&] { return count_toth(box.bounds, 1).count; });
  time("mobius", [&] { return count_kwise_mobius(box, c).count; });
}
