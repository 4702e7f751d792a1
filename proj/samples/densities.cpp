// Prints a few closed-form densities next to their empirical frequency.
#include <cstdio>

#include "coprime_lab/constants.hpp"
#include "coprime_lab/counting.hpp"

using namespace coprime_lab;

int main() {
  const std::uint64_t n = 2048;
  const TupleConstraint rows[] = {
      TupleConstraint::make(2, CoprimalityClass::mutual()),
      TupleConstraint::make(3, CoprimalityClass::pairwise()),
      TupleConstraint::make(2, CoprimalityClass::mutual(), {SideCondition::divisible_by(2), SideCondition::divisible_by(3)}),
      TupleConstraint::make(2, CoprimalityClass::pairwise(), {SideCondition::coprime_to(5), SideCondition::none()}),
  };
  for (const auto& c : rows) {
    const auto d = density(c);
    const auto f = density_factor(c);
    const auto res = count_kwise_mobius(Box::cube(n, c.r()), c);
    long double vol = 1;
    for (int j = 0; j < c.r(); ++j) vol *= n;
    std::printf("%-40s %-22s factor %-8s density %.8f  freq(n=%llu) %.8f\n", c.describe().c_str(), to_string(f.formula),
                f.factor.str().c_str(), d.midpoint(), static_cast<unsigned long long>(n),
                static_cast<double>(static_cast<long double>(res.count) / vol));
  }
}
