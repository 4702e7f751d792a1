#pragma once

// Description of a constrained set of r-tuples: a coprimality class plus
// optional per-coordinate side conditions, or a grouped coprime-to mode where
// several coordinates share one modulus.

#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "coprime_lab/error.hpp"

namespace coprime_lab {

enum class Coprimality { mutual, pairwise, kwise };

struct CoprimalityClass {
  Coprimality kind = Coprimality::mutual;
  int k = 0;  // only meaningful for kwise

  static CoprimalityClass mutual() { return {Coprimality::mutual, 0}; }
  static CoprimalityClass pairwise() { return {Coprimality::pairwise, 0}; }
  static CoprimalityClass kwise(int k) { return {Coprimality::kwise, k}; }

  // Largest number of coordinates a prime may divide is effective_k(r) − 1.
  int effective_k(int r) const {
    switch (kind) {
      case Coprimality::mutual: return r;
      case Coprimality::pairwise: return 2;
      case Coprimality::kwise: return k;
    }
    return r;
  }

  friend bool operator==(const CoprimalityClass&, const CoprimalityClass&) = default;
};

struct SideCondition {
  enum class Kind { none, coprime_to, divisible_by, residue };

  Kind kind = Kind::none;
  std::uint64_t modulus = 1;
  std::uint64_t residue = 0;

  static SideCondition none() { return {}; }
  static SideCondition coprime_to(std::uint64_t a) { return {Kind::coprime_to, a, 0}; }
  static SideCondition divisible_by(std::uint64_t a) { return {Kind::divisible_by, a, 0}; }
  static SideCondition residue_mod(std::uint64_t a, std::uint64_t b) { return {Kind::residue, a, b}; }

  // Modulus 1 conditions are vacuous.
  bool trivial() const { return kind == Kind::none || modulus == 1; }

  // Divisible-by and residue are the same progression condition.
  bool progression() const { return kind == Kind::divisible_by || kind == Kind::residue; }

  bool accepts(std::uint64_t x) const {
    switch (kind) {
      case Kind::none: return true;
      case Kind::coprime_to: return std::gcd(x, modulus) == 1;
      case Kind::divisible_by: return x % modulus == 0;
      case Kind::residue: return x % modulus == residue;
    }
    return true;
  }

  friend bool operator==(const SideCondition&, const SideCondition&) = default;
};

// Partition of {0..r-1} into m blocks; block i carries modulus moduli[i] and
// every coordinate j in block i must be coprime to it.
struct Grouping {
  std::vector<int> block_of;
  std::vector<std::uint64_t> moduli;

  std::vector<int> block_sizes() const {
    std::vector<int> sizes(moduli.size(), 0);
    for (const int b : block_of) ++sizes[static_cast<std::size_t>(b)];
    return sizes;
  }

  friend bool operator==(const Grouping&, const Grouping&) = default;
};

namespace detail {

inline bool pairwise_coprime(const std::vector<std::uint64_t>& values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      if (std::gcd(values[i], values[j]) != 1) return false;
  return true;
}

inline std::string join(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace detail

class TupleConstraint {
 public:
  static TupleConstraint make(int r, CoprimalityClass cls, std::vector<SideCondition> sides = {},
                              std::optional<Grouping> grouping = std::nullopt) {
    if (r < 2) throw invalid_argument("tuple length r must be >= 2");
    if (r > 64) throw invalid_argument("tuple length r must be <= 64");
    if (cls.kind == Coprimality::kwise && (cls.k < 2 || cls.k > r))
      throw invalid_argument("k-wise class needs 2 <= k <= r");
    if (cls.kind != Coprimality::kwise) cls.k = 0;
    if (sides.empty()) sides.assign(static_cast<std::size_t>(r), SideCondition::none());
    if (sides.size() != static_cast<std::size_t>(r))
      throw invalid_argument("expected " + std::to_string(r) + " side conditions, got " +
                             std::to_string(sides.size()));

    std::vector<std::uint64_t> moduli;
    for (auto& s : sides) {
      if (s.kind != SideCondition::Kind::none && s.modulus == 0)
        throw invalid_argument("side condition modulus must be >= 1");
      if (s.kind == SideCondition::Kind::residue && s.residue >= s.modulus)
        throw invalid_argument("residue must satisfy 0 <= b < a");
      if (s.kind == SideCondition::Kind::none) s = SideCondition::none();
      if (!s.trivial()) moduli.push_back(s.modulus);
    }
    if (!detail::pairwise_coprime(moduli))
      throw invalid_argument("side-condition moduli (" + detail::join(moduli) + ") are not pairwise coprime");

    if (grouping) {
      if (cls.kind == Coprimality::kwise) throw invalid_argument("grouping mode needs mutual or pairwise class");
      for (const auto& s : sides)
        if (s.kind != SideCondition::Kind::none) throw invalid_argument("grouping mode excludes side conditions");
      if (grouping->block_of.size() != static_cast<std::size_t>(r))
        throw invalid_argument("grouping must assign a block to each of the r coordinates");
      if (grouping->moduli.empty()) throw invalid_argument("grouping needs at least one block");
      for (const int b : grouping->block_of)
        if (b < 0 || static_cast<std::size_t>(b) >= grouping->moduli.size())
          throw invalid_argument("grouping block index out of range");
      for (const int size : grouping->block_sizes())
        if (size == 0) throw invalid_argument("grouping blocks must be non-empty");
      for (const auto a : grouping->moduli)
        if (a == 0) throw invalid_argument("grouping modulus must be >= 1");
      if (!detail::pairwise_coprime(grouping->moduli))
        throw invalid_argument("grouping moduli (" + detail::join(grouping->moduli) + ") are not pairwise coprime");
    }
    return TupleConstraint(r, cls, std::move(sides), std::move(grouping));
  }

  int r() const { return r_; }
  const CoprimalityClass& coprimality() const { return class_; }
  int effective_k() const { return class_.effective_k(r_); }
  const std::vector<SideCondition>& sides() const { return sides_; }
  const std::optional<Grouping>& grouping() const { return grouping_; }

  // Condition actually imposed on coordinate j; grouping folds into coprime-to.
  SideCondition condition(int j) const {
    if (grouping_) {
      const auto a = grouping_->moduli[static_cast<std::size_t>(grouping_->block_of[static_cast<std::size_t>(j)])];
      return a == 1 ? SideCondition::none() : SideCondition::coprime_to(a);
    }
    const auto& s = sides_[static_cast<std::size_t>(j)];
    return s.trivial() ? SideCondition::none() : s;
  }

  bool has_conditions() const {
    for (int j = 0; j < r_; ++j)
      if (condition(j).kind != SideCondition::Kind::none) return true;
    return false;
  }

  std::string describe() const {
    std::ostringstream os;
    switch (class_.kind) {
      case Coprimality::mutual: os << "mutual"; break;
      case Coprimality::pairwise: os << "pairwise"; break;
      case Coprimality::kwise: os << "kwise(k=" << class_.k << ")"; break;
    }
    os << " r=" << r_;
    bool any = false;
    for (const auto& s : sides_) any = any || s.kind != SideCondition::Kind::none;
    if (any) {
      os << " sides=[";
      for (int j = 0; j < r_; ++j) {
        if (j) os << ',';
        const auto& s = sides_[static_cast<std::size_t>(j)];
        switch (s.kind) {
          case SideCondition::Kind::none: os << '-'; break;
          case SideCondition::Kind::coprime_to: os << "coprime:" << s.modulus; break;
          case SideCondition::Kind::divisible_by: os << "div:" << s.modulus; break;
          case SideCondition::Kind::residue: os << s.residue << "mod" << s.modulus; break;
        }
      }
      os << ']';
    }
    if (grouping_) {
      os << " groups=[";
      for (std::size_t j = 0; j < grouping_->block_of.size(); ++j) os << (j ? "," : "") << grouping_->block_of[j];
      os << "] group_moduli=[" << detail::join(grouping_->moduli) << ']';
    }
    return os.str();
  }

  friend bool operator==(const TupleConstraint&, const TupleConstraint&) = default;

 private:
  TupleConstraint(int r, CoprimalityClass cls, std::vector<SideCondition> sides, std::optional<Grouping> grouping)
      : r_(r), class_(cls), sides_(std::move(sides)), grouping_(std::move(grouping)) {}

  int r_;
  CoprimalityClass class_;
  std::vector<SideCondition> sides_;
  std::optional<Grouping> grouping_;
};

}  // namespace coprime_lab
