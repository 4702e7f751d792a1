#pragma once

// Exact rationals over 128-bit integers, plus the 128-bit helpers the rest of
// the library shares. Every operation is overflow-checked.

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>

#include "coprime_lab/error.hpp"

namespace coprime_lab {

__extension__ typedef __int128 int128;
__extension__ typedef unsigned __int128 uint128;

inline std::string to_string(uint128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {s.rbegin(), s.rend()};
}

inline std::string to_string(int128 v) {
  if (v < 0) return "-" + to_string(static_cast<uint128>(-(v + 1)) + 1);
  return to_string(static_cast<uint128>(v));
}

namespace detail {

inline int128 checked_mul(int128 a, int128 b) {
  int128 out;
  if (__builtin_mul_overflow(a, b, &out)) throw overflow_error("128-bit multiplication overflow");
  return out;
}

inline int128 checked_add(int128 a, int128 b) {
  int128 out;
  if (__builtin_add_overflow(a, b, &out)) throw overflow_error("128-bit addition overflow");
  return out;
}

inline uint128 checked_mul(uint128 a, uint128 b) {
  uint128 out;
  if (__builtin_mul_overflow(a, b, &out)) throw overflow_error("128-bit multiplication overflow");
  return out;
}

inline uint128 checked_add(uint128 a, uint128 b) {
  uint128 out;
  if (__builtin_add_overflow(a, b, &out)) throw overflow_error("128-bit addition overflow");
  return out;
}

inline int128 abs128(int128 v) { return v < 0 ? -v : v; }

inline int128 gcd128(int128 a, int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline int128 checked_pow(int128 base, unsigned exp) {
  int128 result = 1;
  for (unsigned i = 0; i < exp; ++i) result = checked_mul(result, base);
  return result;
}

}  // namespace detail

class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t v) : num_(v), den_(1) {}  // NOLINT(implicit)
  Rational(int128 num, int128 den) : num_(num), den_(den) {
    if (den_ == 0) throw invalid_argument("rational with zero denominator");
    normalize();
  }

  static Rational from_int128(int128 v) { return {v, 1}; }

  int128 num() const { return num_; }
  int128 den() const { return den_; }
  bool is_integer() const { return den_ == 1; }

  long double to_long_double() const {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
  }

  // Outward-rounded double enclosure of the exact value.
  std::pair<double, double> enclose() const {
    if (den_ == 1 && detail::abs128(num_) <= (int128{1} << 53)) {
      const double d = static_cast<double>(num_);
      return {d, d};
    }
    const double d = static_cast<double>(to_long_double());
    return {std::nextafter(d, -std::numeric_limits<double>::infinity()),
            std::nextafter(d, std::numeric_limits<double>::infinity())};
  }

  Rational operator-() const { return {-num_, den_}; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const int128 g = detail::gcd128(a.den_, b.den_);
    const int128 da = a.den_ / g;
    const int128 db = b.den_ / g;
    return {detail::checked_add(detail::checked_mul(a.num_, db), detail::checked_mul(b.num_, da)),
            detail::checked_mul(a.den_, db)};
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    const int128 g1 = detail::gcd128(a.num_, b.den_);
    const int128 g2 = detail::gcd128(b.num_, a.den_);
    const int128 s1 = g1 == 0 ? 1 : g1;
    const int128 s2 = g2 == 0 ? 1 : g2;
    return {detail::checked_mul(a.num_ / s1, b.num_ / s2), detail::checked_mul(a.den_ / s2, b.den_ / s1)};
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw invalid_argument("rational division by zero");
    return a * Rational(b.den_, b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  Rational pow(unsigned exp) const {
    Rational out{1};
    for (unsigned i = 0; i < exp; ++i) out *= *this;
    return out;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int128 lhs = detail::checked_mul(a.num_, b.den_);
    const int128 rhs = detail::checked_mul(b.num_, a.den_);
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string str() const {
    if (den_ == 1) return to_string(num_);
    return to_string(num_) + "/" + to_string(den_);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& q) { return os << q.str(); }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const int128 g = detail::gcd128(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  int128 num_ = 0;
  int128 den_ = 1;
};

}  // namespace coprime_lab
