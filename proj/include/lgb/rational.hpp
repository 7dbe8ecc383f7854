#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lgb {

/// Exact fraction over 128-bit integers. Disclosure probabilities and
/// information-loss terms are small fractions whose comparisons must be
/// exact (p <= 1/l style bounds), so no floating point here. Overflow
/// throws instead of wrapping.
class Rational {
 public:
  using Int = __int128;

  constexpr Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  static Rational from_raw(Int n, Int d) {
    Rational r;
    r.num_ = n;
    r.den_ = d;
    r.normalize();
    return r;
  }

  Int num() const { return num_; }
  Int den() const { return den_; }
  bool is_zero() const { return num_ == 0; }

  Rational operator+(const Rational& o) const {
    return from_raw(checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
  }
  Rational operator-(const Rational& o) const {
    return from_raw(checked_sub(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
  }
  Rational operator*(const Rational& o) const {
    if (num_ == 0 || o.num_ == 0) return Rational();
    // Reduce cross factors first to keep intermediates small.
    Int g1 = gcd128(abs128(num_), o.den_);
    Int g2 = gcd128(abs128(o.num_), den_);
    return from_raw(checked_mul(num_ / g1, o.num_ / g2),
                    checked_mul(den_ / g2, o.den_ / g1));
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    return *this * from_raw(o.den_, o.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return checked_mul(num_, o.den_) < checked_mul(o.num_, den_);
  }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator<=(const Rational& o) const { return !(o < *this); }
  bool operator>=(const Rational& o) const { return !(*this < o); }

  /// Largest integer <= value.
  std::int64_t floor() const {
    Int q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return static_cast<std::int64_t>(q);
  }
  /// Smallest integer >= value.
  std::int64_t ceil() const {
    Int q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return static_cast<std::int64_t>(q);
  }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    std::string s = int128_str(num_);
    if (den_ != 1) s += "/" + int128_str(den_);
    return s;
  }

 private:
  Int num_;
  Int den_;  // > 0, gcd(|num|, den) == 1

  static Int abs128(Int v) { return v < 0 ? -v : v; }

  static Int gcd128(Int a, Int b) {
    while (b != 0) {
      Int t = a % b;
      a = b;
      b = t;
    }
    return a < 0 ? -a : a;
  }

  static Int checked_mul(Int a, Int b) {
    Int out;
    if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("rational overflow (mul)");
    return out;
  }
  static Int checked_add(Int a, Int b) {
    Int out;
    if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("rational overflow (add)");
    return out;
  }
  static Int checked_sub(Int a, Int b) {
    Int out;
    if (__builtin_sub_overflow(a, b, &out)) throw std::overflow_error("rational overflow (sub)");
    return out;
  }

  static std::string int128_str(Int v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : v;
    std::string s;
    while (u > 0) {
      s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
      u /= 10;
    }
    return neg ? "-" + s : s;
  }

  void normalize() {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    Int g = gcd128(abs128(num_), den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }
};

/// Accumulates a sum of fractions exactly while it fits; past the 128-bit
/// range it degrades to long double. Query-bound rounding only needs the
/// floor/ceil of the sum, and the degraded path is reachable only with
/// pathological denominator mixes.
class FractionSum {
 public:
  void add(const Rational& r) {
    if (!exact_) {
      approx_ += static_cast<long double>(r.to_double());
      return;
    }
    try {
      sum_ += r;
    } catch (const std::overflow_error&) {
      approx_ = static_cast<long double>(sum_.to_double()) +
                static_cast<long double>(r.to_double());
      exact_ = false;
    }
  }

  bool exact() const { return exact_; }

  std::int64_t floor_value() const {
    if (exact_) return sum_.floor();
    return static_cast<std::int64_t>(std::floor(approx_));
  }
  std::int64_t ceil_value() const {
    if (exact_) return sum_.ceil();
    return static_cast<std::int64_t>(std::ceil(approx_));
  }

 private:
  Rational sum_;
  long double approx_ = 0.0L;
  bool exact_ = true;
};

}  // namespace lgb
