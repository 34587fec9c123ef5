#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <compare>
#include <string>

#include "ait/error.hpp"

namespace ait {

using BigInt = boost::multiprecision::cpp_int;

/// Exact value numerator / 2^exponent, kept with an odd numerator (or 0/2^0).
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(BigInt numerator, unsigned exponent) : num_(std::move(numerator)), exp_(exponent) {
    if (num_ < 0) throw UsageError("dyadic numerator must be non-negative");
    normalize();
  }

  /// 2^-bits
  static Dyadic unit(unsigned bits) { return Dyadic(1, bits); }

  const BigInt& numerator() const noexcept { return num_; }
  unsigned exponent() const noexcept { return exp_; }
  bool is_zero() const noexcept { return num_ == 0; }

  /// Numerator rescaled to denominator 2^e (e >= exponent()).
  BigInt scaled_to(unsigned e) const {
    if (e < exp_) throw UsageError("dyadic: cannot rescale to a smaller exponent");
    return num_ << (e - exp_);
  }

  Dyadic& operator+=(const Dyadic& o) {
    unsigned e = std::max(exp_, o.exp_);
    num_ = scaled_to(e) + o.scaled_to(e);
    exp_ = e;
    normalize();
    return *this;
  }
  friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }

  Dyadic& operator-=(const Dyadic& o) {
    unsigned e = std::max(exp_, o.exp_);
    BigInt r = scaled_to(e) - o.scaled_to(e);
    if (r < 0) throw InvariantViolation("dyadic subtraction went negative");
    num_ = std::move(r);
    exp_ = e;
    normalize();
    return *this;
  }
  friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }

  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    unsigned e = std::max(a.exp_, b.exp_);
    BigInt x = a.scaled_to(e), y = b.scaled_to(e);
    if (x < y) return std::strong_ordering::less;
    if (x > y) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.num_ == b.num_ && a.exp_ == b.exp_;
  }

  /// floor(value * 2^bits)
  BigInt floor_scaled(unsigned bits) const {
    if (bits >= exp_) return num_ << (bits - exp_);
    return num_ >> (exp_ - bits);
  }

  /// log2 of the value; -inf for zero. Reporting only, never used in checks.
  double log2() const {
    if (num_ == 0) return -INFINITY;
    unsigned nbits = static_cast<unsigned>(boost::multiprecision::msb(num_)) + 1;
    unsigned shift = nbits > 60 ? nbits - 60 : 0;
    double mant = static_cast<double>(static_cast<std::uint64_t>(num_ >> shift));
    return std::log2(mant) + static_cast<double>(shift) - static_cast<double>(exp_);
  }

  double to_double() const { return std::exp2(log2()); }

  std::string to_string() const { return num_.str() + "/2^" + std::to_string(exp_); }

 private:
  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    unsigned tz = static_cast<unsigned>(boost::multiprecision::lsb(num_));
    unsigned drop = std::min(tz, exp_);
    num_ >>= drop;
    exp_ -= drop;
  }

  BigInt num_ = 0;
  unsigned exp_ = 0;
};

}  // namespace ait
