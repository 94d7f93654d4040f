#pragma once

// Exact dyadic rationals num / 2^k over arbitrary-precision integers.
// Canonical form: k > 0 implies num is odd; num == 0 implies k == 0.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace specnorm {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

class Dyadic {
 public:
  Dyadic() : num_(0), k_(0) {}
  Dyadic(long long v) : num_(v), k_(0) {}  // NOLINT: implicit from integers
  Dyadic(const BigInt& v) : num_(v), k_(0) {}

  // value = num / 2^k, normalized on construction.
  static Dyadic scaled(BigInt num, unsigned k) {
    Dyadic d;
    d.num_ = std::move(num);
    d.k_ = k;
    d.normalize();
    return d;
  }

  const BigInt& numerator() const { return num_; }
  unsigned log2_denominator() const { return k_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_integer() const { return k_ == 0; }
  int sign() const { return num_.sign(); }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    unsigned k = std::max(a.k_, b.k_);
    return scaled((a.num_ << (k - a.k_)) + (b.num_ << (k - b.k_)), k);
  }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) {
    unsigned k = std::max(a.k_, b.k_);
    return scaled((a.num_ << (k - a.k_)) - (b.num_ << (k - b.k_)), k);
  }
  Dyadic operator-() const {
    Dyadic d;
    d.num_ = -num_;
    d.k_ = k_;
    return d;
  }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    return scaled(a.num_ * b.num_, a.k_ + b.k_);
  }
  Dyadic& operator+=(const Dyadic& b) { return *this = *this + b; }
  Dyadic& operator-=(const Dyadic& b) { return *this = *this - b; }
  Dyadic& operator*=(const Dyadic& b) { return *this = *this * b; }

  Dyadic abs() const {
    Dyadic d = *this;
    if (d.num_ < 0) d.num_ = -d.num_;
    return d;
  }

  // value / 2^j
  Dyadic div_pow2(unsigned j) const { return scaled(num_, k_ + j); }
  // value * 2^j
  Dyadic mul_pow2(unsigned j) const {
    if (num_.is_zero()) return Dyadic();
    if (j >= k_) {
      Dyadic d;
      d.num_ = num_ << (j - k_);
      d.k_ = 0;
      return d;
    }
    Dyadic d;
    d.num_ = num_;
    d.k_ = k_ - j;
    return d;
  }

  Dyadic pow(unsigned e) const {
    Dyadic r(1);
    Dyadic base = *this;
    while (e > 0) {
      if (e & 1u) r *= base;
      base *= base;
      e >>= 1u;
    }
    return r;
  }

  // Exact three-way comparison.
  friend int cmp(const Dyadic& a, const Dyadic& b) {
    unsigned k = std::max(a.k_, b.k_);
    BigInt la = a.num_ << (k - a.k_);
    BigInt lb = b.num_ << (k - b.k_);
    return la.compare(lb);
  }
  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.k_ == b.k_ && a.num_ == b.num_;
  }
  friend bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }
  friend bool operator<(const Dyadic& a, const Dyadic& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const Dyadic& a, const Dyadic& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) >= 0; }

  BigInt floor() const {
    if (k_ == 0) return num_;
    return num_ >> k_;  // cpp_int right shift is arithmetic: floors negatives
  }

  // Nearest integer, ties to even.
  BigInt nearest_int() const {
    if (k_ == 0) return num_;
    BigInt f = floor();
    // frac = value - f has denominator 2^k with k >= 1; compare to 1/2.
    BigInt frac_num = num_ - (f << k_);          // in [0, 2^k)
    BigInt half = BigInt(1) << (k_ - 1);
    if (frac_num < half) return f;
    if (frac_num > half) return f + 1;
    return (f % 2 == 0) ? f : f + 1;             // tie: even neighbor
  }

  // |value - nearest_int()|; at exact half-distance the result is 1/2.
  Dyadic dist_to_int() const { return (*this - Dyadic(nearest_int())).abs(); }

  // "num" when integral, else "num/2^k".
  std::string to_string() const {
    std::string s = num_.str();
    if (k_ == 0) return s;
    return s + "/2^" + std::to_string(k_);
  }

  // Exact finite decimal (every dyadic has one), e.g. 3/2^1 -> "1.5".
  std::string to_decimal() const {
    if (k_ == 0) return num_.str();
    BigInt scaled_num = num_ * boost::multiprecision::pow(BigInt(5), k_);
    bool neg = scaled_num < 0;
    std::string digits = BigInt(boost::multiprecision::abs(scaled_num)).str();
    if (digits.size() <= k_) digits.insert(0, k_ + 1 - digits.size(), '0');
    digits.insert(digits.size() - k_, ".");
    while (digits.back() == '0') digits.pop_back();
    if (digits.back() == '.') digits.pop_back();
    return (neg ? "-" : "") + digits;
  }

  // Inverse of to_string(); rejects non-canonical encodings.
  static std::optional<Dyadic> parse(std::string_view s) {
    auto pos = s.find("/2^");
    BigInt num;
    unsigned k = 0;
    try {
      if (pos == std::string_view::npos) {
        num = BigInt(std::string(s));
      } else {
        num = BigInt(std::string(s.substr(0, pos)));
        std::string ks(s.substr(pos + 3));
        if (ks.empty() || ks[0] == '-' || ks[0] == '+') return std::nullopt;
        k = static_cast<unsigned>(std::stoul(ks));
      }
    } catch (const std::exception&) {
      return std::nullopt;
    }
    Dyadic d = scaled(num, k);
    if (d.num_ != num || d.k_ != k) return std::nullopt;
    return d;
  }

  BigRational to_rational() const {
    return BigRational(num_, BigInt(1) << k_);
  }

 private:
  void normalize() {
    if (num_.is_zero()) {
      k_ = 0;
      return;
    }
    if (k_ == 0) return;
    unsigned tz = boost::multiprecision::lsb(boost::multiprecision::abs(num_));
    unsigned shift = std::min(tz, k_);
    num_ >>= shift;
    k_ -= shift;
  }

  BigInt num_;
  unsigned k_;
};

inline Dyadic abs(const Dyadic& d) { return d.abs(); }

inline BigInt ceil_rational(const BigRational& x) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  BigInt q = numerator(x) / denominator(x);  // truncates toward zero
  if (BigRational(q) < x) ++q;
  return q;
}

}  // namespace specnorm
