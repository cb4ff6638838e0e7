#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace thue {

// Exact rational arithmetic for the power exponents. Every ceil/floor the
// detectors and the log decoder perform must be bit-exact: a drifting
// ceil(l*eps) desynchronizes encode and decode. Values stay tiny (exponents
// like 3/2, 1/3), so int64 with __int128 intermediates is plenty.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw Error(Errc::InvalidParameter, "rational with zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }
  static Rational from_int(std::int64_t v) { return Rational(v, 1); }

  // Accepts "p/q" or a bare integer "p".
  static Rational parse(const std::string& raw) {
    auto bad = [&] { return Error(Errc::SpecParseError, "expected exact fraction p/q, got '" + raw + "'"); };
    std::size_t b = raw.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) throw bad();
    std::string s = raw.substr(b, raw.find_last_not_of(" \t\r\n") - b + 1);
    std::size_t slash = s.find('/');
    try {
      std::size_t used = 0;
      std::int64_t p = std::stoll(s.substr(0, slash), &used);
      if (used != (slash == std::string::npos ? s.size() : slash)) throw bad();
      std::int64_t q = 1;
      if (slash != std::string::npos) {
        q = std::stoll(s.substr(slash + 1), &used);
        if (used != s.size() - slash - 1) throw bad();
      }
      return Rational(p, q);
    } catch (const Error&) {
      throw;
    } catch (...) {
      throw bad();
    }
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  Rational operator+(const Rational& o) const {
    return Rational(i128_to_64((__int128)num_ * o.den_ + (__int128)o.num_ * den_),
                    i128_to_64((__int128)den_ * o.den_));
  }
  Rational operator-(const Rational& o) const {
    return Rational(i128_to_64((__int128)num_ * o.den_ - (__int128)o.num_ * den_),
                    i128_to_64((__int128)den_ * o.den_));
  }
  Rational operator*(const Rational& o) const {
    return Rational(i128_to_64((__int128)num_ * o.num_), i128_to_64((__int128)den_ * o.den_));
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw Error(Errc::InvalidParameter, "rational division by zero");
    return Rational(i128_to_64((__int128)num_ * o.den_), i128_to_64((__int128)den_ * o.num_));
  }
  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return (__int128)num_ * o.den_ < (__int128)o.num_ * den_;
  }
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  // ceil(this * k) and floor(this * k) for k >= 0, exact.
  std::int64_t ceil_mul(std::int64_t k) const {
    THUE_CHECK(k >= 0 && num_ >= 0, "ceil_mul expects nonnegative operands");
    __int128 p = (__int128)num_ * k;
    return i128_to_64((p + den_ - 1) / den_);
  }
  std::int64_t floor_mul(std::int64_t k) const {
    THUE_CHECK(k >= 0 && num_ >= 0, "floor_mul expects nonnegative operands");
    return i128_to_64((__int128)num_ * k / den_);
  }
  // floor(k / this) for k >= 0 and this > 0, exact.
  std::int64_t floor_div_into(std::int64_t k) const {
    THUE_CHECK(k >= 0 && num_ > 0, "floor_div_into expects positive rational");
    return i128_to_64((__int128)den_ * k / num_);
  }
  std::int64_t ceil_value() const {
    THUE_CHECK(num_ >= 0, "ceil_value expects nonnegative rational");
    return (num_ + den_ - 1) / den_;
  }
  std::int64_t floor_value() const {
    THUE_CHECK(num_ >= 0, "floor_value expects nonnegative rational");
    return num_ / den_;
  }

 private:
  static std::int64_t i128_to_64(__int128 v) {
    THUE_CHECK(v <= INT64_MAX && v >= INT64_MIN, "rational arithmetic overflow");
    return (std::int64_t)v;
  }
  std::int64_t num_, den_;
};

}  // namespace thue
