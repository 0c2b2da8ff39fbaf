// Copyright 2026 The sidesum Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "sidesum/error.hpp"

namespace sidesum {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number in canonical form: the denominator is positive and
/// coprime with the numerator. Arithmetic never rounds.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value) : value_(value) {}  // NOLINT: implicit by intent
  Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw InvalidArgument("rational with zero denominator");
    value_ = den < 0 ? Impl(BigInt(-num), BigInt(-den)) : Impl(num, den);
  }
  Rational(std::int64_t num, std::int64_t den)
      : Rational(BigInt(num), BigInt(den)) {}

  /// Parses "p/q" or "p" (optionally signed). Rejects q == 0 and stray text.
  static Rational parse(std::string_view text) {
    auto parse_int = [&](std::string_view part) {
      std::size_t i = 0;
      if (!part.empty() && (part[0] == '-' || part[0] == '+')) i = 1;
      if (i == part.size()) throw ParseError("bad rational: '" + std::string(text) + "'");
      for (std::size_t j = i; j < part.size(); ++j) {
        if (part[j] < '0' || part[j] > '9') {
          throw ParseError("bad rational: '" + std::string(text) + "'");
        }
      }
      BigInt v(std::string(part.substr(i)));
      return part[0] == '-' ? BigInt(-v) : v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text), BigInt(1));
    const BigInt den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash)), den);
  }

  BigInt numerator() const { return boost::multiprecision::numerator(value_); }
  BigInt denominator() const { return boost::multiprecision::denominator(value_); }

  /// Canonical "p/q" form; zero prints as "0/1" and integers as "k/1".
  std::string str() const { return numerator().str() + "/" + denominator().str(); }

  double to_double() const { return value_.convert_to<double>(); }

  int sign() const { return value_.sign(); }
  bool is_zero() const { return value_.is_zero(); }
  bool is_integer() const { return denominator() == 1; }

  Rational abs() const { return sign() < 0 ? -*this : *this; }

  /// Largest integer not above the value.
  BigInt floor() const {
    BigInt q = numerator() / denominator();
    if (sign() < 0 && q * denominator() != numerator()) --q;
    return q;
  }

  Rational operator-() const { return Rational(Impl(-value_)); }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw InvalidArgument("division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ > b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  using Impl = boost::multiprecision::cpp_rational;
  explicit Rational(Impl v) : value_(std::move(v)) {}

  Impl value_{0};
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Exact integer square root test: returns r with r*r == n, or -1.
inline std::int64_t exact_isqrt(std::int64_t n) {
  if (n < 0) return -1;
  auto r = static_cast<std::int64_t>(boost::multiprecision::sqrt(BigInt(n)));
  return r * r == n ? r : -1;
}

}  // namespace sidesum

template <>
struct std::hash<sidesum::Rational> {
  std::size_t operator()(const sidesum::Rational& r) const noexcept {
    return std::hash<std::string>{}(r.str());
  }
};
