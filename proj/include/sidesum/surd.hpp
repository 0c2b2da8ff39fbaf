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

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

#include "sidesum/error.hpp"
#include "sidesum/rational.hpp"

namespace sidesum {

/// Sign of p + q*sqrt(x) for rationals p, q and a non-negative integer x.
inline int surd_sign(const Rational& p, const Rational& q, std::int64_t x) {
  const int sp = p.sign();
  const int sq = x == 0 ? 0 : q.sign();
  if (sq == 0) return sp;
  if (sp == 0 || sp == sq) return sq;
  // Opposite signs: the larger magnitude wins, compared by squaring.
  const Rational diff = p * p - q * q * Rational(x);
  if (diff.sign() > 0) return sp;
  if (diff.sign() < 0) return sq;
  return 0;
}

/// Sign of p + q*sqrt(x) + r*sqrt(y), exactly.
inline int surd_sign(const Rational& p, const Rational& q, std::int64_t x, const Rational& r,
                     std::int64_t y) {
  if (y == 0 || r.is_zero()) return surd_sign(p, q, x);
  if (x == 0 || q.is_zero()) return surd_sign(p, r, y);
  if (x == y) return surd_sign(p, q + r, x);
  const int sa = surd_sign(p, q, x);
  const int sb = r.sign();
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // |p + q sqrt(x)| vs |r sqrt(y)|: compare squares, again a single surd.
  const int s = surd_sign(p * p + q * q * Rational(x) - r * r * Rational(y), Rational(2) * p * q, x);
  if (s > 0) return sa;
  if (s < 0) return sb;
  return 0;
}

/// Exact value rat + coef * sqrt(radicand). Normalized so that radicand is
/// zero whenever coef is zero, and perfect squares are folded into rat.
class Surd {
 public:
  Surd() = default;
  Surd(Rational value) : rat_(std::move(value)) {}  // NOLINT: implicit by intent
  Surd(Rational rat, Rational coef, std::int64_t radicand)
      : rat_(std::move(rat)), coef_(std::move(coef)), radicand_(radicand) {
    if (radicand_ < 0) throw InvalidArgument("negative radicand");
    normalize();
  }

  static Surd sqrt_of(std::int64_t n) { return Surd(Rational(0), Rational(1), n); }

  const Rational& rat() const { return rat_; }
  const Rational& coef() const { return coef_; }
  std::int64_t radicand() const { return radicand_; }

  bool is_rational() const { return radicand_ == 0; }
  /// True for the bare sqrt(n) form.
  bool is_pure_sqrt() const { return rat_.is_zero() && coef_ == Rational(1) && radicand_ != 0; }

  double to_double() const {
    return rat_.to_double() + coef_.to_double() * std::sqrt(static_cast<double>(radicand_));
  }

  int sign() const { return surd_sign(rat_, coef_, radicand_); }

  /// Human form: "3/1", "sqrt(10)", "-3/1 + 2/1*sqrt(5)".
  std::string str() const {
    if (is_rational()) return rat_.str();
    const std::string root = "sqrt(" + std::to_string(radicand_) + ")";
    const std::string term = coef_ == Rational(1) ? root : coef_.str() + "*" + root;
    return rat_.is_zero() ? term : rat_.str() + " + " + term;
  }

  friend Surd operator+(const Surd& a, const Rational& b) { return Surd(a.rat_ + b, a.coef_, a.radicand_); }
  friend Surd operator-(const Surd& a, const Rational& b) { return Surd(a.rat_ - b, a.coef_, a.radicand_); }
  friend Surd operator*(const Surd& a, const Rational& b) { return Surd(a.rat_ * b, a.coef_ * b, a.radicand_); }
  friend Surd operator/(const Surd& a, const Rational& b) { return Surd(a.rat_ / b, a.coef_ / b, a.radicand_); }

  friend bool operator==(const Surd& a, const Surd& b) {
    return a.rat_ == b.rat_ && a.coef_ == b.coef_ && a.radicand_ == b.radicand_;
  }

  friend std::strong_ordering operator<=>(const Surd& a, const Surd& b) {
    const int s = surd_sign(a.rat_ - b.rat_, a.coef_, a.radicand_, -b.coef_, b.radicand_);
    if (s < 0) return std::strong_ordering::less;
    if (s > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  void normalize() {
    if (coef_.is_zero() || radicand_ == 0) {
      coef_ = Rational(0);
      radicand_ = 0;
      return;
    }
    if (const auto root = exact_isqrt(radicand_); root >= 0) {
      rat_ += coef_ * Rational(root);
      coef_ = Rational(0);
      radicand_ = 0;
    }
  }

  Rational rat_;
  Rational coef_;
  std::int64_t radicand_ = 0;
};

}  // namespace sidesum
