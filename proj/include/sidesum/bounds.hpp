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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sidesum/error.hpp"
#include "sidesum/geometry.hpp"
#include "sidesum/packing_json.hpp"
#include "sidesum/rational.hpp"
#include "sidesum/surd.hpp"

namespace sidesum {

/// Which container family a ledger describes. Parallelograms share the
/// square family's values.
enum class LedgerFamily { kSquare, kTriangle };

inline std::string_view to_string(LedgerFamily f) {
  return f == LedgerFamily::kSquare ? "square" : "triangle";
}

inline LedgerFamily parse_ledger_family(std::string_view s) {
  if (s == "square") return LedgerFamily::kSquare;
  if (s == "triangle") return LedgerFamily::kTriangle;
  throw ParseError("unknown ledger family '" + std::string(s) + "'");
}

inline LedgerFamily family_of(ContainerKind k) {
  return k == ContainerKind::kUnitTriangle ? LedgerFamily::kTriangle : LedgerFamily::kSquare;
}

enum class RuleKind { kAnchorSquare, kSqrtUpper, kMonotone, kStarLower, kStarUpper, kCertificate, kHypothesis };
enum class Side { kLower, kUpper };

inline std::string_view to_string(RuleKind r) {
  switch (r) {
    case RuleKind::kAnchorSquare: return "anchor_square";
    case RuleKind::kSqrtUpper: return "sqrt_upper";
    case RuleKind::kMonotone: return "monotone";
    case RuleKind::kStarLower: return "star_lower";
    case RuleKind::kStarUpper: return "star_upper";
    case RuleKind::kCertificate: return "certificate";
    case RuleKind::kHypothesis: return "hypothesis";
  }
  return "?";
}

inline RuleKind parse_rule_kind(std::string_view s) {
  for (auto r : {RuleKind::kAnchorSquare, RuleKind::kSqrtUpper, RuleKind::kMonotone, RuleKind::kStarLower,
                 RuleKind::kStarUpper, RuleKind::kCertificate, RuleKind::kHypothesis}) {
    if (to_string(r) == s) return r;
  }
  throw ParseError("unknown rule '" + std::string(s) + "'");
}

inline std::string_view to_string(Side s) { return s == Side::kLower ? "lower" : "upper"; }

/// One logged derivation step. Monotone and star rules have exactly one
/// premise slot; an empty slot stands for the trivial bound lower = 0.
struct RuleApplication {
  std::size_t id = 0;
  RuleKind rule = RuleKind::kAnchorSquare;
  Side side = Side::kLower;
  std::int64_t target = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t m = 0;
  std::optional<std::size_t> premise;
  Surd value;
  bool hypothetical = false;
  // Hypothesis parameters: lower form sets n + alpha, upper form sets n.
  std::int64_t hyp_n = 0;
  std::optional<Rational> alpha;
  // Certificate payload.
  std::string digest;
  std::optional<Packing> certificate;

  bool has_premise_slot() const {
    return rule == RuleKind::kMonotone || rule == RuleKind::kStarLower || rule == RuleKind::kStarUpper;
  }

  friend bool operator==(const RuleApplication&, const RuleApplication&) = default;
};

struct BoundEntry {
  std::int64_t n = 0;
  Rational lower;
  Surd upper;
  std::optional<std::size_t> lower_prov;
  std::optional<std::size_t> upper_prov;

  friend bool operator==(const BoundEntry&, const BoundEntry&) = default;
};

struct EpsilonView {
  std::int64_t k = 0;
  Rational eps_lower;
  Surd eps_upper;
};

struct HypothesisWitness {
  std::int64_t n = 0;
  Rational alpha;
};

/// Raised when a lower bound would exceed an upper bound.
class InconsistentLedger : public Error {
 public:
  using Error::Error;
};

/// Raised when a certificate fails exact verification.
class CertificateRejected : public Error {
 public:
  CertificateRejected(const std::string& what, VerificationReport report)
      : Error(what), report_(std::move(report)) {}
  const VerificationReport& report() const { return report_; }

 private:
  VerificationReport report_;
};

/// FNV-1a over the canonical JSON of a packing, as 16 hex digits.
inline std::string certificate_digest(const Packing& pk) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump_canonical(to_json(pk))) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Map n -> bounds on f(n) for 1 <= n <= N, plus the derivation log.
class Ledger {
 public:
  Ledger() = default;
  Ledger(LedgerFamily family, std::int64_t max_n) : family_(family), max_n_(max_n) {
    if (max_n < 1) throw InvalidArgument("ledger size must be at least 1");
    entries_.resize(static_cast<std::size_t>(max_n));
    lower_d_.assign(entries_.size(), 0.0);
    upper_d_.assign(entries_.size(), 0.0);
    upper_mag_.assign(entries_.size(), 0.0);
    for (std::int64_t n = 1; n <= max_n; ++n) {
      entries_[n - 1].n = n;
      set_upper(n, Surd::sqrt_of(n), std::nullopt);
    }
  }

  LedgerFamily family() const { return family_; }
  std::int64_t max_n() const { return max_n_; }
  const std::vector<BoundEntry>& entries() const { return entries_; }
  const std::vector<RuleApplication>& rules() const { return rules_; }

  bool in_range(std::int64_t n) const { return n >= 1 && n <= max_n_; }

  const BoundEntry& entry(std::int64_t n) const {
    if (!in_range(n)) throw InvalidArgument("n=" + std::to_string(n) + " outside ledger 1.." + std::to_string(max_n_));
    return entries_[n - 1];
  }
  const Rational& lower(std::int64_t n) const { return entry(n).lower; }
  const Surd& upper(std::int64_t n) const { return entry(n).upper; }

  bool has_hypotheses() const {
    return std::any_of(rules_.begin(), rules_.end(), [](const auto& r) { return r.hypothetical; });
  }

  double lower_approx(std::int64_t n) const { return lower_d_[n - 1]; }
  double upper_approx(std::int64_t n) const { return upper_d_[n - 1]; }
  double upper_magnitude(std::int64_t n) const { return upper_mag_[n - 1]; }

  /// Offers a bound. Adopted iff it strictly tightens the entry; the
  /// application is logged only when adopted. Throws InconsistentLedger
  /// without modifying anything if lower would exceed upper.
  bool propose(RuleApplication r) {
    const BoundEntry& e = entry(r.target);
    if (r.premise) {
      if (*r.premise >= rules_.size()) throw InvalidArgument("premise refers to an unknown rule");
      r.hypothetical = r.hypothetical || rules_[*r.premise].hypothetical;
    }
    if (r.side == Side::kLower) {
      if (!r.value.is_rational()) throw InvalidArgument("lower bounds must be rational");
      if (!(r.value.rat() > e.lower)) return false;
      if (r.value > e.upper) {
        throw InconsistentLedger(conflict_message(r, e.upper_prov, "upper " + e.upper.str()));
      }
      const Rational v = r.value.rat();
      set_lower(r.target, v, log(std::move(r)));
    } else {
      if (!(r.value < e.upper)) return false;
      if (r.value < Surd(e.lower)) {
        throw InconsistentLedger(conflict_message(r, e.lower_prov, "lower " + e.lower.str()));
      }
      const std::int64_t n = r.target;
      Surd v = r.value;
      set_upper(n, std::move(v), log(std::move(r)));
    }
    return true;
  }

  /// Logs a seed record that is not compared against current bounds.
  std::size_t seed(RuleApplication r) {
    const std::int64_t n = r.target;
    const Side side = r.side;
    Surd v = r.value;
    const std::size_t id = log(std::move(r));
    if (side == Side::kLower) {
      set_lower(n, v.rat(), id);
    } else {
      set_upper(n, std::move(v), id);
    }
    return id;
  }

  /// Deserialization hooks. They bypass all checks; run audit() afterwards.
  void restore_rule(RuleApplication r) {
    if (r.id != rules_.size()) throw ParseError("rule ids must be 0, 1, 2, ... in order");
    rules_.push_back(std::move(r));
  }
  void restore_entry(BoundEntry e) {
    if (!in_range(e.n)) throw ParseError("entry n=" + std::to_string(e.n) + " outside ledger");
    const std::int64_t n = e.n;
    set_lower(n, e.lower, e.lower_prov);
    set_upper(n, e.upper, e.upper_prov);
  }

  /// "#id rule(params) => side(n) {>=,<=} value", tagged when hypothetical.
  std::string describe(const RuleApplication& r) const {
    std::string s = (r.id < rules_.size() && rules_[r.id] == r) ? "#" + std::to_string(r.id) + " " : "candidate ";
    s += std::string(to_string(r.rule));
    switch (r.rule) {
      case RuleKind::kStarLower:
      case RuleKind::kStarUpper:
        s += "(a=" + std::to_string(r.a) + ",b=" + std::to_string(r.b) + ",m=" + std::to_string(r.m) + ")";
        break;
      case RuleKind::kHypothesis:
        s += "(n=" + std::to_string(r.hyp_n) + (r.alpha ? ",alpha=" + r.alpha->str() : "") + ")";
        break;
      case RuleKind::kCertificate:
        s += "(" + r.digest + ")";
        break;
      default:
        break;
    }
    s += " => " + std::string(to_string(r.side)) + "(" + std::to_string(r.target) + ") " +
         (r.side == Side::kLower ? ">= " : "<= ") + r.value.str();
    if (r.hypothetical) s += " [hypothesis]";
    return s;
  }

  /// Derivation chain of a rule, newest first, following premises.
  std::vector<std::string> chain(const RuleApplication& r, std::size_t limit = 64) const {
    std::vector<std::string> out{describe(r)};
    auto next = r.premise;
    while (next && out.size() < limit) {
      const auto& p = rules_[*next];
      out.push_back(describe(p));
      next = p.premise;
    }
    return out;
  }

 private:
  std::size_t log(RuleApplication r) {
    r.id = rules_.size();
    rules_.push_back(std::move(r));
    return rules_.size() - 1;
  }

  void set_lower(std::int64_t n, Rational v, std::optional<std::size_t> prov) {
    auto& e = entries_[n - 1];
    lower_d_[n - 1] = v.to_double();
    e.lower = std::move(v);
    e.lower_prov = prov;
  }

  void set_upper(std::int64_t n, Surd v, std::optional<std::size_t> prov) {
    auto& e = entries_[n - 1];
    upper_d_[n - 1] = v.to_double();
    upper_mag_[n - 1] = std::abs(v.rat().to_double()) +
                        std::abs(v.coef().to_double()) * std::sqrt(static_cast<double>(v.radicand()));
    e.upper = std::move(v);
    e.upper_prov = prov;
  }

  std::string conflict_message(const RuleApplication& r, std::optional<std::size_t> other,
                               const std::string& other_value) const {
    std::string msg = "inconsistent ledger at n=" + std::to_string(r.target) + ": " +
                      std::string(to_string(r.side)) + " " + r.value.str() + " contradicts " + other_value;
    msg += "\n  derivation:";
    for (const auto& line : chain(r)) msg += "\n    " + line;
    msg += "\n  conflicting bound:";
    if (other) {
      for (const auto& line : chain(rules_[*other])) msg += "\n    " + line;
    } else {
      msg += "\n    trivial bound";
    }
    return msg;
  }

  LedgerFamily family_ = LedgerFamily::kSquare;
  std::int64_t max_n_ = 0;
  std::vector<BoundEntry> entries_;
  std::vector<RuleApplication> rules_;
  std::vector<double> lower_d_;
  std::vector<double> upper_d_;
  std::vector<double> upper_mag_;
};

/// Fresh ledger: f(k^2) = k pinned, sqrt(n) uppers, zero lowers elsewhere.
inline Ledger seed_anchors(std::int64_t max_n, LedgerFamily family = LedgerFamily::kSquare) {
  Ledger ledger(family, max_n);
  for (std::int64_t n = 1; n <= max_n; ++n) {
    if (const auto k = exact_isqrt(n); k >= 0) {
      for (auto side : {Side::kLower, Side::kUpper}) {
        RuleApplication r;
        r.rule = RuleKind::kAnchorSquare;
        r.side = side;
        r.target = n;
        r.value = Rational(k);
        ledger.seed(std::move(r));
      }
    } else {
      RuleApplication r;
      r.rule = RuleKind::kSqrtUpper;
      r.side = Side::kUpper;
      r.target = n;
      r.value = Surd::sqrt_of(n);
      ledger.seed(std::move(r));
    }
  }
  return ledger;
}

namespace detail {

inline void check_star(const Ledger& ledger, std::int64_t a, std::int64_t b, std::int64_t m) {
  if (a < 1 || a > b) throw InvalidArgument("star rule needs 1 <= a <= b");
  if (m < 1) throw InvalidArgument("star rule needs m >= 1");
  if (b > 3037000499LL || b * b - a * a > ledger.max_n() - m) {
    throw InvalidArgument("star rule target b^2 - a^2 + m exceeds N=" + std::to_string(ledger.max_n()));
  }
}

inline RuleApplication star_lower_candidate(const Ledger& ledger, std::int64_t a, std::int64_t b, std::int64_t m) {
  const std::int64_t d = b * b - a * a;
  const auto& src = ledger.entry(m);
  RuleApplication r;
  r.rule = RuleKind::kStarLower;
  r.side = Side::kLower;
  r.target = d + m;
  r.a = a;
  r.b = b;
  r.m = m;
  r.premise = src.lower_prov;
  r.value = (Rational(d) + Rational(a) * src.lower) / Rational(b);
  return r;
}

inline RuleApplication star_upper_candidate(const Ledger& ledger, std::int64_t a, std::int64_t b, std::int64_t m) {
  const std::int64_t d = b * b - a * a;
  const auto& src = ledger.entry(d + m);
  RuleApplication r;
  r.rule = RuleKind::kStarUpper;
  r.side = Side::kUpper;
  r.target = m;
  r.a = a;
  r.b = b;
  r.m = m;
  r.premise = src.upper_prov;
  r.value = (src.upper * Rational(b) - Rational(d)) / Rational(a);
  return r;
}

inline RuleApplication monotone_candidate(const Ledger& ledger, std::int64_t n) {
  const auto& src = ledger.entry(n);
  RuleApplication r;
  r.rule = RuleKind::kMonotone;
  r.side = Side::kLower;
  r.target = n + 1;
  r.premise = src.lower_prov;
  r.value = src.lower;
  return r;
}

}  // namespace detail

/// lower(b^2 - a^2 + m) >= (b^2 - a^2 + a lower(m)) / b. Returns adoption.
inline bool apply_star_lower(Ledger& ledger, std::int64_t a, std::int64_t b, std::int64_t m) {
  detail::check_star(ledger, a, b, m);
  return ledger.propose(detail::star_lower_candidate(ledger, a, b, m));
}

/// upper(m) <= (a^2 - b^2 + b upper(b^2 - a^2 + m)) / a. Returns adoption.
inline bool apply_star_upper(Ledger& ledger, std::int64_t a, std::int64_t b, std::int64_t m) {
  detail::check_star(ledger, a, b, m);
  return ledger.propose(detail::star_upper_candidate(ledger, a, b, m));
}

/// One ascending pass of lower(n+1) >= lower(n). Returns adoptions.
inline std::size_t apply_monotone(Ledger& ledger) {
  std::size_t adopted = 0;
  for (std::int64_t n = 1; n < ledger.max_n(); ++n) {
    adopted += ledger.propose(detail::monotone_candidate(ledger, n));
  }
  return adopted;
}

/// Raises lower(count) to the exact side sum of a verified packing.
inline bool ingest_certificate(Ledger& ledger, const Packing& pk) {
  if (family_of(pk.container.kind) != ledger.family()) {
    throw InvalidArgument("certificate container family does not match the ledger");
  }
  auto report = verify_packing(pk);
  if (!report.valid) {
    throw CertificateRejected("certificate rejected: " + std::to_string(report.violations.size()) + " violation(s)",
                              std::move(report));
  }
  const auto count = static_cast<std::int64_t>(pk.size());
  if (!ledger.in_range(count)) {
    throw InvalidArgument("certificate with " + std::to_string(count) + " placements lies outside the ledger");
  }
  RuleApplication r;
  r.rule = RuleKind::kCertificate;
  r.side = Side::kLower;
  r.target = count;
  r.value = report.side_sum;
  r.digest = certificate_digest(pk);
  r.certificate = pk;
  return ledger.propose(std::move(r));
}

struct PropagateOptions {
  Rational delta{1, 1000000000};
  /// Zero selects the default of 10 N.
  std::int64_t max_rounds = 0;
  bool monotone = true;
  /// When set, each round applies every rule instance in a shuffled order
  /// with exact arithmetic only. Intended for small N.
  std::optional<std::uint64_t> shuffle_seed;
};

struct PropagateResult {
  std::int64_t rounds = 0;
  bool converged = false;
  std::size_t adoptions = 0;
};

namespace detail {

struct RoundStats {
  double best_improvement = 0.0;
  std::size_t adoptions = 0;
};

inline std::int64_t window(const Ledger& ledger) {
  return static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(ledger.max_n())) - 1e-9));
}

inline void note(RoundStats& stats, double improvement) {
  stats.best_improvement = std::max(stats.best_improvement, improvement);
  ++stats.adoptions;
}

/// Ascending lower pass. Candidates are screened in double precision with a
/// safety margin; only those that might match or beat the current bound are
/// evaluated exactly, so the pass is exact.
inline void lower_pass(Ledger& ledger, bool monotone, RoundStats& stats) {
  const std::int64_t big_n = ledger.max_n();
  const std::int64_t w = window(ledger);
  const auto tol_of = [](double value, double d, std::int64_t b) {
    return 1e-12 * (1.0 + std::abs(value) + d / static_cast<double>(b));
  };
  for (std::int64_t t = 2; t <= big_n; ++t) {
    const double cur = ledger.lower_approx(t);
    double best = -std::numeric_limits<double>::infinity();
    double tol = 1e-12 * (1.0 + std::abs(cur));
    if (monotone) best = ledger.lower_approx(t - 1);
    for (std::int64_t a = 1; a <= w; ++a) {
      for (std::int64_t b = a + 1; b <= w; ++b) {
        const std::int64_t d = b * b - a * a;
        if (d >= t) break;
        const double c = (static_cast<double>(d) + static_cast<double>(a) * ledger.lower_approx(t - d)) /
                         static_cast<double>(b);
        best = std::max(best, c);
        tol = std::max(tol, tol_of(c, static_cast<double>(d), b));
      }
    }
    const double floor_value = std::max(cur, best) - 2 * tol;
    if (best < floor_value) continue;

    std::optional<RuleApplication> winner;
    auto consider = [&](RuleApplication r) {
      if (!winner || r.value.rat() > winner->value.rat()) winner = std::move(r);
    };
    if (monotone && ledger.lower_approx(t - 1) >= floor_value) consider(monotone_candidate(ledger, t - 1));
    for (std::int64_t a = 1; a <= w; ++a) {
      for (std::int64_t b = a + 1; b <= w; ++b) {
        const std::int64_t d = b * b - a * a;
        if (d >= t) break;
        const double c = (static_cast<double>(d) + static_cast<double>(a) * ledger.lower_approx(t - d)) /
                         static_cast<double>(b);
        if (c >= floor_value) consider(star_lower_candidate(ledger, a, b, t - d));
      }
    }
    if (winner) {
      const double before = ledger.lower_approx(t);
      if (ledger.propose(std::move(*winner))) note(stats, ledger.lower_approx(t) - before);
    }
  }
}

/// Descending upper pass, screened like lower_pass.
inline void upper_pass(Ledger& ledger, RoundStats& stats) {
  const std::int64_t big_n = ledger.max_n();
  const std::int64_t w = window(ledger);
  for (std::int64_t m = big_n - 1; m >= 1; --m) {
    const double cur = ledger.upper_approx(m);
    double best = std::numeric_limits<double>::infinity();
    double tol = 1e-12 * (1.0 + ledger.upper_magnitude(m));
    for (std::int64_t a = 1; a <= w; ++a) {
      for (std::int64_t b = a + 1; b <= w; ++b) {
        const std::int64_t d = b * b - a * a;
        if (m + d > big_n) break;
        const double bd = static_cast<double>(b);
        const double c = (bd * ledger.upper_approx(m + d) - static_cast<double>(d)) / static_cast<double>(a);
        best = std::min(best, c);
        tol = std::max(tol, 1e-12 * (1.0 + (bd * ledger.upper_magnitude(m + d) + static_cast<double>(d)) /
                                               static_cast<double>(a)));
      }
    }
    const double ceiling = std::min(cur, best) + 2 * tol;
    if (best > ceiling) continue;

    std::optional<RuleApplication> winner;
    for (std::int64_t a = 1; a <= w; ++a) {
      for (std::int64_t b = a + 1; b <= w; ++b) {
        const std::int64_t d = b * b - a * a;
        if (m + d > big_n) break;
        const double c =
            (static_cast<double>(b) * ledger.upper_approx(m + d) - static_cast<double>(d)) / static_cast<double>(a);
        if (c > ceiling) continue;
        auto r = star_upper_candidate(ledger, a, b, m);
        if (!winner || r.value < winner->value) winner = std::move(r);
      }
    }
    if (winner) {
      const double before = ledger.upper_approx(m);
      if (ledger.propose(std::move(*winner))) note(stats, before - ledger.upper_approx(m));
    }
  }
}

/// Every rule instance once, in a shuffled order, exactly.
inline void shuffled_round(Ledger& ledger, bool monotone, std::mt19937_64& rng, RoundStats& stats) {
  struct Instance {
    RuleKind rule;
    std::int64_t a, b, m;
  };
  std::vector<Instance> all;
  const std::int64_t big_n = ledger.max_n();
  const std::int64_t w = window(ledger);
  if (monotone) {
    for (std::int64_t n = 1; n < big_n; ++n) all.push_back({RuleKind::kMonotone, 0, 0, n});
  }
  for (std::int64_t a = 1; a <= w; ++a) {
    for (std::int64_t b = a + 1; b <= w; ++b) {
      const std::int64_t d = b * b - a * a;
      for (std::int64_t m = 1; m + d <= big_n; ++m) {
        all.push_back({RuleKind::kStarLower, a, b, m});
        all.push_back({RuleKind::kStarUpper, a, b, m});
      }
    }
  }
  std::shuffle(all.begin(), all.end(), rng);
  for (const auto& inst : all) {
    if (inst.rule == RuleKind::kStarUpper) {
      const double before = ledger.upper_approx(inst.m);
      if (ledger.propose(star_upper_candidate(ledger, inst.a, inst.b, inst.m))) {
        note(stats, before - ledger.upper_approx(inst.m));
      }
      continue;
    }
    auto r = inst.rule == RuleKind::kMonotone ? monotone_candidate(ledger, inst.m)
                                              : star_lower_candidate(ledger, inst.a, inst.b, inst.m);
    const std::int64_t t = r.target;
    const double before = ledger.lower_approx(t);
    if (ledger.propose(std::move(r))) note(stats, ledger.lower_approx(t) - before);
  }
}

}  // namespace detail

/// Closure under both star directions (a < b <= ceil(sqrt N)) and, when
/// enabled, monotonicity. Stops once a round's best improvement is below
/// delta or after max_rounds rounds.
inline PropagateResult propagate(Ledger& ledger, const PropagateOptions& opts = {}) {
  if (opts.delta.sign() <= 0) throw InvalidArgument("delta must be positive");
  if (opts.max_rounds < 0) throw InvalidArgument("max_rounds must be non-negative");
  const std::int64_t max_rounds = opts.max_rounds == 0 ? 10 * ledger.max_n() : opts.max_rounds;
  const double delta = opts.delta.to_double();
  std::mt19937_64 rng(opts.shuffle_seed.value_or(0));
  PropagateResult result;
  while (result.rounds < max_rounds) {
    ++result.rounds;
    detail::RoundStats stats;
    if (opts.shuffle_seed) {
      detail::shuffled_round(ledger, opts.monotone, rng, stats);
    } else {
      detail::lower_pass(ledger, opts.monotone, stats);
      detail::upper_pass(ledger, stats);
    }
    result.adoptions += stats.adoptions;
    if (stats.best_improvement < delta) {
      result.converged = true;
      break;
    }
  }
  return result;
}

inline EpsilonView epsilon_view(const Ledger& ledger, std::int64_t k) {
  if (k < 1 || k > 3037000499LL || !ledger.in_range(k * k + 1)) {
    throw InvalidArgument("epsilon view needs k >= 1 and k^2 + 1 <= N");
  }
  const auto& e = ledger.entry(k * k + 1);
  return {k, e.lower - Rational(k), e.upper - Rational(k)};
}

/// Assumes f(n^2+1) = n + alpha and derives lower(b^2+1) >= b + n alpha / b
/// for every b >= n inside the ledger. All-or-nothing: on error the ledger
/// is left untouched.
inline void hypothesize_epsilon(Ledger& ledger, const HypothesisWitness& w) {
  if (w.n < 1 || w.n > 3037000499LL || !ledger.in_range(w.n * w.n + 1)) {
    throw InvalidArgument("hypothesis needs n >= 1 and n^2 + 1 <= N");
  }
  if (w.alpha.sign() <= 0) throw InvalidArgument("hypothesis needs alpha > 0");
  Ledger work = ledger;
  const std::int64_t m = w.n * w.n + 1;
  RuleApplication h;
  h.rule = RuleKind::kHypothesis;
  h.side = Side::kLower;
  h.target = m;
  h.hyp_n = w.n;
  h.alpha = w.alpha;
  h.value = Rational(w.n) + w.alpha;
  h.hypothetical = true;
  work.propose(std::move(h));
  const bool pinned = work.lower(m) == Rational(w.n) + w.alpha;
  for (std::int64_t b = w.n + 1; work.in_range(b * b + 1); ++b) {
    const auto cand = detail::star_lower_candidate(work, w.n, b, m);
    const Rational expected = Rational(b) + Rational(w.n) * w.alpha / Rational(b);
    if (pinned ? cand.value.rat() != expected : cand.value.rat() < expected) {
      throw Error("internal error: star_lower disagrees with the hypothesis formula at b=" + std::to_string(b));
    }
    work.propose(cand);
  }
  ledger = std::move(work);
}

/// Assumes f(n^2+1) = n, i.e. upper(n^2+1) <= n, and derives
/// upper(k^2+1) <= k for all k < n. All-or-nothing like hypothesize_epsilon.
inline void zero_propagation(Ledger& ledger, std::int64_t n) {
  if (n < 1 || n > 3037000499LL || !ledger.in_range(n * n + 1)) {
    throw InvalidArgument("zero propagation needs n >= 1 and n^2 + 1 <= N");
  }
  Ledger work = ledger;
  RuleApplication h;
  h.rule = RuleKind::kHypothesis;
  h.side = Side::kUpper;
  h.target = n * n + 1;
  h.hyp_n = n;
  h.value = Rational(n);
  h.hypothetical = true;
  work.propose(std::move(h));
  for (std::int64_t k = 1; k < n; ++k) apply_star_upper(work, k, n, k * k + 1);
  ledger = std::move(work);
}

struct SeriesRow {
  std::int64_t k = 0;
  Rational eps_lower;
  Surd eps_upper;
  Rational partial_sum;
};

struct SeriesReport {
  std::vector<SeriesRow> rows;
  bool any_positive = false;
  /// First k with eps_lower(k) > 0; then eps(b) >= constant / b for b >= k.
  std::optional<std::int64_t> floor_from;
  std::optional<Rational> floor_constant;
};

inline SeriesReport epsilon_partial_sums(const Ledger& ledger, std::int64_t max_k) {
  if (max_k < 1) throw InvalidArgument("series needs K >= 1");
  SeriesReport report;
  Rational sum;
  for (std::int64_t k = 1; k <= max_k; ++k) {
    const auto view = epsilon_view(ledger, k);
    sum += view.eps_lower;
    if (view.eps_lower.sign() > 0 && !report.any_positive) {
      report.any_positive = true;
      report.floor_from = k;
      report.floor_constant = Rational(k) * view.eps_lower;
    }
    report.rows.push_back({k, view.eps_lower, view.eps_upper, sum});
  }
  return report;
}

struct AuditReport {
  bool ok = true;
  std::size_t rules_checked = 0;
  std::vector<std::string> problems;
};

/// Re-derives every logged bound from its premises and checks that every
/// entry equals the value of its provenance.
inline AuditReport audit(const Ledger& ledger) {
  AuditReport report;
  const auto& rules = ledger.rules();
  auto fail = [&](const RuleApplication& r, const std::string& why) {
    report.ok = false;
    report.problems.push_back("#" + std::to_string(r.id) + " " + std::string(to_string(r.rule)) + ": " + why);
  };
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    ++report.rules_checked;
    if (r.id != i) fail(r, "id out of sequence");
    if (!ledger.in_range(r.target)) {
      fail(r, "target outside ledger");
      continue;
    }
    const RuleApplication* prem = nullptr;
    if (r.premise) {
      if (*r.premise >= i) {
        fail(r, "premise does not precede the rule");
        continue;
      }
      prem = &rules[*r.premise];
    } else if (r.has_premise_slot() && r.side == Side::kUpper) {
      fail(r, "upper derivation without premise");
      continue;
    }
    const Rational premise_lower = prem ? prem->value.rat() : Rational(0);
    auto expect_premise = [&](Side side, std::int64_t n) {
      if (prem && (prem->side != side || prem->target != n)) fail(r, "premise bounds the wrong entry");
    };
    switch (r.rule) {
      case RuleKind::kAnchorSquare: {
        const auto k = exact_isqrt(r.target);
        if (k < 0 || r.value != Surd(Rational(k))) fail(r, "not an anchor value");
        break;
      }
      case RuleKind::kSqrtUpper:
        if (r.side != Side::kUpper || r.value != Surd::sqrt_of(r.target)) fail(r, "not sqrt(n)");
        break;
      case RuleKind::kMonotone:
        expect_premise(Side::kLower, r.target - 1);
        if (r.side != Side::kLower || r.value != Surd(premise_lower)) fail(r, "value differs from premise");
        break;
      case RuleKind::kStarLower:
      case RuleKind::kStarUpper: {
        const std::int64_t d = r.b * r.b - r.a * r.a;
        if (r.a < 1 || r.a > r.b || r.m < 1) {
          fail(r, "parameters violate 1 <= a <= b, m >= 1");
          break;
        }
        if (r.rule == RuleKind::kStarLower) {
          expect_premise(Side::kLower, r.m);
          const Rational v = (Rational(d) + Rational(r.a) * premise_lower) / Rational(r.b);
          if (r.side != Side::kLower || r.target != d + r.m || r.value != Surd(v)) fail(r, "replay mismatch");
        } else {
          expect_premise(Side::kUpper, d + r.m);
          const Surd v = (prem->value * Rational(r.b) - Rational(d)) / Rational(r.a);
          if (r.side != Side::kUpper || r.target != r.m || r.value != v) fail(r, "replay mismatch");
        }
        break;
      }
      case RuleKind::kCertificate: {
        if (!r.certificate) {
          fail(r, "certificate payload missing");
          break;
        }
        const auto check = verify_packing(*r.certificate);
        if (!check.valid || r.value != Surd(check.side_sum) ||
            static_cast<std::int64_t>(r.certificate->size()) != r.target ||
            certificate_digest(*r.certificate) != r.digest) {
          fail(r, "certificate does not reproduce");
        }
        break;
      }
      case RuleKind::kHypothesis: {
        const bool lower_form = r.side == Side::kLower && r.alpha &&
                                r.value == Surd(Rational(r.hyp_n) + *r.alpha);
        const bool upper_form = r.side == Side::kUpper && !r.alpha && r.value == Surd(Rational(r.hyp_n));
        if (!r.hypothetical || r.target != r.hyp_n * r.hyp_n + 1 || !(lower_form || upper_form)) {
          fail(r, "malformed hypothesis");
        }
        break;
      }
    }
    if (r.has_premise_slot() && (prem && prem->hypothetical) && !r.hypothetical) {
      fail(r, "derived from a hypothesis but not tagged");
    }
  }
  for (const auto& e : ledger.entries()) {
    const std::string where = "entry " + std::to_string(e.n) + ": ";
    const Rational lower = e.lower_prov ? rules[*e.lower_prov].value.rat() : Rational(0);
    if (e.lower_prov && (rules[*e.lower_prov].side != Side::kLower || rules[*e.lower_prov].target != e.n)) {
      report.ok = false;
      report.problems.push_back(where + "lower provenance bounds another entry");
    }
    if (lower != e.lower) {
      report.ok = false;
      report.problems.push_back(where + "lower differs from its provenance");
    }
    if (!e.upper_prov || rules[*e.upper_prov].side != Side::kUpper || rules[*e.upper_prov].target != e.n ||
        rules[*e.upper_prov].value != e.upper) {
      report.ok = false;
      report.problems.push_back(where + "upper differs from its provenance");
    }
    if (Surd(e.lower) > e.upper) {
      report.ok = false;
      report.problems.push_back(where + "lower exceeds upper");
    }
  }
  return report;
}

}  // namespace sidesum
