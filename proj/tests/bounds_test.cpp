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

#include "sidesum/bounds.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sidesum/constructions.hpp"
#include "sidesum/ledger_json.hpp"

namespace sidesum {
namespace {

Ledger propagated(std::int64_t max_n, PropagateOptions opts = {}) {
  Ledger ledger = seed_anchors(max_n);
  propagate(ledger, opts);
  return ledger;
}

TEST(SurdTest, NormalizesPerfectSquares) {
  EXPECT_EQ(Surd::sqrt_of(9), Surd(Rational(3)));
  EXPECT_TRUE(Surd::sqrt_of(9).is_rational());
  EXPECT_EQ(Surd(Rational(1), Rational(0), 7).radicand(), 0);
  EXPECT_TRUE(Surd::sqrt_of(5).is_pure_sqrt());
}

TEST(SurdTest, ExactComparisons) {
  // 27/5 = 5.4 exceeds sqrt(26) ~ 5.099.
  EXPECT_GT(Surd(Rational(27, 5)), Surd::sqrt_of(26));
  // 2 sqrt(5) - 3 ~ 1.472 exceeds sqrt(2) ~ 1.414.
  EXPECT_GT(Surd(Rational(-3), Rational(2), 5), Surd::sqrt_of(2));
  EXPECT_LT(Surd(Rational(3)), Surd::sqrt_of(10));
  EXPECT_EQ(Surd(Rational(3)) <=> Surd::sqrt_of(9), std::strong_ordering::equal);
  EXPECT_EQ(Surd(Rational(-1), Rational(1), 2).sign(), 1);
  EXPECT_EQ(Surd(Rational(-2), Rational(1), 3).sign(), -1);
}

TEST(SurdTest, OrderingAgreesWithLongDouble) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(-40, 40), den(1, 9), rad(0, 30);
  for (int trial = 0; trial < 3000; ++trial) {
    const Surd x(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)), rad(rng));
    const Surd y(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)), rad(rng));
    auto approx = [](const Surd& s) {
      return static_cast<long double>(s.rat().to_double()) +
             static_cast<long double>(s.coef().to_double()) * std::sqrt(static_cast<long double>(s.radicand()));
    };
    const long double diff = approx(x) - approx(y);
    if (std::fabs(diff) < 1e-9L) continue;
    EXPECT_EQ(x < y, diff < 0) << x.str() << " vs " << y.str();
  }
}

TEST(SeedAnchorsTest, Examples) {
  const Ledger ten = seed_anchors(10);
  EXPECT_EQ(ten.lower(9), Rational(3));
  EXPECT_EQ(ten.upper(9), Surd(Rational(3)));
  EXPECT_EQ(ten.upper(5), Surd::sqrt_of(5));
  EXPECT_EQ(ten.lower(5), Rational(0));
  const Ledger one = seed_anchors(1);
  EXPECT_EQ(one.lower(1), Rational(1));
  EXPECT_EQ(one.upper(1), Surd(Rational(1)));
  EXPECT_THROW(seed_anchors(0), InvalidArgument);
  EXPECT_TRUE(audit(ten).ok);
}

TEST(StarLowerTest, Examples) {
  Ledger ledger = seed_anchors(101);
  ASSERT_TRUE(ingest_certificate(ledger, base_packing(2, Container::unit_square())));
  ASSERT_EQ(ledger.lower(2), Rational(1));
  for (std::int64_t k = 2; k <= 10; ++k) {
    EXPECT_TRUE(apply_star_lower(ledger, 1, k, 2));
    EXPECT_EQ(ledger.lower(k * k + 1), Rational(k));
  }
  const auto rules = ledger.rules().size();
  EXPECT_FALSE(apply_star_lower(ledger, 4, 4, 17));
  EXPECT_FALSE(apply_star_lower(ledger, 3, 4, 2));  // 5/2 < anchor 3
  EXPECT_EQ(ledger.lower(9), Rational(3));
  EXPECT_EQ(ledger.rules().size(), rules);
}

TEST(StarLowerTest, Preconditions) {
  Ledger ledger = seed_anchors(20);
  EXPECT_THROW(apply_star_lower(ledger, 0, 2, 1), InvalidArgument);
  EXPECT_THROW(apply_star_lower(ledger, 3, 2, 1), InvalidArgument);
  EXPECT_THROW(apply_star_lower(ledger, 1, 2, 0), InvalidArgument);
  EXPECT_THROW(apply_star_lower(ledger, 1, 5, 1), InvalidArgument);
}

TEST(StarUpperTest, Examples) {
  Ledger ledger = seed_anchors(30);
  EXPECT_FALSE(apply_star_upper(ledger, 1, 2, 2));  // 2 sqrt(5) - 3 > sqrt(2)
  EXPECT_EQ(ledger.upper(2), Surd::sqrt_of(2));
  EXPECT_FALSE(apply_star_upper(ledger, 2, 3, 1));
  EXPECT_THROW(apply_star_upper(ledger, 1, 6, 1), InvalidArgument);
}

TEST(MonotoneTest, Examples) {
  Ledger ledger = seed_anchors(10);
  EXPECT_GT(apply_monotone(ledger), 0u);
  EXPECT_EQ(ledger.lower(5), Rational(2));
  EXPECT_EQ(ledger.lower(10), Rational(3));
  Ledger zeros(LedgerFamily::kSquare, 10);
  EXPECT_EQ(apply_monotone(zeros), 0u);
  for (std::int64_t n = 1; n <= 10; ++n) EXPECT_EQ(zeros.lower(n), Rational(0));
}

TEST(IngestCertificateTest, Examples) {
  Ledger ledger = seed_anchors(20);
  EXPECT_FALSE(ingest_certificate(ledger, grid_packing(3, Container::unit_square())));
  EXPECT_EQ(ledger.lower(9), Rational(3));
  const auto seven = split_refine(grid_packing(2, Container::unit_square()), 3);
  EXPECT_TRUE(ingest_certificate(ledger, seven));
  EXPECT_EQ(ledger.lower(7), Rational(5, 2));
  const Packing bad{Container::unit_square(),
                    {Placement::square(0, 0, Rational(3, 4)), Placement::square(Rational(1, 2), Rational(1, 2), Rational(1, 2))},
                    ""};
  try {
    ingest_certificate(ledger, bad);
    FAIL() << "invalid packing accepted";
  } catch (const CertificateRejected& e) {
    EXPECT_EQ(e.report().violations.size(), 1u);
  }
  EXPECT_THROW(ingest_certificate(ledger, grid_packing(2, Container::unit_triangle())), InvalidArgument);
  EXPECT_TRUE(audit(ledger).ok);
}

TEST(IngestCertificateTest, NeverLowersAndIdempotent) {
  Ledger ledger = propagated(40);
  const auto before = ledger.entries();
  const auto cert = substitute(base_packing(2, Container::unit_square()), {1, 3});
  ingest_certificate(ledger, cert);
  const auto once = ledger.entries();
  const auto rules = ledger.rules().size();
  EXPECT_FALSE(ingest_certificate(ledger, cert));
  EXPECT_EQ(ledger.entries(), once);
  EXPECT_EQ(ledger.rules().size(), rules);
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_GE(once[i].lower, before[i].lower);
}

TEST(PropagateTest, AnchorsOnly) {
  Ledger ledger = seed_anchors(101);
  const auto result = propagate(ledger);
  EXPECT_TRUE(result.converged);
  for (std::int64_t k = 1; k <= 10; ++k) {
    EXPECT_EQ(ledger.lower(k * k + 1), Rational(k)) << k;
    EXPECT_GE(epsilon_view(ledger, k).eps_upper.sign(), 0) << k;
    EXPECT_EQ(ledger.lower(k * k), Rational(k));
    EXPECT_EQ(ledger.upper(k * k), Surd(Rational(k)));
  }
  EXPECT_EQ(ledger.lower(10), Rational(3));
  EXPECT_EQ(ledger.upper(10), Surd::sqrt_of(10));
  EXPECT_TRUE(audit(ledger).ok);
}

TEST(PropagateTest, SingleEntryConvergesInOneRound) {
  Ledger ledger = seed_anchors(1);
  const auto result = propagate(ledger);
  EXPECT_TRUE(result.converged);
  EXPECT_EQ(result.rounds, 1);
}

TEST(PropagateTest, RejectsBadOptions) {
  Ledger ledger = seed_anchors(5);
  EXPECT_THROW(propagate(ledger, {Rational(0)}), InvalidArgument);
}

TEST(PropagateTest, LowerNeverExceedsUpper) {
  const Ledger ledger = propagated(150);
  for (const auto& e : ledger.entries()) {
    EXPECT_LE(Surd(e.lower), e.upper) << e.n;
    EXPECT_LE(e.upper, Surd::sqrt_of(e.n)) << e.n;
    EXPECT_GE(e.lower.sign(), 0);
  }
}

TEST(PropagateTest, OrderInvariance) {
  for (const std::int64_t n : {37, 90, 150}) {
    for (const bool monotone : {true, false}) {
      PropagateOptions ordered;
      ordered.monotone = monotone;
      const Ledger reference = propagated(n, ordered);
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        PropagateOptions shuffled = ordered;
        shuffled.shuffle_seed = seed;
        const Ledger other = propagated(n, shuffled);
        for (std::int64_t i = 1; i <= n; ++i) {
          ASSERT_EQ(other.lower(i), reference.lower(i)) << n << " " << i << " seed " << seed;
          ASSERT_EQ(other.upper(i), reference.upper(i)) << n << " " << i << " seed " << seed;
        }
        EXPECT_TRUE(audit(other).ok);
      }
    }
  }
}

TEST(PropagateTest, MonotoneSwitchDoesNotChangeSquarePlusOne) {
  PropagateOptions off;
  off.monotone = false;
  Ledger ledger = seed_anchors(101);
  ingest_certificate(ledger, base_packing(2, Container::unit_square()));
  propagate(ledger, off);
  for (std::int64_t k = 1; k <= 10; ++k) EXPECT_EQ(ledger.lower(k * k + 1), Rational(k));
}

TEST(PropagateTest, DeterministicProvenanceOnTies) {
  const Ledger a = propagated(60);
  const Ledger b = propagated(60);
  EXPECT_EQ(dump_canonical(to_json(a)), dump_canonical(to_json(b)));
  // lower(10) = 3 is reached by monotone and star_lower(1,3,2); monotone wins.
  EXPECT_EQ(a.rules()[*a.entry(10).lower_prov].rule, RuleKind::kMonotone);
}

TEST(EpsilonViewTest, Examples) {
  Ledger ledger = propagated(50);
  EXPECT_EQ(epsilon_view(ledger, 3).eps_lower, Rational(0));
  EXPECT_EQ(epsilon_view(ledger, 1).eps_upper, Surd(Rational(-1), Rational(1), 2));
  zero_propagation(ledger, 3);
  EXPECT_EQ(epsilon_view(ledger, 3).eps_upper, Surd(Rational(0)));
  EXPECT_THROW(epsilon_view(ledger, 8), InvalidArgument);
  EXPECT_THROW(epsilon_view(ledger, 0), InvalidArgument);
}

TEST(HypothesizeEpsilonTest, Examples) {
  Ledger ledger = propagated(50);
  hypothesize_epsilon(ledger, {3, Rational(1, 10)});
  EXPECT_EQ(epsilon_view(ledger, 6).eps_lower, Rational(1, 20));
  EXPECT_EQ(epsilon_view(ledger, 3).eps_lower, Rational(1, 10));
  EXPECT_TRUE(ledger.has_hypotheses());
  EXPECT_TRUE(audit(ledger).ok);
}

TEST(HypothesizeEpsilonTest, RefutedHypothesisLeavesLedgerUntouched) {
  Ledger ledger = propagated(30);
  const auto before = dump_canonical(to_json(ledger));
  try {
    hypothesize_epsilon(ledger, {2, Rational(1)});
    FAIL() << "hypothesis 2=1 accepted";
  } catch (const InconsistentLedger& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("inconsistent ledger"), std::string::npos);
    EXPECT_NE(msg.find("hypothesis"), std::string::npos);
    EXPECT_NE(msg.find("sqrt_upper"), std::string::npos);
  }
  EXPECT_EQ(dump_canonical(to_json(ledger)), before);
}

TEST(HypothesizeEpsilonTest, LargeAlphaIsRefuted) {
  // 4 + 1/7 exceeds sqrt(17).
  Ledger ledger = propagated(401);
  EXPECT_THROW(hypothesize_epsilon(ledger, {4, Rational(1, 7)}), InconsistentLedger);
}

TEST(HypothesizeEpsilonTest, Preconditions) {
  Ledger ledger = seed_anchors(9);
  EXPECT_THROW(hypothesize_epsilon(ledger, {3, Rational(1, 10)}), InvalidArgument);
  EXPECT_THROW(hypothesize_epsilon(ledger, {2, Rational(0)}), InvalidArgument);
  EXPECT_THROW(hypothesize_epsilon(ledger, {2, Rational(-1, 3)}), InvalidArgument);
}

TEST(HypothesizeEpsilonTest, FloorHoldsExactly) {
  const Ledger base = propagated(401);
  for (std::int64_t n = 1; n <= 6; ++n) {
    for (const Rational& alpha : {Rational(1, 100), Rational(1, 50), Rational(1, 13)}) {
      Ledger ledger = base;
      hypothesize_epsilon(ledger, {n, alpha});
      for (std::int64_t b = n; b * b + 1 <= 401; ++b) {
        EXPECT_EQ(epsilon_view(ledger, b).eps_lower, Rational(n) * alpha / Rational(b)) << n << " " << b;
      }
    }
  }
}

TEST(ZeroPropagationTest, Examples) {
  Ledger one = propagated(5);
  zero_propagation(one, 1);
  EXPECT_EQ(one.upper(2), Surd(Rational(1)));

  Ledger four = propagated(17);
  zero_propagation(four, 4);
  const auto view = epsilon_view(four, 2);
  EXPECT_EQ(view.eps_lower, Rational(0));
  EXPECT_EQ(view.eps_upper, Surd(Rational(0)));
  EXPECT_THROW(zero_propagation(four, 5), InvalidArgument);
}

TEST(ZeroPropagationTest, PinsEveryEpsilonUpToN) {
  const Ledger base = propagated(2501);
  for (std::int64_t n = 1; n <= 50; ++n) {
    Ledger ledger = base;
    zero_propagation(ledger, n);
    for (std::int64_t k = 1; k <= n; ++k) {
      const auto view = epsilon_view(ledger, k);
      ASSERT_EQ(view.eps_lower, Rational(0)) << n << " " << k;
      ASSERT_EQ(view.eps_upper, Surd(Rational(0))) << n << " " << k;
    }
  }
}

TEST(ZeroPropagationTest, ContradictionIsReported) {
  Ledger ledger = propagated(50);
  hypothesize_epsilon(ledger, {3, Rational(1, 10)});
  EXPECT_THROW(zero_propagation(ledger, 4), InconsistentLedger);
}

TEST(PartialSumsTest, Examples) {
  const Ledger anchors = propagated(401);
  const auto flat = epsilon_partial_sums(anchors, 20);
  EXPECT_FALSE(flat.any_positive);
  for (const auto& row : flat.rows) EXPECT_EQ(row.partial_sum, Rational(0));

  const auto single = epsilon_partial_sums(propagated(2), 1);
  ASSERT_EQ(single.rows.size(), 1u);
  EXPECT_EQ(single.rows[0].k, 1);
  EXPECT_EQ(single.rows[0].partial_sum, Rational(0));

  Ledger hyp = anchors;
  hypothesize_epsilon(hyp, {3, Rational(1, 10)});
  const auto report = epsilon_partial_sums(hyp, 6);
  EXPECT_EQ(report.rows[5].partial_sum,
            Rational(1, 10) + Rational(3, 40) + Rational(3, 50) + Rational(1, 20));
  EXPECT_EQ(report.rows[5].partial_sum, Rational(57, 200));
  EXPECT_TRUE(report.any_positive);
  EXPECT_EQ(report.floor_from, 3);
  EXPECT_EQ(report.floor_constant, Rational(3, 10));
  EXPECT_THROW(epsilon_partial_sums(hyp, 21), InvalidArgument);
}

TEST(PartialSumsTest, StableUnderFurtherPropagation) {
  Ledger hyp = propagated(401);
  hypothesize_epsilon(hyp, {3, Rational(1, 10)});
  propagate(hyp);
  EXPECT_EQ(epsilon_partial_sums(hyp, 6).rows[5].partial_sum, Rational(57, 200));
  for (std::int64_t b = 3; b <= 20; ++b) {
    EXPECT_EQ(epsilon_view(hyp, b).eps_lower, Rational(3, 10) / Rational(b)) << b;
  }
}

TEST(AuditTest, DetectsTampering) {
  Ledger ledger = propagated(30);
  ASSERT_TRUE(audit(ledger).ok);
  Json j = to_json(ledger);
  const auto prov = j["entries"][9]["lower_prov"].get<std::size_t>();
  j["rules"][prov]["value"] = "7/2";
  const Ledger tampered = ledger_from_json(j);
  const auto report = audit(tampered);
  EXPECT_FALSE(report.ok);
  EXPECT_FALSE(report.problems.empty());
}

TEST(LedgerJsonTest, RoundTripIsCanonical) {
  Ledger ledger = propagated(50);
  ingest_certificate(ledger, split_refine(grid_packing(2, Container::unit_square()), 0));
  zero_propagation(ledger, 2);
  const std::string text = dump_canonical(to_json(ledger));
  const Ledger back = ledger_from_json(parse_json_text(text));
  EXPECT_EQ(dump_canonical(to_json(back)), text);
  EXPECT_TRUE(audit(back).ok);
  EXPECT_EQ(back.entries(), ledger.entries());
}

TEST(LedgerJsonTest, BoundEncodings) {
  EXPECT_EQ(bound_to_json(Surd(Rational(3))), Json("3/1"));
  EXPECT_EQ(bound_to_json(Surd::sqrt_of(5)).dump(), R"({"sqrt_of":5})");
  EXPECT_EQ(bound_to_json(Surd(Rational(-3), Rational(2), 5)).dump(), R"({"rat":"-3/1","coef":"2/1","sqrt_of":5})");
  EXPECT_EQ(bound_from_json(parse_json_text(R"({"rat":"-3/1","coef":"2/1","sqrt_of":5})")),
            Surd(Rational(-3), Rational(2), 5));
  EXPECT_THROW(bound_from_json(parse_json_text("3")), ParseError);
  EXPECT_THROW(ledger_from_json(parse_json_text(R"({"container":"square"})")), ParseError);
}

}  // namespace
}  // namespace sidesum
