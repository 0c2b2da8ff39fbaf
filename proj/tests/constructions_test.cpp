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

#include "sidesum/constructions.hpp"

#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace sidesum {
namespace {

const Container kSquare = Container::unit_square();
const Container kTriangle = Container::unit_triangle();

/// Pairwise check with the sampling oracle instead of the library verifier.
bool valid_by_oracle(const Packing& pk) {
  for (const auto& p : pk.placements) {
    if (!testing::contained_by_vertices(pk.container, p)) return false;
  }
  for (std::size_t i = 0; i < pk.size(); ++i) {
    for (std::size_t j = i + 1; j < pk.size(); ++j) {
      if (testing::interiors_intersect_by_sampling(pk.placements[i], pk.placements[j])) return false;
    }
  }
  return true;
}

int count_kind(const Packing& pk, PlacementKind kind) {
  int n = 0;
  for (const auto& p : pk.placements) n += p.kind == kind;
  return n;
}

TEST(GridPackingTest, Examples) {
  const auto one = grid_packing(1, kSquare);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.placements[0], Placement::square(0, 0, 1));

  const auto tri = grid_packing(3, kTriangle);
  EXPECT_EQ(tri.size(), 9u);
  EXPECT_EQ(count_kind(tri, PlacementKind::kTriUp), 6);
  EXPECT_EQ(count_kind(tri, PlacementKind::kTriDown), 3);
  EXPECT_EQ(side_sum(tri), Rational(3));

  const auto sq = grid_packing(2, kSquare);
  EXPECT_EQ(sq.size(), 4u);
  EXPECT_EQ(side_sum(sq), Rational(2));
  EXPECT_THROW(grid_packing(0, kSquare), InvalidArgument);
}

TEST(GridPackingTest, AnchorsUpToTen) {
  for (int k = 1; k <= 10; ++k) {
    for (const auto& c : {kSquare, kTriangle}) {
      const auto pk = grid_packing(k, c);
      EXPECT_EQ(pk.size(), static_cast<std::size_t>(k * k));
      const auto report = verify_packing(pk);
      EXPECT_TRUE(report.valid);
      EXPECT_EQ(report.side_sum, Rational(k));
    }
  }
}

TEST(GridPackingTest, SmallGridsPassSamplingOracle) {
  for (int k = 1; k <= 4; ++k) {
    EXPECT_TRUE(valid_by_oracle(grid_packing(k, kSquare)));
    EXPECT_TRUE(valid_by_oracle(grid_packing(k, kTriangle)));
  }
}

TEST(BasePackingTest, Examples) {
  EXPECT_EQ(side_sum(base_packing(1, kSquare)), Rational(1));
  for (const auto& c : {kSquare, kTriangle}) {
    const auto two = base_packing(2, c);
    EXPECT_EQ(two.size(), 2u);
    EXPECT_TRUE(verify_packing(two).valid);
    EXPECT_TRUE(valid_by_oracle(two));
    EXPECT_EQ(side_sum(two), Rational(1));
  }
  EXPECT_THROW(base_packing(3, kSquare), InvalidArgument);
  EXPECT_THROW(base_packing(0, kTriangle), InvalidArgument);
}

TEST(SplitRefineTest, Examples) {
  const auto four = split_refine(base_packing(1, kSquare), 0);
  EXPECT_EQ(four.size(), 4u);
  EXPECT_EQ(side_sum(four), Rational(2));
  EXPECT_TRUE(verify_packing(four).valid);

  const auto seven = split_refine(grid_packing(2, kSquare), 3);
  EXPECT_EQ(seven.size(), 7u);
  EXPECT_EQ(side_sum(seven), Rational(5, 2));
  EXPECT_TRUE(verify_packing(seven).valid);
  EXPECT_TRUE(valid_by_oracle(seven));

  const auto tri = split_refine(base_packing(1, kTriangle), 0);
  EXPECT_EQ(tri.size(), 4u);
  EXPECT_EQ(side_sum(tri), Rational(2));
  EXPECT_EQ(count_kind(tri, PlacementKind::kTriUp), 3);
  EXPECT_EQ(count_kind(tri, PlacementKind::kTriDown), 1);
  EXPECT_TRUE(valid_by_oracle(tri));
}

TEST(SplitRefineTest, TriDownSplitsIntoThreeDownOneUp) {
  const auto grid = grid_packing(2, kTriangle);
  std::size_t down = 0;
  while (grid.placements[down].kind != PlacementKind::kTriDown) ++down;
  const auto out = split_refine(grid, down);
  EXPECT_EQ(count_kind(out, PlacementKind::kTriDown), 3);
  EXPECT_EQ(count_kind(out, PlacementKind::kTriUp), 4);
  EXPECT_TRUE(verify_packing(out).valid);
  EXPECT_TRUE(valid_by_oracle(out));
}

TEST(SplitRefineTest, Errors) {
  auto padded = pad_zero(base_packing(1, kSquare), 1);
  EXPECT_THROW(split_refine(padded, 1), InvalidArgument);
  EXPECT_THROW(split_refine(padded, 2), InvalidArgument);
  const Packing bad{kSquare, {Placement::square(0, 0, 1), Placement::square(0, 0, 1)}, ""};
  EXPECT_THROW(split_refine(bad, 0), InvalidArgument);
}

TEST(SplitRefineTest, ArithmeticProperty) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const Container c = trial % 2 ? kTriangle : kSquare;
    const auto pk = testing::random_valid_packing(rng, c, 6);
    std::uniform_int_distribution<std::size_t> pick(0, pk.size() - 1);
    const std::size_t i = pick(rng);
    const auto out = split_refine(pk, i);
    EXPECT_EQ(out.size(), pk.size() + 3);
    EXPECT_EQ(side_sum(out), side_sum(pk) + pk.placements[i].s);
    EXPECT_TRUE(verify_packing(out).valid);
  }
}

TEST(SubstituteTest, Examples) {
  const auto base = base_packing(2, kSquare);
  const auto five = substitute(base, {1, 2});
  EXPECT_EQ(five.size(), 5u);
  EXPECT_EQ(side_sum(five), Rational(2));
  EXPECT_TRUE(verify_packing(five).valid);
  EXPECT_TRUE(valid_by_oracle(five));
  EXPECT_EQ(five.meta, "base(2);substitute(1,2)");

  const auto same = substitute(base, {2, 2});
  EXPECT_EQ(same.placements, base.placements);
  EXPECT_EQ(side_sum(same), side_sum(base));

  const auto nine = substitute(base, {3, 4});
  EXPECT_EQ(nine.size(), 9u);
  EXPECT_EQ(side_sum(nine), Rational(5, 2));
  EXPECT_TRUE(verify_packing(nine).valid);
}

TEST(SubstituteTest, CornerIsBottomRight) {
  const auto out = substitute(base_packing(1, kSquare), {1, 2});
  EXPECT_EQ(out.placements.back(), Placement::square(Rational(1, 2), 0, Rational(1, 2)));
  const auto tri = substitute(base_packing(1, kTriangle), {1, 2});
  EXPECT_EQ(tri.placements.back(), Placement::tri_up(Rational(1, 2), 0, Rational(1, 2)));
}

TEST(SubstituteTest, Errors) {
  const Packing bad{kSquare, {Placement::square(0, 0, 1), Placement::square(0, 0, 1)}, ""};
  EXPECT_THROW(substitute(bad, {1, 2}), InvalidArgument);
  EXPECT_THROW(substitute(base_packing(1, kSquare), {3, 2}), InvalidArgument);
  EXPECT_THROW(substitute(base_packing(1, kSquare), {0, 2}), InvalidArgument);
}

TEST(SubstituteTest, KSquaredPlusOne) {
  for (int k = 1; k <= 10; ++k) {
    for (const auto& c : {kSquare, kTriangle}) {
      const auto pk = substitute(base_packing(2, c), {1, k});
      EXPECT_EQ(pk.size(), static_cast<std::size_t>(k * k + 1));
      const auto report = verify_packing(pk);
      EXPECT_TRUE(report.valid);
      EXPECT_EQ(report.side_sum, Rational(k));
    }
  }
}

TEST(SubstituteTest, FormulaOnRandomBases) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> pick_b(1, 8);
  for (int trial = 0; trial < 80; ++trial) {
    const Container c = trial % 2 ? kTriangle : kSquare;
    const auto base = testing::random_valid_packing(rng, c, 5);
    const int b = pick_b(rng);
    const int a = std::uniform_int_distribution<int>(1, b)(rng);
    const auto out = substitute(base, {a, b});
    const auto n = static_cast<int>(base.size());
    EXPECT_EQ(static_cast<int>(out.size()), b * b - a * a + n);
    EXPECT_EQ(side_sum(out), (Rational(b * b - a * a) + Rational(a) * side_sum(base)) / Rational(b));
    EXPECT_TRUE(verify_packing(out).valid);
  }
}

TEST(BestConstructiveTest, Examples) {
  EXPECT_EQ(side_sum(best_constructive(4, kSquare).packing), Rational(2));
  EXPECT_GE(side_sum(best_constructive(5, kSquare).packing), Rational(2));
  const auto seven = best_constructive(7, kSquare);
  EXPECT_GE(side_sum(seven.packing), Rational(5, 2));
  EXPECT_EQ(seven.packing.size(), 7u);
  EXPECT_TRUE(verify_packing(seven.packing).valid);
}

TEST(BestConstructiveTest, SmallCountsAreReachable) {
  for (int n = 1; n <= 20; ++n) {
    for (const auto& c : {kSquare, kTriangle}) {
      const auto result = best_constructive(n, c, 1500);
      EXPECT_EQ(result.packing.size(), static_cast<std::size_t>(n));
      EXPECT_TRUE(verify_packing(result.packing).valid) << n;
      if (n == 2) EXPECT_EQ(result.packing.meta, "base(2)");
    }
  }
}

TEST(BestConstructiveTest, NeverBelowSubstituteSeed) {
  for (int k = 1; k <= 5; ++k) {
    const auto result = best_constructive(k * k + 1, kTriangle);
    EXPECT_GE(side_sum(result.packing), Rational(k));
  }
}

TEST(BestConstructiveTest, Deterministic) {
  const auto a = best_constructive(19, kSquare, 3000);
  const auto b = best_constructive(19, kSquare, 3000);
  EXPECT_EQ(a.packing, b.packing);
  EXPECT_EQ(a.moves, b.moves);
}

TEST(BestConstructiveTest, Errors) {
  EXPECT_THROW(best_constructive(0, kSquare), InvalidArgument);
  EXPECT_THROW(best_constructive(5, kSquare, 0), Error);
}

TEST(ApplyMovesTest, ReplaysMeta) {
  const auto pk = apply_moves({ConstructionMove::base(2), ConstructionMove::substitute(1, 4)}, kSquare);
  EXPECT_EQ(pk.meta, "base(2);substitute(1,4)");
  EXPECT_EQ(side_sum(pk), Rational(4));
  EXPECT_THROW(apply_moves({ConstructionMove::split_largest()}, kSquare), InvalidArgument);
}

}  // namespace
}  // namespace sidesum
