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

// Exact constructive lower bounds. Every function here returns a packing that
// the verifier accepts; nothing is trusted without a call to verify_packing.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sidesum/error.hpp"
#include "sidesum/geometry.hpp"
#include "sidesum/rational.hpp"

namespace sidesum {

struct SubstitutionParams {
  int a = 1;
  int b = 1;
};

/// One step of a construction. Ordering of moves (and hence of move
/// sequences) is lexicographic on (type, first, second).
struct ConstructionMove {
  enum class Type { kBase, kGrid, kSplitLargest, kSubstitute, kPad };
  Type type = Type::kBase;
  int first = 0;
  int second = 0;

  static ConstructionMove base(int n) { return {Type::kBase, n, 0}; }
  static ConstructionMove grid(int k) { return {Type::kGrid, k, 0}; }
  static ConstructionMove split_largest() { return {Type::kSplitLargest, 0, 0}; }
  static ConstructionMove substitute(int a, int b) { return {Type::kSubstitute, a, b}; }
  static ConstructionMove pad(int count) { return {Type::kPad, count, 0}; }

  std::string str() const {
    switch (type) {
      case Type::kBase: return "base(" + std::to_string(first) + ")";
      case Type::kGrid: return "grid(" + std::to_string(first) + ")";
      case Type::kSplitLargest: return "split";
      case Type::kSubstitute:
        return "substitute(" + std::to_string(first) + "," + std::to_string(second) + ")";
      case Type::kPad: return "pad(" + std::to_string(first) + ")";
    }
    return "?";
  }

  friend auto operator<=>(const ConstructionMove&, const ConstructionMove&) = default;
};

namespace detail {

inline void append_meta(std::string& meta, const std::string& step) {
  if (!meta.empty()) meta += ";";
  meta += step;
}

inline void require_valid(const Packing& pk, const char* what) {
  if (!verify_packing(pk).valid) throw InvalidArgument(std::string(what) + ": invalid packing");
}

/// The k*k grid cells of scale 1/k. For triangles the up cell (i, j) exists
/// for i+j <= k-1 and the down cell with the same bounding frame for
/// i+j <= k-2. The predicate decides which cells to keep.
template <typename Keep>
std::vector<Placement> grid_cells(int k, const Container& c, Keep keep) {
  std::vector<Placement> cells;
  const Rational h(1, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) {
      const Rational x(i, k), y(j, k);
      if (!c.is_triangular()) {
        if (keep(i, j)) cells.push_back(Placement::square(x, y, h));
        continue;
      }
      if (i + j <= k - 1 && keep(i, j)) cells.push_back(Placement::tri_up(x, y, h));
      if (i + j <= k - 2 && keep(i, j)) cells.push_back(Placement::tri_down(x, y, h));
    }
  }
  return cells;
}

}  // namespace detail

inline Packing grid_packing(int k, const Container& container) {
  if (k < 1) throw InvalidArgument("grid size must be at least 1");
  Packing pk{container, detail::grid_cells(k, container, [](int, int) { return true; }),
             "grid(" + std::to_string(k) + ")"};
  return pk;
}

/// Seeds for small n: the container itself (n = 1) or two half-size shapes
/// (n = 2). Larger seeds come from search or the optimizer.
inline Packing base_packing(int n, const Container& container) {
  Packing pk{container, {}, "base(" + std::to_string(n) + ")"};
  const Rational half(1, 2);
  if (n == 1) {
    pk.placements.push_back(container.is_triangular() ? Placement::tri_up(0, 0, 1)
                                                      : Placement::square(0, 0, 1));
  } else if (n == 2) {
    if (container.is_triangular()) {
      pk.placements = {Placement::tri_up(0, 0, half), Placement::tri_down(0, 0, half)};
    } else {
      pk.placements = {Placement::square(0, 0, half), Placement::square(half, half, half)};
    }
  } else {
    throw InvalidArgument("base packings exist only for n = 1 and n = 2");
  }
  return pk;
}

/// The four congruent half-scale tiles of one placement.
inline std::vector<Placement> split_tiles(const Placement& p) {
  const Rational h = p.s / 2;
  const Rational xm = p.x + h, ym = p.y + h;
  switch (p.kind) {
    case PlacementKind::kSquare:
      return {Placement::square(p.x, p.y, h), Placement::square(xm, p.y, h),
              Placement::square(p.x, ym, h), Placement::square(xm, ym, h)};
    case PlacementKind::kTriUp:
      return {Placement::tri_up(p.x, p.y, h), Placement::tri_up(xm, p.y, h),
              Placement::tri_up(p.x, ym, h), Placement::tri_down(p.x, p.y, h)};
    case PlacementKind::kTriDown:
      return {Placement::tri_down(xm, p.y, h), Placement::tri_down(p.x, ym, h),
              Placement::tri_down(xm, ym, h), Placement::tri_up(xm, ym, h)};
  }
  return {};
}

/// Replaces placement `index` by its four half-scale tiles (kept in place of
/// the original, in tile order). Count grows by 3 and the side sum by s.
inline Packing split_refine(const Packing& pk, std::size_t index) {
  if (index >= pk.placements.size()) throw InvalidArgument("split index out of range");
  if (pk.placements[index].s.sign() <= 0) {
    throw InvalidArgument("cannot split degenerate placement");
  }
  detail::require_valid(pk, "split_refine");
  Packing out{pk.container, {}, pk.meta};
  out.placements.reserve(pk.placements.size() + 3);
  for (std::size_t i = 0; i < pk.placements.size(); ++i) {
    if (i != index) {
      out.placements.push_back(pk.placements[i]);
      continue;
    }
    for (auto& t : split_tiles(pk.placements[i])) out.placements.push_back(std::move(t));
  }
  detail::append_meta(out.meta, "split(" + std::to_string(index) + ")");
  return out;
}

/// Index of the first placement of maximal scale.
inline std::size_t largest_index(const Packing& pk) {
  if (pk.placements.empty()) throw InvalidArgument("empty packing has no largest placement");
  std::size_t best = 0;
  for (std::size_t i = 1; i < pk.placements.size(); ++i) {
    if (pk.placements[i].s > pk.placements[best].s) best = i;
  }
  return best;
}

/// Grid substitution: tile the container with the b x b grid, drop the a*a
/// cells of the bottom-right corner (maximal u), and put `base` scaled by
/// a/b into that corner. Result has b^2 - a^2 + n placements and side sum
/// (b^2 - a^2 + a * side_sum(base)) / b.
inline Packing substitute(const Packing& base, const SubstitutionParams& params) {
  const int a = params.a, b = params.b;
  if (a < 1 || b < 1) throw InvalidArgument("substitution parameters must be positive");
  if (a > b) throw InvalidArgument("substitution requires a <= b");
  detail::require_valid(base, "substitute");
  const Container& c = base.container;
  Packing out{c, {}, base.meta};
  out.placements = detail::grid_cells(b, c, [&](int i, int j) {
    const bool in_corner = c.is_triangular() ? i >= b - a : (i >= b - a && j < a);
    return !in_corner;
  });
  const Rational ratio(a, b);
  const Rational shift = Rational(1) - ratio;
  for (const auto& p : base.placements) {
    out.placements.push_back({p.kind, shift + ratio * p.x, ratio * p.y, ratio * p.s});
  }
  detail::append_meta(out.meta, ConstructionMove::substitute(a, b).str());
  return out;
}

/// Appends zero-scale placements at the origin. Valid under the zero-scale
/// convention and leaves the side sum unchanged.
inline Packing pad_zero(const Packing& pk, int count) {
  Packing out = pk;
  for (int i = 0; i < count; ++i) {
    out.placements.push_back(pk.container.is_triangular() ? Placement::tri_up(0, 0, 0)
                                                          : Placement::square(0, 0, 0));
  }
  if (count > 0) detail::append_meta(out.meta, ConstructionMove::pad(count).str());
  return out;
}

/// Replays a move sequence. The first move must be Base or Grid.
inline Packing apply_moves(const std::vector<ConstructionMove>& moves, const Container& c) {
  if (moves.empty()) throw InvalidArgument("empty move sequence");
  using T = ConstructionMove::Type;
  Packing pk;
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const auto& m = moves[i];
    const bool seed = m.type == T::kBase || m.type == T::kGrid;
    if (seed != (i == 0)) throw InvalidArgument("move sequence must start with base or grid");
    switch (m.type) {
      case T::kBase: pk = base_packing(m.first, c); break;
      case T::kGrid: pk = grid_packing(m.first, c); break;
      case T::kSplitLargest: {
        std::string meta = pk.meta;
        pk = split_refine(pk, largest_index(pk));
        pk.meta = meta;
        detail::append_meta(pk.meta, m.str());
        break;
      }
      case T::kSubstitute: pk = substitute(pk, {m.first, m.second}); break;
      case T::kPad: pk = pad_zero(pk, m.first); break;
    }
  }
  return pk;
}

struct ConstructionResult {
  Packing packing;
  std::vector<ConstructionMove> moves;
  std::size_t nodes_expanded = 0;
};

namespace detail {

/// `count` placements of one scale. Scale multisets are kept as runs sorted
/// by decreasing scale; grids and substitutions produce few distinct scales.
struct ScaleRun {
  Rational scale;
  int count = 0;
  double approx = scale.to_double();
  friend bool operator==(const ScaleRun& a, const ScaleRun& b) {
    return a.count == b.count && a.scale == b.scale;
  }
};

/// Exact a < b, settled by the cached doubles whenever they are far apart.
inline bool scale_less(const ScaleRun& a, const ScaleRun& b) {
  const double tol = 1e-12 * std::max(1.0, std::abs(b.approx));
  if (a.approx < b.approx - tol) return true;
  if (a.approx > b.approx + tol) return false;
  return a.scale < b.scale;
}

using ScaleRuns = std::vector<ScaleRun>;

inline void add_run(ScaleRuns& runs, const Rational& scale, int count) {
  const ScaleRun run{scale, count};
  auto it = std::lower_bound(runs.begin(), runs.end(), run,
                             [](const ScaleRun& r, const ScaleRun& s) { return scale_less(s, r); });
  if (it != runs.end() && !scale_less(run, *it) && !scale_less(*it, run)) {
    it->count += count;
  } else {
    runs.insert(it, run);
  }
}

/// Search node: the move sequence plus the multiset of scales. Side sums and
/// splits depend only on that multiset, so the search never materializes
/// packings; the winner is replayed at the end.
struct SearchNode {
  std::vector<ConstructionMove> moves;
  ScaleRuns runs;
  int count = 0;
  Rational sum;
};

inline SearchNode make_node(std::vector<ConstructionMove> moves, ScaleRuns runs) {
  SearchNode node{std::move(moves), std::move(runs), 0, Rational()};
  for (const auto& r : node.runs) {
    node.count += r.count;
    node.sum += r.scale * Rational(r.count);
  }
  return node;
}

/// Componentwise dominance of the decreasingly sorted scale lists (equal
/// lengths). It is preserved by SplitLargest and by Substitute, so dominated
/// nodes can be dropped without losing the best descendant.
inline bool dominates(const ScaleRuns& a, const ScaleRuns& b) {
  std::size_t i = 0, j = 0;
  int left_a = a.empty() ? 0 : a[0].count, left_b = b.empty() ? 0 : b[0].count;
  while (i < a.size() && j < b.size()) {
    if (scale_less(a[i], b[j])) return false;
    const int step = std::min(left_a, left_b);
    left_a -= step;
    left_b -= step;
    if (left_a == 0 && ++i < a.size()) left_a = a[i].count;
    if (left_b == 0 && ++j < b.size()) left_b = b[j].count;
  }
  return true;
}

inline ScaleRuns seed_runs(const ConstructionMove& m) {
  if (m.type == ConstructionMove::Type::kGrid) return {ScaleRun{Rational(1, m.first), m.first * m.first}};
  return {m.first == 1 ? ScaleRun{Rational(1), 1} : ScaleRun{Rational(1, 2), 2}};
}

}  // namespace detail

/// Breadth-first search over compositions of Base/Grid/SplitLargest/Substitute
/// reaching exactly n placements, expanding at most `budget` nodes. A
/// sequence that stops short of n is completed with zero-scale padding.
/// Best = largest side sum, then fewest padded placements, then the
/// lexicographically smallest move sequence.
inline ConstructionResult best_constructive(int n, const Container& container,
                                            std::size_t budget = 20000) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  using detail::SearchNode;
  std::deque<SearchNode> queue;
  // count -> (scales, moves) of every admitted node
  std::map<int, std::vector<std::pair<detail::ScaleRuns, std::vector<ConstructionMove>>>> seen;

  auto admit = [&](SearchNode node) {
    auto& bucket = seen[node.count];
    for (const auto& [runs, moves] : bucket) {
      if (!detail::dominates(runs, node.runs)) continue;
      // An equal node with a lexicographically smaller sequence still counts.
      if (runs == node.runs && node.moves < moves) continue;
      return;
    }
    bucket.emplace_back(node.runs, node.moves);
    queue.push_back(std::move(node));
  };

  admit(detail::make_node({ConstructionMove::base(1)}, detail::seed_runs(ConstructionMove::base(1))));
  if (n >= 2) {
    admit(detail::make_node({ConstructionMove::base(2)}, detail::seed_runs(ConstructionMove::base(2))));
  }
  for (int k = 2; k * k <= n; ++k) {
    admit(detail::make_node({ConstructionMove::grid(k)}, detail::seed_runs(ConstructionMove::grid(k))));
  }

  std::optional<SearchNode> best;
  int best_pad = 0;
  auto better = [&](const SearchNode& node, int pad) {
    if (!best) return true;
    if (node.sum != best->sum) return node.sum > best->sum;
    if (pad != best_pad) return pad < best_pad;
    return node.moves < best->moves;
  };

  std::size_t expanded = 0;
  while (!queue.empty() && expanded < budget) {
    SearchNode node = std::move(queue.front());
    queue.pop_front();
    ++expanded;
    const int count = node.count;
    if (better(node, n - count)) {
      best = node;
      best_pad = n - count;
    }
    if (count + 3 <= n) {
      detail::ScaleRuns runs = node.runs;
      const Rational half = runs.front().scale / 2;
      if (--runs.front().count == 0) runs.erase(runs.begin());
      detail::add_run(runs, half, 4);
      auto moves = node.moves;
      moves.push_back(ConstructionMove::split_largest());
      admit(detail::make_node(std::move(moves), std::move(runs)));
    }
    for (int a = 1; count + 2 * a + 1 <= n; ++a) {
      for (int b = a + 1; count + b * b - a * a <= n; ++b) {
        const Rational ratio(a, b);
        using detail::ScaleRun;
        detail::ScaleRuns runs;
        runs.reserve(node.runs.size() + 1);
        for (const auto& r : node.runs) runs.push_back(ScaleRun{ratio * r.scale, r.count});
        detail::add_run(runs, Rational(1, b), b * b - a * a);
        auto moves = node.moves;
        moves.push_back(ConstructionMove::substitute(a, b));
        admit(detail::make_node(std::move(moves), std::move(runs)));
      }
    }
  }
  if (!best) throw Error("no construction found");

  ConstructionResult result;
  result.moves = best->moves;
  if (best_pad > 0) result.moves.push_back(ConstructionMove::pad(best_pad));
  result.packing = apply_moves(result.moves, container);
  result.nodes_expanded = expanded;
  if (!verify_packing(result.packing).valid) throw Error("internal error: construction failed verification");
  return result;
}

}  // namespace sidesum
