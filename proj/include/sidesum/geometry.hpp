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

// Exact geometry of packings in the normalized (sheared) frame.
//
// Every container and placement is described by coordinates (u, v) in which
// all edge normals lie in the axis set {u, v, u+v}:
//
//   unit square / parallelogram   0 <= u <= 1, 0 <= v <= 1
//   unit triangle                 u >= 0, v >= 0, u + v <= 1
//   Square(x, y, s)               [x, x+s] x [y, y+s]
//   TriUp(x, y, s)                u >= x, v >= y, u + v <= x + y + s
//   TriDown(x, y, s)              u <= x+s, v <= y+s, u + v >= x + y + s
//
// The equilateral triangle maps onto the unit right triangle by a shear
// that keeps side lengths of grid-aligned triangles equal to s, so side sums
// are the same in both frames. A parallelogram container is the unit square
// under an affine frame that is only ever read for rendering.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sidesum/error.hpp"
#include "sidesum/rational.hpp"

namespace sidesum {

enum class ContainerKind { kUnitSquare, kUnitTriangle, kParallelogram };
enum class PlacementKind { kSquare, kTriUp, kTriDown };

/// Two basis vectors e1, e2 (rows) of the affine frame used for rendering.
using Frame = std::array<std::array<double, 2>, 2>;

inline double frame_determinant(const Frame& f) {
  return f[0][0] * f[1][1] - f[0][1] * f[1][0];
}

inline bool is_degenerate(const Frame& f) {
  const double scale = std::max({std::abs(f[0][0]), std::abs(f[0][1]),
                                 std::abs(f[1][0]), std::abs(f[1][1])});
  return !std::isfinite(frame_determinant(f)) || scale == 0.0 ||
         std::abs(frame_determinant(f)) <= 1e-12 * scale * scale;
}

struct Container {
  ContainerKind kind = ContainerKind::kUnitSquare;
  std::optional<Frame> frame;  // parallelogram only

  static Container unit_square() { return {ContainerKind::kUnitSquare, std::nullopt}; }
  static Container unit_triangle() { return {ContainerKind::kUnitTriangle, std::nullopt}; }
  static Container parallelogram(const Frame& frame) {
    if (is_degenerate(frame)) throw InvalidArgument("degenerate parallelogram frame");
    return {ContainerKind::kParallelogram, frame};
  }

  bool is_triangular() const { return kind == ContainerKind::kUnitTriangle; }

  friend bool operator==(const Container&, const Container&) = default;
};

struct Placement {
  PlacementKind kind = PlacementKind::kSquare;
  Rational x;
  Rational y;
  Rational s;

  static Placement square(Rational x, Rational y, Rational s) {
    return {PlacementKind::kSquare, std::move(x), std::move(y), std::move(s)};
  }
  static Placement tri_up(Rational x, Rational y, Rational s) {
    return {PlacementKind::kTriUp, std::move(x), std::move(y), std::move(s)};
  }
  static Placement tri_down(Rational x, Rational y, Rational s) {
    return {PlacementKind::kTriDown, std::move(x), std::move(y), std::move(s)};
  }

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct Packing {
  Container container;
  std::vector<Placement> placements;
  std::string meta;

  std::size_t size() const { return placements.size(); }

  friend bool operator==(const Packing&, const Packing&) = default;
};

inline std::string_view to_string(ContainerKind k) {
  switch (k) {
    case ContainerKind::kUnitSquare: return "unit_square";
    case ContainerKind::kUnitTriangle: return "unit_triangle";
    case ContainerKind::kParallelogram: return "parallelogram";
  }
  return "?";
}

inline std::string_view to_string(PlacementKind k) {
  switch (k) {
    case PlacementKind::kSquare: return "square";
    case PlacementKind::kTriUp: return "tri_up";
    case PlacementKind::kTriDown: return "tri_down";
  }
  return "?";
}

inline bool kind_compatible(ContainerKind c, PlacementKind p) {
  return c == ContainerKind::kUnitTriangle ? p != PlacementKind::kSquare
                                           : p == PlacementKind::kSquare;
}

/// Closed interval [lo, hi] on one axis.
struct Interval {
  Rational lo;
  Rational hi;
};

/// Projections onto the axes u, v and u+v, in that order.
using Projections = std::array<Interval, 3>;

inline Projections projections(const Placement& p) {
  const Rational w = p.x + p.y;
  switch (p.kind) {
    case PlacementKind::kSquare:
      return {{{p.x, p.x + p.s}, {p.y, p.y + p.s}, {w, w + p.s + p.s}}};
    case PlacementKind::kTriUp:
      return {{{p.x, p.x + p.s}, {p.y, p.y + p.s}, {w, w + p.s}}};
    case PlacementKind::kTriDown:
      return {{{p.x, p.x + p.s}, {p.y, p.y + p.s}, {w + p.s, w + p.s + p.s}}};
  }
  return {};
}

inline Projections projections(const Container& c) {
  if (c.kind == ContainerKind::kUnitTriangle) return {{{0, 1}, {0, 1}, {0, 1}}};
  return {{{0, 1}, {0, 1}, {0, 2}}};
}

/// Closed containment of p's footprint in the container footprint.
/// Every container half-plane has its normal in {u, v, u+v}, so comparing the
/// three projections is exact.
inline bool contains(const Container& c, const Placement& p) {
  if (!kind_compatible(c.kind, p.kind)) throw InvalidArgument("kind mismatch");
  const auto outer = projections(c);
  const auto inner = projections(p);
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (inner[axis].lo < outer[axis].lo || inner[axis].hi > outer[axis].hi) return false;
  }
  return true;
}

/// True iff the interiors intersect. Both footprints only have edge normals
/// in {u, v, u+v}, so these three axes are a complete separating-axis set.
inline bool overlaps(const Placement& p, const Placement& q) {
  if (p.s.sign() <= 0 || q.s.sign() <= 0) return false;
  const auto a = projections(p);
  const auto b = projections(q);
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (a[axis].hi <= b[axis].lo || b[axis].hi <= a[axis].lo) return false;
  }
  return true;
}

struct Violation {
  std::size_t first = 0;
  std::optional<std::size_t> second;  // set for pairwise violations
  std::string reason;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct VerificationReport {
  bool valid = true;
  Rational side_sum;
  std::vector<Violation> violations;

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

inline Rational side_sum(const Packing& pk) {
  Rational total;
  for (const auto& p : pk.placements) total += p.s;
  return total;
}

/// Checks every placement against the container and every pair against each
/// other. Never throws on bad input; problems become violations.
inline VerificationReport verify_packing(const Packing& pk) {
  VerificationReport report;
  report.side_sum = side_sum(pk);
  const auto& ps = pk.placements;
  std::vector<Projections> proj;
  proj.reserve(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    proj.push_back(projections(ps[i]));
    if (ps[i].s.sign() < 0) {
      report.violations.push_back({i, std::nullopt, "negative scale"});
    } else if (!kind_compatible(pk.container.kind, ps[i].kind)) {
      report.violations.push_back({i, std::nullopt, "kind mismatch"});
    } else if (!contains(pk.container, ps[i])) {
      report.violations.push_back({i, std::nullopt, "outside container"});
    }
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].s.sign() <= 0) continue;
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      if (ps[j].s.sign() <= 0) continue;
      bool separated = false;
      for (std::size_t axis = 0; axis < 3 && !separated; ++axis) {
        separated = proj[i][axis].hi <= proj[j][axis].lo || proj[j][axis].hi <= proj[i][axis].lo;
      }
      if (!separated) report.violations.push_back({i, j, "overlap"});
    }
  }
  report.valid = report.violations.empty();
  return report;
}

template <typename T>
struct Point2 {
  T u;
  T v;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Counter-clockwise vertices of the footprint in the normalized frame.
inline std::vector<Point2<Rational>> vertices(const Placement& p) {
  const Rational x1 = p.x + p.s;
  const Rational y1 = p.y + p.s;
  switch (p.kind) {
    case PlacementKind::kSquare: return {{p.x, p.y}, {x1, p.y}, {x1, y1}, {p.x, y1}};
    case PlacementKind::kTriUp: return {{p.x, p.y}, {x1, p.y}, {p.x, y1}};
    case PlacementKind::kTriDown: return {{x1, p.y}, {x1, y1}, {p.x, y1}};
  }
  return {};
}

inline std::vector<Point2<Rational>> vertices(const Container& c) {
  if (c.kind == ContainerKind::kUnitTriangle) return {{0, 0}, {1, 0}, {0, 1}};
  return {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
}

inline Point2<double> apply_frame(const Frame& f, const Point2<Rational>& p) {
  const double u = p.u.to_double();
  const double v = p.v.to_double();
  return {u * f[0][0] + v * f[1][0], u * f[0][1] + v * f[1][1]};
}

/// Maps every placement of a square-frame packing through the affine frame
/// (u, v) -> u*e1 + v*e2. Scales, and therefore side sums, are untouched.
inline std::vector<std::vector<Point2<double>>> to_parallelogram_frame(const Packing& pk,
                                                                       const Frame& frame) {
  if (pk.container.kind == ContainerKind::kUnitTriangle) {
    throw InvalidArgument("parallelogram frame requires a square-frame packing");
  }
  if (is_degenerate(frame)) throw InvalidArgument("degenerate parallelogram frame");
  std::vector<std::vector<Point2<double>>> out;
  out.reserve(pk.placements.size());
  for (const auto& p : pk.placements) {
    std::vector<Point2<double>> poly;
    for (const auto& v : vertices(p)) poly.push_back(apply_frame(frame, v));
    out.push_back(std::move(poly));
  }
  return out;
}

}  // namespace sidesum
