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
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "sidesum/geometry.hpp"

namespace sidesum {

namespace detail {

inline std::string svg_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

inline std::string_view svg_fill(PlacementKind k) {
  switch (k) {
    case PlacementKind::kSquare: return "#4477aa";
    case PlacementKind::kTriUp: return "#228833";
    case PlacementKind::kTriDown: return "#cc6677";
  }
  return "#000000";
}

}  // namespace detail

/// Deterministic SVG: 1000 units per container unit, y pointing up, the
/// container as an unfilled path and one polygon per placement. Triangle
/// packings are drawn equilateral. A frame, or the container's own frame
/// for parallelograms, maps square-frame packings affinely.
inline std::string render_svg(const Packing& pk, const std::optional<Frame>& frame = std::nullopt) {
  constexpr double kScale = 1000.0;
  constexpr double kMargin = 20.0;
  const bool triangular = pk.container.is_triangular();
  std::optional<Frame> f = frame ? frame : pk.container.frame;
  if (triangular && frame) throw InvalidArgument("frames apply to square-frame packings only");
  if (f && is_degenerate(*f)) throw InvalidArgument("degenerate parallelogram frame");

  auto map = [&](const Point2<Rational>& p) -> Point2<double> {
    if (triangular) {
      const double u = p.u.to_double();
      const double v = p.v.to_double();
      return {u + v / 2.0, v * std::sqrt(3.0) / 2.0};
    }
    if (f) return apply_frame(*f, p);
    return {p.u.to_double(), p.v.to_double()};
  };

  std::vector<Point2<double>> outline;
  for (const auto& v : vertices(pk.container)) outline.push_back(map(v));
  double min_x = outline[0].u, max_x = outline[0].u, min_y = outline[0].v, max_y = outline[0].v;
  for (const auto& p : outline) {
    min_x = std::min(min_x, p.u);
    max_x = std::max(max_x, p.u);
    min_y = std::min(min_y, p.v);
    max_y = std::max(max_y, p.v);
  }
  const double width = (max_x - min_x) * kScale + 2 * kMargin;
  const double height = (max_y - min_y) * kScale + 2 * kMargin;
  auto sx = [&](double x) { return detail::svg_number((x - min_x) * kScale + kMargin); };
  auto sy = [&](double y) { return detail::svg_number((max_y - y) * kScale + kMargin); };

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_number(width) + "\" height=\"" +
         detail::svg_number(height) + "\" viewBox=\"0 0 " + detail::svg_number(width) + " " +
         detail::svg_number(height) + "\">\n";
  out += "  <path d=\"";
  for (std::size_t i = 0; i < outline.size(); ++i) {
    out += (i == 0 ? "M " : " L ") + sx(outline[i].u) + " " + sy(outline[i].v);
  }
  out += " Z\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/>\n";
  for (const auto& p : pk.placements) {
    out += "  <polygon points=\"";
    const auto vs = vertices(p);
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const auto q = map(vs[i]);
      out += (i == 0 ? "" : " ") + sx(q.u) + "," + sy(q.v);
    }
    out += "\" fill=\"" + std::string(detail::svg_fill(p.kind)) +
           "\" fill-opacity=\"0.35\" stroke=\"#000000\" stroke-width=\"2\" data-kind=\"" +
           std::string(to_string(p.kind)) + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace sidesum
