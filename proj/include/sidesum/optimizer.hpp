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

// Floating-point search for high side-sum packings, and the snap that turns
// its output into an exact certificate.
//
// The search is multi-start simulated annealing on a penalized objective
// followed by a greedy local refinement. Randomness comes from
// std::mt19937_64 (its output sequence is fixed by the C++ standard); restart
// r is seeded with splitmix64(seed ^ splitmix64(r + 1)) and all real-valued
// draws are built from raw 64-bit outputs, so results depend only on the
// configuration and not on the standard library's distributions.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sidesum/constructions.hpp"
#include "sidesum/error.hpp"
#include "sidesum/geometry.hpp"
#include "sidesum/rational.hpp"

namespace sidesum {

struct AnnealConfig {
  std::uint64_t seed = 1;
  int restarts = 4;
  int steps_per_restart = 20000;
  double initial_temperature = 0.05;
  double cooling = 0.9995;  // per step
  double initial_penalty_weight = 1.0;
  double penalty_growth = 2.0;  // per phase
  int penalty_phases = 10;
  double time_budget_seconds = 60.0;
  std::size_t constructive_budget = 20000;

  /// Weight of the last phase. Results are ranked with this weight.
  double final_penalty_weight() const {
    return initial_penalty_weight * std::pow(penalty_growth, penalty_phases - 1);
  }

  void validate() const {
    if (restarts < 1 || steps_per_restart < 1 || penalty_phases < 1) {
      throw InvalidArgument("anneal counts must be positive");
    }
    if (!(initial_temperature > 0) || !(initial_penalty_weight > 0) || !(penalty_growth > 0) ||
        !(time_budget_seconds > 0)) {
      throw InvalidArgument("anneal parameters must be positive");
    }
    if (!(cooling > 0 && cooling < 1)) throw InvalidArgument("cooling factor must lie in (0, 1)");
  }
};

struct FloatPlacement {
  PlacementKind kind = PlacementKind::kSquare;
  double x = 0;
  double y = 0;
  double s = 0;
  friend bool operator==(const FloatPlacement&, const FloatPlacement&) = default;
};

struct FloatPacking {
  Container container;
  std::vector<FloatPlacement> placements;
  friend bool operator==(const FloatPacking&, const FloatPacking&) = default;
};

inline FloatPacking to_float(const Packing& pk) {
  FloatPacking fp{pk.container, {}};
  for (const auto& p : pk.placements) {
    fp.placements.push_back({p.kind, p.x.to_double(), p.y.to_double(), p.s.to_double()});
  }
  return fp;
}

/// Side sum and total penalty of a float packing, kept apart so one
/// evaluation serves every penalty weight.
struct Score {
  double sum = 0;
  double violation = 0;
  double at(double weight) const { return sum - weight * violation; }
};

namespace detail {

struct FloatInterval {
  double lo;
  double hi;
};

inline std::array<FloatInterval, 3> float_projections(const FloatPlacement& p) {
  const double w = p.x + p.y;
  switch (p.kind) {
    case PlacementKind::kSquare: return {{{p.x, p.x + p.s}, {p.y, p.y + p.s}, {w, w + 2 * p.s}}};
    case PlacementKind::kTriUp: return {{{p.x, p.x + p.s}, {p.y, p.y + p.s}, {w, w + p.s}}};
    case PlacementKind::kTriDown:
      return {{{p.x, p.x + p.s}, {p.y, p.y + p.s}, {w + p.s, w + 2 * p.s}}};
  }
  return {};
}

/// Largest outward violation over the container's own half-planes.
inline double containment_excess(const Container& c, const FloatPlacement& p) {
  const auto pr = float_projections(p);
  double excess = std::max({0.0, -pr[0].lo, -pr[1].lo});
  if (c.is_triangular()) {
    excess = std::max(excess, pr[2].hi - 1.0);
  } else {
    excess = std::max({excess, pr[0].hi - 1.0, pr[1].hi - 1.0});
  }
  return excess;
}

/// Separating-axis depth: the smallest positive projection overlap, or 0
/// when some axis separates. Square pairs only use the u and v axes.
inline double overlap_depth(const FloatPlacement& p, const FloatPlacement& q) {
  if (p.s <= 0 || q.s <= 0) return 0.0;
  const auto a = float_projections(p);
  const auto b = float_projections(q);
  const bool squares = p.kind == PlacementKind::kSquare && q.kind == PlacementKind::kSquare;
  double depth = std::numeric_limits<double>::infinity();
  for (std::size_t axis = 0; axis < (squares ? 2u : 3u); ++axis) {
    const double o = std::min(a[axis].hi, b[axis].hi) - std::max(a[axis].lo, b[axis].lo);
    if (o <= 0) return 0.0;
    depth = std::min(depth, o);
  }
  return depth;
}

}  // namespace detail

inline Score score(const FloatPacking& fp) {
  Score sc;
  const auto& ps = fp.placements;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    sc.sum += ps[i].s;
    sc.violation += detail::containment_excess(fp.container, ps[i]);
    for (std::size_t j = i + 1; j < ps.size(); ++j) sc.violation += detail::overlap_depth(ps[i], ps[j]);
  }
  return sc;
}

/// Sum of scales minus the weighted containment excesses and overlap depths.
/// Exactly feasible packings score their side sum.
inline double objective(const FloatPacking& fp, double penalty_weight) {
  return score(fp).at(penalty_weight);
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(seed ^ splitmix64(stream + 1))) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

inline FloatPlacement random_placement(const Container& c, Rng& rng, double max_scale) {
  FloatPlacement p;
  p.s = rng.uniform(0.0, max_scale);
  if (!c.is_triangular()) {
    p.kind = PlacementKind::kSquare;
    p.x = rng.uniform(0.0, std::max(0.0, 1.0 - p.s));
    p.y = rng.uniform(0.0, std::max(0.0, 1.0 - p.s));
    return p;
  }
  p.kind = rng.uniform() < 0.5 ? PlacementKind::kTriUp : PlacementKind::kTriDown;
  const double room = std::max(0.0, 1.0 - (p.kind == PlacementKind::kTriUp ? 1.0 : 2.0) * p.s);
  double u = rng.uniform(0.0, room), v = rng.uniform(0.0, room);
  if (u + v > room) {
    u = room - u;
    v = room - v;
  }
  p.x = u;
  p.y = v;
  return p;
}

inline FloatPacking random_start(int n, const Container& c, Rng& rng) {
  FloatPacking fp{c, {}};
  const double cell = 1.0 / std::ceil(std::sqrt(static_cast<double>(n)));
  for (int i = 0; i < n; ++i) fp.placements.push_back(random_placement(c, rng, cell));
  return fp;
}

/// Greedy coordinate moves (grow scale, shift anchor) accepted only when
/// the final-weight objective improves; step halves when nothing helps.
inline void refine(FloatPacking& fp, double weight) {
  double best = objective(fp, weight);
  for (double h = 1e-2; h > 1e-10; h *= 0.5) {
    bool improved = true;
    for (int sweep = 0; improved && sweep < 10; ++sweep) {
      improved = false;
      for (auto& p : fp.placements) {
        for (int move = 0; move < 5; ++move) {
          const FloatPlacement saved = p;
          switch (move) {
            case 0: p.s += h; break;
            case 1: p.x -= h; break;
            case 2: p.x += h; break;
            case 3: p.y -= h; break;
            case 4: p.y += h; break;
          }
          const double value = objective(fp, weight);
          if (value > best) {
            best = value;
            improved = true;
          } else {
            p = saved;
          }
        }
      }
    }
  }
}

}  // namespace detail

struct AnnealResult {
  FloatPacking packing;
  double objective = 0;        // at the final penalty weight
  double initial_objective = 0;  // of the first restart's start, same weight
  bool timed_out = false;
};

/// Multi-start simulated annealing. Restart 0 starts from the best exact
/// construction, the others from random placements. The result is the best
/// packing seen at the final penalty weight (ties to the lowest restart), so
/// it never scores below restart 0's start. Deterministic for a fixed
/// configuration unless the time budget cuts a run short.
inline AnnealResult anneal(int n, const Container& container, const AnnealConfig& cfg = {}) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  const double final_weight = cfg.final_penalty_weight();
  const bool triangular = container.is_triangular();

  AnnealResult result;
  std::optional<FloatPacking> constructive;
  try {
    constructive = to_float(best_constructive(n, container, cfg.constructive_budget).packing);
  } catch (const Error&) {
  }

  bool have_best = false;
  for (int r = 0; r < cfg.restarts && !result.timed_out; ++r) {
    detail::Rng rng(cfg.seed, static_cast<std::uint64_t>(r));
    FloatPacking current =
        (r == 0 && constructive) ? *constructive : detail::random_start(n, container, rng);
    Score cur = score(current);
    if (r == 0) result.initial_objective = cur.at(final_weight);
    FloatPacking best = current;
    double best_value = cur.at(final_weight);

    const int phase_len = std::max(1, cfg.steps_per_restart / cfg.penalty_phases);
    double temperature = cfg.initial_temperature;
    for (int step = 0; step < cfg.steps_per_restart; ++step) {
      if ((step & 1023) == 0 && std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                              started).count() > cfg.time_budget_seconds) {
        result.timed_out = true;
        break;
      }
      const int phase = std::min(cfg.penalty_phases - 1, step / phase_len);
      const double weight = cfg.initial_penalty_weight * std::pow(cfg.penalty_growth, phase);
      const double sigma = 0.05 * std::sqrt(temperature / cfg.initial_temperature) + 1e-5;

      const std::size_t i = rng.index(current.placements.size());
      FloatPlacement& p = current.placements[i];
      const FloatPlacement saved = p;
      const double pick = rng.uniform();
      if (pick < 0.4) {
        p.x += sigma * rng.gaussian();
        p.y += sigma * rng.gaussian();
      } else if (pick < 0.75) {
        p.s = std::max(0.0, p.s + sigma * rng.gaussian());
      } else if (pick < 0.85 && triangular) {
        p.kind = p.kind == PlacementKind::kTriUp ? PlacementKind::kTriDown : PlacementKind::kTriUp;
      } else {
        p = detail::random_placement(container, rng, std::max(saved.s, sigma));
      }

      const Score next = score(current);
      const double delta = next.at(weight) - cur.at(weight);
      if (delta >= 0 || rng.uniform() < std::exp(delta / temperature)) {
        cur = next;
        const double value = cur.at(final_weight);
        if (value > best_value) {
          best_value = value;
          best = current;
        }
      } else {
        p = saved;
      }
      temperature *= cfg.cooling;
    }

    detail::refine(best, final_weight);
    best_value = objective(best, final_weight);
    if (!have_best || best_value > result.objective) {
      result.packing = std::move(best);
      result.objective = best_value;
      have_best = true;
    }
  }
  return result;
}

/// Nearest rational to the exact value of `x` with denominator at most
/// `limit` (continued-fraction convergents plus the best semiconvergent).
inline Rational nearest_rational(double x, std::int64_t limit) {
  if (!std::isfinite(x)) throw InvalidArgument("cannot rationalize a non-finite value");
  if (limit < 1) throw InvalidArgument("denominator limit must be positive");
  int exp = 0;
  const double mant = std::frexp(std::abs(x), &exp);
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  Rational exact = exp - 53 >= 0 ? Rational(BigInt(scaled) << (exp - 53), BigInt(1))
                                 : Rational(BigInt(scaled), BigInt(1) << (53 - exp));
  if (exact.denominator() <= limit) return x < 0 ? -exact : exact;

  BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  BigInt num = exact.numerator(), den = exact.denominator();
  while (true) {
    const BigInt a = num / den;
    const BigInt q2 = q0 + a * q1;
    if (q2 > limit) break;
    const BigInt p2 = p0 + a * p1;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const BigInt rem = num - a * den;
    num = den;
    den = rem;
    if (den == 0) break;
  }
  const BigInt k = (BigInt(limit) - q0) / q1;
  const Rational semi(p0 + k * p1, q0 + k * q1);
  const Rational conv(p1, q1);
  const Rational best = (conv - exact).abs() <= (semi - exact).abs() ? conv : semi;
  return x < 0 ? -best : best;
}

namespace detail {

/// Point that a placement shrinks towards: the corner its footprint keeps
/// when the scale goes to zero. Footprints shrunk about it are nested.
inline Point2<Rational> shrink_center(const Placement& p) {
  if (p.kind == PlacementKind::kTriDown) return {p.x + p.s, p.y + p.s};
  return {p.x, p.y};
}

inline Placement with_scale(const Placement& p, const Point2<Rational>& center, const Rational& s) {
  if (p.kind == PlacementKind::kTriDown) return {p.kind, center.u - s, center.v - s, s};
  return {p.kind, center.u, center.v, s};
}

inline Point2<Rational> clamp_into(const Container& c, Point2<Rational> pt) {
  pt.u = min(max(pt.u, Rational(0)), Rational(1));
  pt.v = min(max(pt.v, Rational(0)), Rational(1));
  if (c.is_triangular() && pt.u + pt.v > Rational(1)) pt.v = Rational(1) - pt.u;
  return pt;
}

}  // namespace detail

/// Rounds every coordinate and scale to the nearest rational with
/// denominator <= limit, clamps each shrink center into the container, then
/// shrinks all scales by a common factor k / 2^40 (largest feasible k, found
/// by bisection) until the exact verifier accepts. The side sum can only
/// drop, apart from the rounding itself.
inline Packing rationalize_snap(const FloatPacking& fp, std::int64_t denominator_limit = 1'000'000) {
  constexpr int kShrinkBits = 40;
  Packing pk{fp.container, {}, "snap(" + std::to_string(denominator_limit) + ")"};
  std::vector<Point2<Rational>> centers;
  std::vector<Rational> scales;
  for (const auto& f : fp.placements) {
    if (!kind_compatible(fp.container.kind, f.kind)) throw InvalidArgument("kind mismatch");
    Placement p{f.kind, nearest_rational(f.x, denominator_limit), nearest_rational(f.y, denominator_limit),
                max(nearest_rational(f.s, denominator_limit), Rational(0))};
    centers.push_back(detail::clamp_into(fp.container, detail::shrink_center(p)));
    scales.push_back(p.s);
    pk.placements.push_back(detail::with_scale(p, centers.back(), p.s));
  }
  if (verify_packing(pk).valid) return pk;

  auto shrunk = [&](const Rational& factor) {
    Packing out = pk;
    for (std::size_t i = 0; i < out.placements.size(); ++i) {
      out.placements[i] = detail::with_scale(out.placements[i], centers[i], factor * scales[i]);
    }
    return out;
  };
  const BigInt full = BigInt(1) << kShrinkBits;
  if (!verify_packing(shrunk(Rational(0))).valid) {
    throw Error("cannot reach feasibility even with all scales at zero");
  }
  BigInt lo = 0, hi = full;  // lo feasible, hi infeasible
  while (hi - lo > 1) {
    const BigInt mid = (lo + hi) / 2;
    if (verify_packing(shrunk(Rational(mid, full))).valid) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Rational factor(lo, full);
  Packing out = shrunk(factor);
  out.meta += ";shrink(" + factor.str() + ")";
  return out;
}

}  // namespace sidesum
