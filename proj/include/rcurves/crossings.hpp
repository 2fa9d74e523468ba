#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rcurves/error.hpp"
#include "rcurves/geometry.hpp"

namespace rcurves {

enum class Direction { outward, inward };

/// (a, b) with γ(a, b) inside the open annulus and {ρ(a), ρ(b)} = {r, R},
/// where ρ(t) = |γ(t) - x|. Outward runs from the inner to the outer sphere.
struct CrossingInterval {
  double a = 0.0;
  double b = 0.0;
  Direction direction = Direction::outward;
};

struct CrossingReport {
  std::vector<CrossingInterval> intervals;  // sorted by a, pairwise disjoint
  /// Set when a vertex sits on a boundary sphere or a segment is tangent to
  /// one (within kGeomTolerance). Counts are still produced; touching points
  /// are treated as boundary points.
  bool non_generic = false;

  std::size_t count() const { return intervals.size(); }
};

namespace detail {

enum class Level { none, inner, outer };

struct BoundaryEvent {
  double t = 0.0;
  Level level = Level::none;
};

inline double radius_at(const Polyline& curve, const Point& center, double t) {
  return distance(curve.at(t), center);
}

}  // namespace detail

/// All crossings of `ann` by `curve`, in time order.
inline CrossingReport find_crossings(const Polyline& curve, const Annulus& ann) {
  using detail::BoundaryEvent;
  using detail::Level;
  require(curve.dim() == ann.dim(), ErrorCode::dimension_mismatch,
          "curve and annulus dimensions differ");
  CrossingReport report;
  const Point& c = ann.center();
  const double r = ann.inner();
  const double big_r = ann.outer();

  for (const Point& v : curve.vertices()) {
    const double rho = distance(v, c);
    if (std::abs(rho - r) <= kGeomTolerance * r || std::abs(rho - big_r) <= kGeomTolerance * big_r)
      report.non_generic = true;
  }
  if (curve.single_point()) return report;

  std::vector<BoundaryEvent> events;
  for (std::size_t i = 0; i < curve.num_segments(); ++i) {
    const Point& p = curve.vertex(i);
    const Point& q = curve.vertex(i + 1);
    for (const auto& [radius, level] : {std::pair{r, Level::inner}, std::pair{big_r, Level::outer}}) {
      const auto hits = detail::sphere_hits(p, q, c, radius);
      report.non_generic = report.non_generic || hits.tangent;
      for (std::size_t h = 0; h < hits.count; ++h) events.push_back({curve.global_time(i, hits.t[h]), level});
    }
  }
  std::sort(events.begin(), events.end(),
            [](const BoundaryEvent& x, const BoundaryEvent& y) { return x.t < y.t; });

  // Partition points: 0, every boundary touch, 1. Touches closer than the
  // tolerance (a vertex on a sphere reported by both adjacent segments)
  // are merged.
  constexpr double merge_tol = 1e-12;
  std::vector<BoundaryEvent> points;
  points.push_back({0.0, Level::none});
  for (const BoundaryEvent& e : events) {
    BoundaryEvent& last = points.back();
    if (e.t - last.t <= merge_tol && (last.level == Level::none || last.level == e.level)) {
      last.level = e.level;
      continue;
    }
    points.push_back(e);
  }
  if (points.size() > 1 && 1.0 - points.back().t <= merge_tol) {
    points.back().t = 1.0;
  } else {
    points.push_back({1.0, Level::none});
  }

  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const BoundaryEvent& left = points[i];
    const BoundaryEvent& right = points[i + 1];
    if (!(right.t > left.t)) continue;
    if (left.level == Level::none || right.level == Level::none || left.level == right.level) continue;
    const double rho = detail::radius_at(curve, c, 0.5 * (left.t + right.t));
    if (!(rho > r && rho < big_r)) continue;
    report.intervals.push_back(
        {left.t, right.t, left.level == Level::inner ? Direction::outward : Direction::inward});
  }
  return report;
}

/// Number of crossings of a γ[a, b] trace that meets at least one face.
inline std::size_t crossings_hitting(const Polyline& curve, const Annulus& ann,
                                     std::span<const AlignedFace> faces) {
  for (const AlignedFace& f : faces)
    require(f.dim() == curve.dim(), ErrorCode::dimension_mismatch, "face and curve dimensions differ");
  const CrossingReport report = find_crossings(curve, ann);
  std::size_t hits = 0;
  for (const CrossingInterval& iv : report.intervals) {
    const Polyline piece = curve.slice(iv.a, iv.b);
    if (std::any_of(faces.begin(), faces.end(),
                    [&](const AlignedFace& f) { return polyline_face_intersects(piece, f); }))
      ++hits;
  }
  return hits;
}

namespace detail {

/// First time in the open interval (a, b) where ρ equals `radius`.
inline std::optional<double> first_level_time(const Polyline& curve, const Point& center, double radius,
                                              double a, double b) {
  const std::size_t seg_a = curve.locate(a).first;
  for (std::size_t i = seg_a; i < curve.num_segments(); ++i) {
    if (curve.times()[i] >= b) break;
    const auto hits = sphere_hits(curve.vertex(i), curve.vertex(i + 1), center, radius);
    for (std::size_t h = 0; h < hits.count; ++h) {
      const double t = curve.global_time(i, hits.t[h]);
      if (t > a && t < b) return t;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Times 0 = s_0 < s_1 < ... < s_n < s_{n+1} = 1 with n = number of
/// crossings, such that no γ[s_j, s_{j+1}] crosses. Each s_j is placed where
/// the j-th crossing meets the mid-radius sphere.
inline std::vector<double> separating_times(const Polyline& curve, const Annulus& ann) {
  const CrossingReport report = find_crossings(curve, ann);
  std::vector<double> times{0.0};
  for (const CrossingInterval& iv : report.intervals) {
    const auto t = detail::first_level_time(curve, ann.center(), ann.mid_radius(), iv.a, iv.b);
    times.push_back(t.value_or(0.5 * (iv.a + iv.b)));
  }
  times.push_back(1.0);
  return times;
}

/// Whether `times` is a strictly increasing sequence from 0 to 1 none of
/// whose pieces crosses the annulus.
inline bool verify_separating(const Polyline& curve, const Annulus& ann, std::span<const double> times) {
  if (times.size() < 2 || times.front() != 0.0 || times.back() != 1.0) return false;
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    if (!(times[j] < times[j + 1])) return false;
    if (find_crossings(curve.slice(times[j], times[j + 1]), ann).count() != 0) return false;
  }
  return true;
}

/// δ > 0 such that every curve within uniform distance δ of `curve` crosses
/// `ann` at most as often. Each piece of the separating decomposition keeps
/// away from one boundary sphere (the inner one when it misses it, else the
/// outer one); δ is the smallest such clearance.
inline double stability_radius(const Polyline& curve, const Annulus& ann) {
  const std::vector<double> times = separating_times(curve, ann);
  double delta = std::numeric_limits<double>::infinity();
  auto clearance = [](const Interval& range, double sphere) {
    if (range.contains(sphere)) return 0.0;
    return sphere < range.lo ? range.lo - sphere : sphere - range.hi;
  };
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    const Interval range = radial_range(curve.slice(times[j], times[j + 1]), ann.center());
    const double to_inner = clearance(range, ann.inner());
    const double piece = to_inner > 0.0 ? to_inner : clearance(range, ann.outer());
    delta = std::min(delta, piece);
  }
  require(delta > 0.0, ErrorCode::non_generic_input,
          "curve touches both boundary spheres within one separating piece");
  return delta;
}

}  // namespace rcurves
