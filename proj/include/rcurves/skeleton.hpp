#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "rcurves/collection.hpp"
#include "rcurves/crossings.hpp"
#include "rcurves/error.hpp"
#include "rcurves/geometry.hpp"
#include "rcurves/nets.hpp"
#include "rcurves/parallel.hpp"

namespace rcurves {

/// Anchors x_1..x_m (net points) and times t_0 = 0 < t_1 < ... < t_m = 1.
/// Piece j (1-based) is γ[t_{j-1}, t_j], paired with the segment from
/// x_{j-1} to x_j, where x_0 = x_1.
struct Skeleton {
  std::vector<std::size_t> anchor_indices;
  std::vector<Point> anchors;
  std::vector<double> times;

  std::size_t m() const { return anchors.size(); }
};

struct SkeletonResult {
  Skeleton skeleton;
  Polyline coarse;  // straight segments through x_1, ..., x_m
};

namespace detail {

/// First t > t0 with |γ(t) - c| = radius, given |γ(t0) - c| < radius.
inline std::optional<double> first_exit(const Polyline& curve, const Point& c, double radius, double t0) {
  if (curve.single_point()) return std::nullopt;
  const std::size_t first = curve.locate(t0).first;
  for (std::size_t i = first; i < curve.num_segments(); ++i) {
    const auto hits = sphere_hits(curve.vertex(i), curve.vertex(i + 1), c, radius);
    for (std::size_t h = 0; h < hits.count; ++h) {
      const double t = curve.global_time(i, hits.t[h]);
      if (t > t0) return t;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Coarse-grains `curve` at net scale 1/k: each anchor is the order-least
/// nearest net point to the current position, and the next time is the
/// first exit from the 2/k-ball around that anchor. The result is within
/// uniform distance 11/k of the curve.
inline SkeletonResult skeletonize(const Polyline& curve, const Net& net, int k) {
  require(k >= 1, ErrorCode::invalid_argument, "k must be a positive integer");
  require(!net.empty(), ErrorCode::invalid_argument, "net is empty");
  require(net.dim() == curve.dim(), ErrorCode::dimension_mismatch, "net and curve dimensions differ");
  const double scale = 1.0 / static_cast<double>(k);
  Skeleton sk;
  sk.times.push_back(0.0);
  double t = 0.0;
  while (true) {
    const Point here = curve.at(t);
    const std::size_t idx = argmin_cell(here, net);
    const double gap = distance(here, net.points[idx]);
    if (gap > scale * (1.0 + kGeomTolerance) + kGeomTolerance)
      throw Error(ErrorCode::density_violation,
                  "net is not " + std::to_string(scale) + "-dense at curve time " + std::to_string(t) +
                      " (nearest net point at distance " + std::to_string(gap) + ")");
    sk.anchor_indices.push_back(idx);
    sk.anchors.push_back(net.points[idx]);
    const auto exit = detail::first_exit(curve, net.points[idx], 2.0 * scale, t);
    // An exit exactly at the end point leaves nothing to cover; the last
    // piece then already lies in the closed 2/k-ball.
    if (!exit || *exit >= 1.0) break;
    sk.times.push_back(*exit);
    t = *exit;
  }
  sk.times.push_back(1.0);
  Polyline coarse(sk.anchors);
  return {std::move(sk), std::move(coarse)};
}

/// Distances between consecutive anchors x_{j-1}, x_j for j = 2..m.
inline std::vector<double> anchor_gaps(const Skeleton& sk) {
  std::vector<double> out;
  for (std::size_t j = 1; j < sk.anchors.size(); ++j) out.push_back(distance(sk.anchors[j - 1], sk.anchors[j]));
  return out;
}

/// Both sides of the anchor budget m <= N |net|, where N is the largest
/// crossing count of the annuli A(x; 1/k, 2/k) over net points x.
struct AnchorBudget {
  std::size_t anchors = 0;
  std::size_t max_crossings = 0;
  std::size_t net_size = 0;

  std::size_t bound() const { return max_crossings * net_size; }
  bool holds() const { return anchors <= bound(); }
};

inline AnchorBudget anchor_budget(const Polyline& curve, const Net& net, int k) {
  const SkeletonResult res = skeletonize(curve, net, k);
  const double scale = 1.0 / static_cast<double>(k);
  AnchorBudget b{res.skeleton.m(), 0, net.size()};
  for (const Point& x : net.points)
    b.max_crossings = std::max(b.max_crossings, find_crossings(curve, Annulus(x, scale, 2.0 * scale)).count());
  return b;
}

/// Drops curves of diameter <= 4/k and replaces the rest by their
/// skeletons; the result is within collection distance 11/k.
inline CurveCollection coarsen_collection(const CurveCollection& coll, const Net& net, int k,
                                          std::size_t threads = 1) {
  require(k >= 1, ErrorCode::invalid_argument, "k must be a positive integer");
  const CurveCollection kept = filter_macroscopic(coll, 4.0 / static_cast<double>(k));
  const auto coarse = parallel_map(kept.size(), threads,
                                   [&](std::size_t i) { return skeletonize(kept[i].curve, net, k).coarse; });
  CurveCollection out;
  for (std::size_t i = 0; i < kept.size(); ++i) out.add(coarse[i], kept[i].multiplicity, kept[i].id);
  return out;
}

}  // namespace rcurves
