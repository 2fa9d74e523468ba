#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

#include "rcurves/error.hpp"
#include "rcurves/geometry.hpp"

namespace rcurves {

enum class MetricMethod { decision_search, discrete_upper_bound, bottleneck_search };

constexpr std::string_view to_string(MetricMethod m) {
  switch (m) {
    case MetricMethod::decision_search: return "exact-decision-search";
    case MetricMethod::discrete_upper_bound: return "discrete-upper-bound";
    case MetricMethod::bottleneck_search: return "bottleneck-search";
  }
  return "unknown";
}

/// A distance certified to lie in [value - tolerance, value + tolerance]
/// (or, for the discrete upper bound, to be at least the true distance).
struct MetricResult {
  double value = 0.0;
  double tolerance = 0.0;
  MetricMethod method = MetricMethod::decision_search;
};

namespace detail {

inline void require_matching_dims(const Polyline& a, const Polyline& b) {
  require(a.dim() == b.dim(), ErrorCode::dimension_mismatch,
          "curve dimensions differ: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
}

/// A single-point curve takes part in free-space computations as a
/// zero-length segment.
inline std::vector<Point> as_path(const Polyline& c) {
  std::vector<Point> v = c.vertices();
  if (v.size() == 1) v.push_back(v.front());
  return v;
}

/// {s in [0, 1] : |p + s (q - p) - c| <= eps}; empty when lo > hi.
inline Interval free_interval(const Point& c, const Point& p, const Point& q, double eps) {
  constexpr Interval empty{1.0, 0.0};
  const double a = squared_distance(p, q);
  if (a == 0.0) return squared_distance(p, c) <= eps * eps ? Interval{0.0, 1.0} : empty;
  double fd = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) fd += (p[i] - c[i]) * (q[i] - p[i]);
  const double s_star = -fd / a;
  double h2 = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double w = (p[i] - c[i]) + s_star * (q[i] - p[i]);
    h2 += w * w;
  }
  if (h2 > eps * eps) return empty;
  const double half = std::sqrt(eps * eps - h2) / std::sqrt(a);
  const double lo = std::max(0.0, s_star - half);
  const double hi = std::min(1.0, s_star + half);
  return lo <= hi ? Interval{lo, hi} : empty;
}

inline bool is_empty(const Interval& iv) { return iv.lo > iv.hi; }

}  // namespace detail

/// Bottleneck cost of the best monotone coupling of the two vertex
/// sequences. An upper bound on the continuous distance.
inline double discrete_frechet(const Polyline& a, const Polyline& b) {
  detail::require_matching_dims(a, b);
  const auto& p = a.vertices();
  const auto& q = b.vertices();
  const std::size_t n = p.size();
  const std::size_t m = q.size();
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = distance(p[i], q[j]);
      double best;
      if (i == 0 && j == 0) best = 0.0;
      else if (i == 0) best = cur[j - 1];
      else if (j == 0) best = prev[j];
      else best = std::min({prev[j], prev[j - 1], cur[j - 1]});
      cur[j] = std::max(best, d);
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

/// Whether the curves are within uniform distance `t` under some monotone
/// reparametrization (closed test), decided by reachability through the
/// free-space diagram.
inline bool frechet_decision(const Polyline& a, const Polyline& b, double t) {
  detail::require_matching_dims(a, b);
  require(t >= 0.0, ErrorCode::invalid_argument, "decision threshold must be nonnegative");
  const double eps = t * (1.0 + kGeomTolerance);
  const std::vector<Point> p = detail::as_path(a);
  const std::vector<Point> q = detail::as_path(b);
  if (distance(p.front(), q.front()) > eps || distance(p.back(), q.back()) > eps) return false;

  const std::size_t n = p.size();  // vertices of a; cells along a: n - 1
  const std::size_t m = q.size();
  constexpr Interval empty{1.0, 0.0};
  // left[i][j]: reachable part of the edge {a-vertex i} x {b-segment j}.
  // bottom[i][j]: reachable part of the edge {a-segment i} x {b-vertex j}.
  std::vector<std::vector<Interval>> left(n, std::vector<Interval>(m - 1, empty));
  std::vector<std::vector<Interval>> bottom(n - 1, std::vector<Interval>(m, empty));

  bool open = true;
  for (std::size_t j = 0; j + 1 < m && open; ++j) {
    const Interval f = detail::free_interval(p[0], q[j], q[j + 1], eps);
    if (detail::is_empty(f) || f.lo > 0.0) break;
    left[0][j] = f;
    open = f.hi >= 1.0;
  }
  open = true;
  for (std::size_t i = 0; i + 1 < n && open; ++i) {
    const Interval f = detail::free_interval(q[0], p[i], p[i + 1], eps);
    if (detail::is_empty(f) || f.lo > 0.0) break;
    bottom[i][0] = f;
    open = f.hi >= 1.0;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const Interval& in_left = left[i][j];
      const Interval& in_bottom = bottom[i][j];
      const bool from_left = !detail::is_empty(in_left);
      const bool from_bottom = !detail::is_empty(in_bottom);
      if (!from_left && !from_bottom) continue;

      const Interval right_free = detail::free_interval(p[i + 1], q[j], q[j + 1], eps);
      if (!detail::is_empty(right_free)) {
        Interval reach = right_free;
        if (!from_bottom) reach.lo = std::max(reach.lo, in_left.lo);
        if (reach.lo <= reach.hi) left[i + 1][j] = reach;
      }
      const Interval top_free = detail::free_interval(q[j + 1], p[i], p[i + 1], eps);
      if (!detail::is_empty(top_free)) {
        Interval reach = top_free;
        if (!from_left) reach.lo = std::max(reach.lo, in_bottom.lo);
        if (reach.lo <= reach.hi) bottom[i][j + 1] = reach;
      }
    }
  }
  return !detail::is_empty(left[n - 1][m - 2]) || !detail::is_empty(bottom[n - 2][m - 1]);
}

/// The uniform distance between unparametrized curves, bracketed by
/// bisection between the endpoint lower bound and the discrete upper bound.
inline MetricResult curve_distance(const Polyline& a, const Polyline& b, double tol) {
  detail::require_matching_dims(a, b);
  require(tol > 0.0, ErrorCode::invalid_argument, "tolerance must be positive");
  double lo = std::max(distance(a.front(), b.front()), distance(a.back(), b.back()));
  double hi = discrete_frechet(a, b);
  while (hi - lo > 2.0 * tol) {
    const double mid = 0.5 * (lo + hi);
    if (frechet_decision(a, b, mid)) hi = mid;
    else lo = mid;
  }
  return {0.5 * (lo + hi), tol, MetricMethod::decision_search};
}

}  // namespace rcurves
