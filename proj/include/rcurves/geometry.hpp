#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcurves/error.hpp"

namespace rcurves {

/// Relative tolerance for tangency and on-sphere classification.
inline constexpr double kGeomTolerance = 1e-12;

class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> coords) : coords_(coords) {}
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}
  static Point zeros(std::size_t dim) { return Point(std::vector<double>(dim, 0.0)); }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }

  bool finite() const {
    return std::all_of(coords_.begin(), coords_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

inline void require_same_dim(const Point& a, const Point& b) {
  require(a.dim() == b.dim(), ErrorCode::dimension_mismatch,
          "point dimensions differ: " + std::to_string(a.dim()) + " vs " +
              std::to_string(b.dim()));
}

inline double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double distance(const Point& a, const Point& b) {
  return std::sqrt(squared_distance(a, b));
}

inline double norm(const Point& a) {
  double s = 0.0;
  for (double v : a.coords()) s += v * v;
  return std::sqrt(s);
}

/// p + s (q - p)
inline Point lerp(const Point& p, const Point& q, double s) {
  std::vector<double> c(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) c[i] = p[i] + s * (q[i] - p[i]);
  return Point(std::move(c));
}

/// A compact curve as a vertex list, parametrized proportionally to arc length
/// over [0, 1]. Consecutive duplicate vertices are collapsed on construction.
class Polyline {
 public:
  explicit Polyline(std::vector<Point> vertices) {
    require(!vertices.empty(), ErrorCode::invalid_argument, "polyline needs at least one vertex");
    const std::size_t d = vertices.front().dim();
    require(d >= 1, ErrorCode::invalid_argument, "points need at least one coordinate");
    for (const Point& v : vertices) {
      require(v.dim() == d, ErrorCode::dimension_mismatch, "polyline vertices differ in dimension");
      require(v.finite(), ErrorCode::invalid_argument, "polyline vertex has a non-finite coordinate");
    }
    vertices_.reserve(vertices.size());
    for (Point& v : vertices) {
      if (vertices_.empty() || !(vertices_.back() == v)) vertices_.push_back(std::move(v));
    }
    times_.assign(vertices_.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
      total += distance(vertices_[i - 1], vertices_[i]);
      times_[i] = total;
    }
    length_ = total;
    if (vertices_.size() > 1) {
      for (double& t : times_) t /= total;
      times_.back() = 1.0;
    }
  }

  Polyline(std::initializer_list<Point> vertices) : Polyline(std::vector<Point>(vertices)) {}

  std::size_t dim() const { return vertices_.front().dim(); }
  std::size_t size() const { return vertices_.size(); }
  std::size_t num_segments() const { return vertices_.size() - 1; }
  bool single_point() const { return vertices_.size() == 1; }
  double length() const { return length_; }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(std::size_t i) const { return vertices_[i]; }
  const Point& front() const { return vertices_.front(); }
  const Point& back() const { return vertices_.back(); }
  /// Arc-length fraction of each vertex; 0 for the first, 1 for the last.
  std::span<const double> times() const { return times_; }

  double global_time(std::size_t segment, double u) const {
    if (u <= 0.0) return times_[segment];
    if (u >= 1.0) return times_[segment + 1];
    return times_[segment] + u * (times_[segment + 1] - times_[segment]);
  }

  /// Segment index and local parameter in [0, 1] of global time t.
  std::pair<std::size_t, double> locate(double t) const {
    if (single_point()) return {0, 0.0};
    t = std::clamp(t, 0.0, 1.0);
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t seg = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    seg = std::min(seg, num_segments() - 1);
    const double span = times_[seg + 1] - times_[seg];
    double u = span > 0.0 ? (t - times_[seg]) / span : 0.0;
    return {seg, std::clamp(u, 0.0, 1.0)};
  }

  Point at(double t) const {
    if (single_point()) return vertices_.front();
    if (t <= 0.0) return vertices_.front();
    if (t >= 1.0) return vertices_.back();
    const auto [seg, u] = locate(t);
    if (u == 0.0) return vertices_[seg];
    if (u == 1.0) return vertices_[seg + 1];
    return lerp(vertices_[seg], vertices_[seg + 1], u);
  }

  /// The restriction to [t0, t1], reparametrized by its own arc length.
  Polyline slice(double t0, double t1) const {
    require(0.0 <= t0 && t0 <= t1 && t1 <= 1.0, ErrorCode::invalid_argument,
            "slice bounds must satisfy 0 <= t0 <= t1 <= 1");
    std::vector<Point> out;
    out.push_back(at(t0));
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (times_[i] > t0 && times_[i] < t1) out.push_back(vertices_[i]);
    }
    out.push_back(at(t1));
    return Polyline(std::move(out));
  }

  friend bool operator==(const Polyline& a, const Polyline& b) { return a.vertices_ == b.vertices_; }

 private:
  std::vector<Point> vertices_;
  std::vector<double> times_;
  double length_ = 0.0;
};

/// Maximum pairwise vertex distance; on a polyline this is the diameter of
/// the whole trace.
inline double diameter(const Polyline& curve) {
  double best = 0.0;
  const auto& v = curve.vertices();
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, squared_distance(v[i], v[j]));
  return std::sqrt(best);
}

/// The open annulus A_{r,R}(x) = { y : r < |y - x| < R }.
class Annulus {
 public:
  Annulus(Point center, double inner, double outer)
      : center_(std::move(center)), inner_(inner), outer_(outer) {
    require(center_.dim() >= 1 && center_.finite(), ErrorCode::invalid_argument,
            "annulus center must be a finite point");
    require(std::isfinite(inner_) && std::isfinite(outer_) && 0.0 < inner_ && inner_ < outer_,
            ErrorCode::invalid_argument, "annulus radii must satisfy 0 < inner < outer");
  }

  const Point& center() const { return center_; }
  double inner() const { return inner_; }
  double outer() const { return outer_; }
  double mid_radius() const { return 0.5 * (inner_ + outer_); }
  std::size_t dim() const { return center_.dim(); }

 private:
  Point center_;
  double inner_;
  double outer_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A closed axis-aligned (d-1)-dimensional box lying in the hyperplane
/// {y : y[fixed_axis] = fixed_value}. `bounds` lists the free axes in
/// increasing axis order.
class AlignedFace {
 public:
  AlignedFace(std::size_t dim, std::size_t fixed_axis, double fixed_value, std::vector<Interval> bounds)
      : dim_(dim), axis_(fixed_axis), value_(fixed_value), bounds_(std::move(bounds)) {
    require(dim_ >= 1 && axis_ < dim_, ErrorCode::invalid_argument, "face axis out of range");
    require(bounds_.size() + 1 == dim_, ErrorCode::invalid_argument, "face needs dim-1 bounds");
    for (const Interval& b : bounds_)
      require(b.lo <= b.hi, ErrorCode::invalid_argument, "face interval must satisfy lo <= hi");
  }

  std::size_t dim() const { return dim_; }
  std::size_t fixed_axis() const { return axis_; }
  double fixed_value() const { return value_; }
  const std::vector<Interval>& bounds() const { return bounds_; }

  /// Extent along any of the d axes (degenerate on the fixed axis).
  Interval extent(std::size_t axis) const {
    if (axis == axis_) return {value_, value_};
    return bounds_[axis < axis_ ? axis : axis - 1];
  }

  Point center() const {
    std::vector<double> c(dim_);
    for (std::size_t a = 0; a < dim_; ++a) c[a] = extent(a).mid();
    return Point(std::move(c));
  }

  double diameter() const {
    double s = 0.0;
    for (const Interval& b : bounds_) s += b.width() * b.width();
    return std::sqrt(s);
  }

  bool contains(const Point& p) const {
    for (std::size_t a = 0; a < dim_; ++a)
      if (!extent(a).contains(p[a])) return false;
    return true;
  }

  bool contains(const AlignedFace& other) const {
    if (other.axis_ != axis_ || other.value_ != value_) return false;
    for (std::size_t i = 0; i < bounds_.size(); ++i)
      if (other.bounds_[i].lo < bounds_[i].lo || other.bounds_[i].hi > bounds_[i].hi) return false;
    return true;
  }

  /// The 2^{d-1} closed halves obtained by bisecting every free axis. Child
  /// order is binary in the free axes (bit i set = upper half of free axis i).
  std::vector<AlignedFace> subdivide() const {
    const std::size_t free_axes = bounds_.size();
    std::vector<AlignedFace> out;
    out.reserve(std::size_t{1} << free_axes);
    for (std::size_t mask = 0; mask < (std::size_t{1} << free_axes); ++mask) {
      std::vector<Interval> child(free_axes);
      for (std::size_t i = 0; i < free_axes; ++i) {
        const double m = bounds_[i].mid();
        child[i] = (mask >> i) & 1U ? Interval{m, bounds_[i].hi} : Interval{bounds_[i].lo, m};
      }
      out.emplace_back(dim_, axis_, value_, std::move(child));
    }
    return out;
  }

 private:
  std::size_t dim_;
  std::size_t axis_;
  double value_;
  std::vector<Interval> bounds_;
};

namespace detail {

struct SphereHits {
  std::array<double, 2> t{};
  std::size_t count = 0;
  bool tangent = false;
};

/// Parameters s in [0, 1] with |p + s (q - p) - c| = radius. Uses the
/// closest-approach form, which stays accurate near tangency.
inline SphereHits sphere_hits(const Point& p, const Point& q, const Point& c, double radius) {
  SphereHits out;
  const std::size_t d = p.dim();
  double a = 0.0;
  double fd = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double di = q[i] - p[i];
    a += di * di;
    fd += (p[i] - c[i]) * di;
  }
  const double s_star = -fd / a;
  double h2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double w = (p[i] - c[i]) + s_star * (q[i] - p[i]);
    h2 += w * w;
  }
  const double h = std::sqrt(h2);
  auto keep = [&](double s) {
    constexpr double slack = 1e-12;
    if (s < -slack || s > 1.0 + slack) return;
    out.t[out.count++] = std::clamp(s, 0.0, 1.0);
  };
  if (std::abs(h - radius) <= kGeomTolerance * radius) {
    out.tangent = true;
    keep(s_star);
    return out;
  }
  if (h > radius) return out;
  const double half = std::sqrt((radius - h) * (radius + h)) / std::sqrt(a);
  keep(s_star - half);
  keep(s_star + half);
  return out;
}

/// Range of |y - c| over the closed segment [p, q].
inline Interval radial_range(const Point& p, const Point& q, const Point& c) {
  const double dp = distance(p, c);
  const double dq = distance(q, c);
  const double a = squared_distance(p, q);
  double lo = std::min(dp, dq);
  if (a > 0.0) {
    double fd = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) fd += (p[i] - c[i]) * (q[i] - p[i]);
    const double s = -fd / a;
    if (s > 0.0 && s < 1.0) lo = std::min(lo, distance(lerp(p, q, s), c));
  }
  return {lo, std::max(dp, dq)};
}

}  // namespace detail

/// Sorted parameters t in [0, 1] at which the segment meets the sphere
/// |y - center| = radius. A tangency is reported as one parameter.
inline std::vector<double> segment_sphere_hits(const Point& p, const Point& q, const Point& center,
                                               double radius) {
  require_same_dim(p, q);
  require_same_dim(p, center);
  require(radius > 0.0, ErrorCode::invalid_argument, "sphere radius must be positive");
  require(!(p == q), ErrorCode::zero_length_segment, "zero-length segment");
  const auto hits = detail::sphere_hits(p, q, center, radius);
  std::vector<double> out(hits.t.begin(), hits.t.begin() + static_cast<std::ptrdiff_t>(hits.count));
  std::sort(out.begin(), out.end());
  if (out.size() == 2 && out[0] == out[1]) out.pop_back();
  return out;
}

/// Whether the closed segment [p, q] meets the closed face.
inline bool segment_face_intersects(const Point& p, const Point& q, const AlignedFace& face) {
  require_same_dim(p, q);
  require(p.dim() == face.dim(), ErrorCode::dimension_mismatch, "face and segment dimensions differ");
  double s_lo = 0.0;
  double s_hi = 1.0;
  for (std::size_t axis = 0; axis < p.dim(); ++axis) {
    const Interval box = face.extent(axis);
    const double dir = q[axis] - p[axis];
    if (dir == 0.0) {
      if (!box.contains(p[axis])) return false;
      continue;
    }
    double s0 = (box.lo - p[axis]) / dir;
    double s1 = (box.hi - p[axis]) / dir;
    if (s0 > s1) std::swap(s0, s1);
    s_lo = std::max(s_lo, s0);
    s_hi = std::min(s_hi, s1);
    if (s_lo > s_hi) return false;
  }
  return true;
}

inline bool polyline_face_intersects(const Polyline& curve, const AlignedFace& face) {
  if (curve.single_point()) return face.contains(curve.front());
  for (std::size_t i = 0; i < curve.num_segments(); ++i)
    if (segment_face_intersects(curve.vertex(i), curve.vertex(i + 1), face)) return true;
  return false;
}

/// Range of |γ(t) - c| over the whole curve.
inline Interval radial_range(const Polyline& curve, const Point& c) {
  if (curve.single_point()) {
    const double r = distance(curve.front(), c);
    return {r, r};
  }
  Interval out{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < curve.num_segments(); ++i) {
    const Interval seg = detail::radial_range(curve.vertex(i), curve.vertex(i + 1), c);
    out.lo = std::min(out.lo, seg.lo);
    out.hi = std::max(out.hi, seg.hi);
  }
  return out;
}

}  // namespace rcurves
