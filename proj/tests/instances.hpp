#pragma once

// Random test instances, drawn with the standard library generator so the
// tests do not depend on the library's own sampling code.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "rcurves/collection.hpp"
#include "rcurves/geometry.hpp"

namespace inst {

using rcurves::Point;
using rcurves::Polyline;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Point random_point(Rng& rng, std::size_t dim, double lo = -1.0, double hi = 1.0) {
  Point p = Point::zeros(dim);
  for (std::size_t i = 0; i < dim; ++i) p[i] = uniform(rng, lo, hi);
  return p;
}

/// Gaussian-step walk with `vertices` vertices and overall size about `scale`.
inline Polyline random_polyline(Rng& rng, std::size_t dim, std::size_t vertices, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale / std::sqrt(static_cast<double>(vertices)));
  std::vector<Point> v{random_point(rng, dim, -0.5 * scale, 0.5 * scale)};
  while (v.size() < vertices) {
    Point p = v.back();
    for (std::size_t i = 0; i < dim; ++i) p[i] += g(rng);
    v.push_back(p);
  }
  return Polyline(std::move(v));
}

/// Annulus centered near the curve with radii on the curve's scale.
inline rcurves::Annulus random_annulus(Rng& rng, const Polyline& curve) {
  const Point& anchor = curve.vertex(pick(rng, 0, curve.size() - 1));
  Point c = anchor;
  for (std::size_t i = 0; i < c.dim(); ++i) c[i] += uniform(rng, -0.2, 0.2);
  const double r = uniform(rng, 0.02, 0.3);
  const double big_r = r + uniform(rng, 0.02, 0.5);
  return rcurves::Annulus(c, r, big_r);
}

inline Polyline perturbed(Rng& rng, const Polyline& curve, double bound) {
  std::vector<Point> v;
  for (const Point& p : curve.vertices()) {
    Point u = Point::zeros(p.dim());
    std::normal_distribution<double> g;
    double n = 0.0;
    while (n == 0.0) {
      for (std::size_t i = 0; i < p.dim(); ++i) u[i] = g(rng);
      n = rcurves::norm(u);
    }
    const double len = bound * uniform(rng, 0.0, 1.0);
    Point q = p;
    for (std::size_t i = 0; i < p.dim(); ++i) q[i] += len * u[i] / n;
    v.push_back(q);
  }
  return Polyline(std::move(v));
}

inline rcurves::CurveCollection random_collection(Rng& rng, std::size_t dim, std::size_t max_curves,
                                                  std::size_t max_vertices, std::size_t max_mult = 1) {
  rcurves::CurveCollection out;
  const std::size_t n = pick(rng, 0, max_curves);
  for (std::size_t c = 0; c < n; ++c)
    out.add(random_polyline(rng, dim, pick(rng, 2, max_vertices), uniform(rng, 0.2, 1.5)), pick(rng, 1, max_mult));
  return out;
}

}  // namespace inst
