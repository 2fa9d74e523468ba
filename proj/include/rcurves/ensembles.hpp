#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "rcurves/collection.hpp"
#include "rcurves/error.hpp"
#include "rcurves/geometry.hpp"
#include "rcurves/random.hpp"

namespace rcurves {

enum class EnsembleKind { random_walk, brownian_bridge, pathological, loop_collection, radial, fan };

inline constexpr std::string_view to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::random_walk: return "random-walk";
    case EnsembleKind::brownian_bridge: return "brownian-bridge";
    case EnsembleKind::pathological: return "pathological";
    case EnsembleKind::loop_collection: return "loop-collection";
    case EnsembleKind::radial: return "radial";
    case EnsembleKind::fan: return "fan";
  }
  return "unknown";
}

inline EnsembleKind parse_ensemble_kind(std::string_view s) {
  for (auto k : {EnsembleKind::random_walk, EnsembleKind::brownian_bridge, EnsembleKind::pathological,
                 EnsembleKind::loop_collection, EnsembleKind::radial, EnsembleKind::fan})
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::schema_error, "unknown ensemble kind '" + std::string(s) + "'");
}

/// Parameters of a seeded curve ensemble. Which fields matter depends on
/// the kind:
///   random-walk, brownian-bridge: steps, dim, scale, num_curves, center
///   pathological: grid_size, perturb_bound (0 = unperturbed), scale
///   loop-collection: num_curves, steps, dim, alpha, min/max_diameter, box
///   radial: center, inner, outer, num_curves (uniform directions)
///   fan: center, inner, outer, target, spread, num_curves
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::random_walk;
  std::uint64_t seed = 0;
  std::size_t steps = 64;
  std::size_t dim = 2;
  double scale = 1.0;
  std::size_t grid_size = 64;
  double perturb_bound = 0.0;
  std::size_t num_curves = 1;
  double alpha = 2.0;
  double min_diameter = 0.05;
  double max_diameter = 1.0;
  double box = 1.0;
  std::vector<double> center;
  double inner = 1.0;
  double outer = 2.0;
  std::vector<double> target;
  double spread = 0.1;

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

namespace detail {

inline Point random_direction(Philox& rng, std::size_t dim) {
  while (true) {
    Point u = Point::zeros(dim);
    for (std::size_t i = 0; i < dim; ++i) u[i] = rng.normal();
    const double n = norm(u);
    if (n > 1e-12) {
      for (std::size_t i = 0; i < dim; ++i) u[i] /= n;
      return u;
    }
  }
}

inline Point offset(const Point& c, const Point& u, double s) {
  Point p = c;
  for (std::size_t i = 0; i < c.dim(); ++i) p[i] += s * u[i];
  return p;
}

inline Point center_or_origin(const std::vector<double>& c, std::size_t dim) {
  if (c.empty()) return Point::zeros(dim);
  require(c.size() == dim, ErrorCode::dimension_mismatch, "ensemble center has the wrong dimension");
  return Point(c);
}

inline std::vector<Point> random_walk_vertices(Philox& rng, std::size_t steps, std::size_t dim, double scale,
                                               const Point& start) {
  const double step = scale / std::sqrt(static_cast<double>(steps));
  std::vector<Point> v{start};
  Point p = start;
  for (std::size_t s = 0; s < steps; ++s) {
    const auto axis = static_cast<std::size_t>(rng.below(dim));
    p[axis] += (rng.next_u32() & 1U) ? step : -step;
    v.push_back(p);
  }
  return v;
}

/// Closed lattice loop: `half` random axis steps followed by their
/// reversals, shuffled (Fisher–Yates).
inline std::vector<Point> lattice_loop(Philox& rng, std::size_t half, std::size_t dim) {
  std::vector<std::pair<std::size_t, int>> moves;
  for (std::size_t s = 0; s < half; ++s) {
    const auto axis = static_cast<std::size_t>(rng.below(dim));
    const int sign = (rng.next_u32() & 1U) ? 1 : -1;
    moves.push_back({axis, sign});
    moves.push_back({axis, -sign});
  }
  for (std::size_t i = moves.size(); i > 1; --i) std::swap(moves[i - 1], moves[rng.below(i)]);
  std::vector<Point> v{Point::zeros(dim)};
  Point p = Point::zeros(dim);
  for (const auto& [axis, sign] : moves) {
    p[axis] += sign;
    v.push_back(p);
  }
  return v;
}

}  // namespace detail

/// Simple random walk with ±1 steps along a uniformly chosen axis, scaled
/// by steps^{-1/2} so that the end point has unit mean square norm.
inline Polyline random_walk_polyline(std::size_t steps, std::size_t dim, std::uint64_t seed,
                                     std::uint64_t stream = 0) {
  require(steps >= 1 && dim >= 1, ErrorCode::invalid_argument, "random walk needs steps >= 1 and dim >= 1");
  Philox rng(seed, stream);
  return Polyline(detail::random_walk_vertices(rng, steps, dim, 1.0, Point::zeros(dim)));
}

/// Gaussian random walk pinned to return to its start after `steps` steps.
inline Polyline brownian_bridge_polyline(std::size_t steps, std::size_t dim, std::uint64_t seed,
                                         std::uint64_t stream = 0) {
  require(steps >= 2 && dim >= 1, ErrorCode::invalid_argument, "bridge needs steps >= 2 and dim >= 1");
  Philox rng(seed, stream);
  const double sd = 1.0 / std::sqrt(static_cast<double>(steps));
  std::vector<Point> w{Point::zeros(dim)};
  for (std::size_t s = 0; s < steps; ++s) {
    Point p = w.back();
    for (std::size_t i = 0; i < dim; ++i) p[i] += sd * rng.normal();
    w.push_back(p);
  }
  const Point end = w.back();
  for (std::size_t s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(steps);
    for (std::size_t i = 0; i < dim; ++i) w[s][i] -= t * end[i];
  }
  return Polyline(std::move(w));
}

/// γ(t) = |t sin(1/t)| e^{it} for t in (0, 1], γ(0) = 0, as a point of ℝ².
inline Point pathological_point(double t) {
  if (t == 0.0) return Point{0.0, 0.0};
  const double rho = std::abs(t * std::sin(1.0 / t));
  return Point{rho * std::cos(t), rho * std::sin(t)};
}

/// Polyline through γ(0) = 0 and γ(t) for t = 1 and t = 4 / (mπ),
/// m = n_t, ..., 2: uniform quarter-arch steps in 1/t, so every arch of
/// |t sin(1/t)| with 1/t ≤ n_t π / 4 gets four segments.
inline Polyline pathological_curve(std::size_t n_t) {
  require(n_t >= 8, ErrorCode::invalid_argument, "pathological curve needs grid size >= 8");
  std::vector<Point> v{pathological_point(0.0)};
  for (std::size_t m = n_t; m >= 2; --m)
    v.push_back(pathological_point(4.0 / (static_cast<double>(m) * std::numbers::pi)));
  v.push_back(pathological_point(1.0));
  return Polyline(std::move(v));
}

/// Moves every vertex by a random vector of length strictly below `bound`.
inline Polyline perturb_curve(const Polyline& curve, double bound, std::uint64_t seed, std::uint64_t stream = 0) {
  require(bound > 0.0, ErrorCode::invalid_argument, "perturbation bound must be positive");
  Philox rng(seed, stream);
  std::vector<Point> v;
  for (const Point& p : curve.vertices()) {
    const Point u = detail::random_direction(rng, p.dim());
    v.push_back(detail::offset(p, u, bound * rng.uniform()));
  }
  return Polyline(std::move(v));
}

/// Independent lattice loops rescaled to diameters drawn from a Pareto law
/// with tail exponent alpha, truncated to [min_diameter, max_diameter], and
/// translated uniformly into [0, box]^dim.
inline CurveCollection loop_collection(std::size_t num_curves, double alpha, double min_diameter,
                                       double max_diameter, std::size_t steps, std::size_t dim, double box,
                                       std::uint64_t seed) {
  require(alpha > 0.0 && min_diameter > 0.0 && max_diameter >= min_diameter, ErrorCode::invalid_argument,
          "invalid diameter law");
  require(steps >= 2 && dim >= 1 && box >= 0.0, ErrorCode::invalid_argument, "invalid loop parameters");
  CurveCollection out;
  const double tail = 1.0 - std::pow(min_diameter / max_diameter, alpha);
  for (std::size_t c = 0; c < num_curves; ++c) {
    Philox rng(seed, c);
    const double target = min_diameter * std::pow(1.0 - rng.uniform() * tail, -1.0 / alpha);
    std::vector<Point> v = detail::lattice_loop(rng, steps / 2, dim);
    const double diam = diameter(Polyline(v));
    Point shift = Point::zeros(dim);
    for (std::size_t i = 0; i < dim; ++i) shift[i] = box * rng.uniform();
    for (Point& p : v)
      for (std::size_t i = 0; i < dim; ++i) p[i] = p[i] * (target / diam) + shift[i];
    out.add(Polyline(std::move(v)), 1, "loop" + std::to_string(c));
  }
  return out;
}

/// The `index`-th collection of the ensemble. Each index is an independent
/// draw; identical (spec, index) give identical output.
inline CurveCollection sample_collection(const EnsembleSpec& spec, std::uint64_t index) {
  const std::uint64_t seed = derive_seed(spec.seed, index);
  CurveCollection out;
  switch (spec.kind) {
    case EnsembleKind::random_walk:
    case EnsembleKind::brownian_bridge: {
      const Point start = detail::center_or_origin(spec.center, spec.dim);
      for (std::size_t c = 0; c < spec.num_curves; ++c) {
        Polyline base = spec.kind == EnsembleKind::random_walk ? random_walk_polyline(spec.steps, spec.dim, seed, c)
                                                               : brownian_bridge_polyline(spec.steps, spec.dim, seed, c);
        std::vector<Point> v = base.vertices();
        for (Point& p : v)
          for (std::size_t i = 0; i < spec.dim; ++i) p[i] = start[i] + spec.scale * p[i];
        out.add(Polyline(std::move(v)), 1, "w" + std::to_string(c));
      }
      break;
    }
    case EnsembleKind::pathological: {
      Polyline base = pathological_curve(spec.grid_size);
      if (spec.scale != 1.0) {
        std::vector<Point> v = base.vertices();
        for (Point& p : v)
          for (std::size_t i = 0; i < 2; ++i) p[i] *= spec.scale;
        base = Polyline(std::move(v));
      }
      out.add(spec.perturb_bound > 0.0 ? perturb_curve(base, spec.perturb_bound, seed) : base, 1, "gamma");
      break;
    }
    case EnsembleKind::loop_collection:
      return loop_collection(spec.num_curves, spec.alpha, spec.min_diameter, spec.max_diameter, spec.steps,
                             spec.dim, spec.box, seed);
    case EnsembleKind::radial: {
      require(spec.inner > 0.0 && spec.outer > spec.inner, ErrorCode::invalid_argument, "radial ensemble needs 0 < inner < outer");
      const Point c = detail::center_or_origin(spec.center, spec.dim);
      for (std::size_t k = 0; k < spec.num_curves; ++k) {
        Philox rng(seed, k);
        const Point u = detail::random_direction(rng, spec.dim);
        out.add(Polyline{detail::offset(c, u, 0.5 * spec.inner), detail::offset(c, u, 1.5 * spec.outer)}, 1,
                "ray" + std::to_string(k));
      }
      break;
    }
    case EnsembleKind::fan: {
      require(spec.inner > 0.0 && spec.outer > spec.inner, ErrorCode::invalid_argument, "fan ensemble needs 0 < inner < outer");
      const Point c = detail::center_or_origin(spec.center, spec.dim);
      require(spec.target.size() == spec.dim, ErrorCode::dimension_mismatch, "fan target has the wrong dimension");
      const Point y(spec.target);
      Point axis = y;
      for (std::size_t i = 0; i < spec.dim; ++i) axis[i] -= c[i];
      const double ny = norm(axis);
      require(ny > 0.0, ErrorCode::invalid_argument, "fan target must differ from the center");
      for (std::size_t k = 0; k < spec.num_curves; ++k) {
        Philox rng(seed, k);
        auto jitter = [&] {
          Point u = axis;
          for (std::size_t i = 0; i < spec.dim; ++i) u[i] = u[i] / ny + spec.spread * rng.normal();
          const double n = norm(u);
          for (std::size_t i = 0; i < spec.dim; ++i) u[i] /= n;
          return u;
        };
        const Point p_in = detail::offset(c, jitter(), 0.9 * spec.inner);
        const Point p_out = detail::offset(c, jitter(), 1.1 * spec.outer);
        out.add(Polyline{p_in, y, p_out}, 1, "fan" + std::to_string(k));
      }
      break;
    }
  }
  return out;
}

}  // namespace rcurves
