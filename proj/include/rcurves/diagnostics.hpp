#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rcurves/collection.hpp"
#include "rcurves/crossings.hpp"
#include "rcurves/ensembles.hpp"
#include "rcurves/error.hpp"
#include "rcurves/geometry.hpp"
#include "rcurves/parallel.hpp"

namespace rcurves {

/// Draws collection number `index` for a run seeded with `seed`.
using Sampler = std::function<CurveCollection(std::uint64_t seed, std::uint64_t index)>;

inline Sampler make_sampler(EnsembleSpec spec) {
  return [spec](std::uint64_t seed, std::uint64_t index) {
    EnsembleSpec s = spec;
    s.seed = seed;
    return sample_collection(s, index);
  };
}

inline constexpr double kWilsonZ = 1.959963984540054;

/// Wilson score interval for `hits` successes out of `n` trials.
inline Interval wilson_interval(std::size_t hits, std::size_t n, double z = kWilsonZ) {
  require(n >= 1 && hits <= n, ErrorCode::invalid_argument, "invalid binomial counts");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double mid = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // Clamp so the interval always brackets the point estimate despite rounding.
  return {std::clamp(mid - half, 0.0, p), std::clamp(mid + half, p, 1.0)};
}

struct TailEstimate {
  Point x;
  double r = 0.0;
  double big_r = 0.0;
  std::size_t threshold = 0;
  double p_hat = 0.0;
  std::size_t samples = 0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Crossing counts of `samples` independent draws.
inline std::vector<std::size_t> sample_crossing_counts(const Sampler& sampler, const Annulus& ann,
                                                       std::size_t samples, std::uint64_t seed,
                                                       std::size_t threads = 1) {
  require(samples >= 1, ErrorCode::invalid_argument, "need at least one sample");
  return parallel_map(samples, threads,
                      [&](std::size_t i) { return count_crossings_collection(sampler(seed, i), ann); });
}

inline TailEstimate tail_from_counts(const std::vector<std::size_t>& counts, const Annulus& ann,
                                     std::size_t threshold) {
  const auto hits = static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [&](std::size_t c) { return c >= threshold; }));
  const Interval ci = wilson_interval(hits, counts.size());
  return {ann.center(), ann.inner(), ann.outer(), threshold,
          static_cast<double>(hits) / static_cast<double>(counts.size()), counts.size(), ci.lo, ci.hi};
}

/// Frequency of at least `threshold` crossings over `samples` draws, with a
/// 95% Wilson interval.
inline TailEstimate estimate_tail(const Sampler& sampler, const Annulus& ann, std::size_t threshold,
                                  std::size_t samples, std::uint64_t seed, std::size_t threads = 1) {
  return tail_from_counts(sample_crossing_counts(sampler, ann, samples, seed, threads), ann, threshold);
}

struct AnnulusSpec {
  Point x;
  double r = 0.0;
  double big_r = 0.0;
};

struct RegularityRow {
  std::size_t cell = 0;
  TailEstimate tail;       // the largest estimate over the sampler family
  std::size_t sampler = 0;  // which sampler attains it (first on ties)
};

struct RegularityCell {
  AnnulusSpec annulus;
  bool monotone = true;  // sup tail nonincreasing along the threshold ladder
  double terminal = 0.0;  // sup tail at the largest threshold
};

struct RegularityReport {
  std::vector<RegularityRow> rows;  // cell-major, then threshold order
  std::vector<RegularityCell> cells;
};

/// Sup over the sampler family of the tail at every annulus and threshold.
/// All samplers share `seed`, and each cell reuses one draw per sample so
/// the ladder is exactly monotone for each sampler.
inline RegularityReport regularity_report(const std::vector<Sampler>& samplers, const std::vector<AnnulusSpec>& grid,
                                          std::vector<std::size_t> thresholds, std::size_t samples,
                                          std::uint64_t seed, std::size_t threads = 1) {
  require(!samplers.empty() && !grid.empty() && !thresholds.empty(), ErrorCode::invalid_argument,
          "regularity report needs samplers, annuli and thresholds");
  std::sort(thresholds.begin(), thresholds.end());
  RegularityReport report;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Annulus ann(grid[c].x, grid[c].r, grid[c].big_r);
    std::vector<std::vector<std::size_t>> counts;
    for (const Sampler& s : samplers) counts.push_back(sample_crossing_counts(s, ann, samples, seed, threads));
    RegularityCell cell{grid[c], true, 0.0};
    double prev = 1.0;
    for (std::size_t n : thresholds) {
      RegularityRow row{c, tail_from_counts(counts[0], ann, n), 0};
      for (std::size_t s = 1; s < samplers.size(); ++s) {
        TailEstimate t = tail_from_counts(counts[s], ann, n);
        if (t.p_hat > row.tail.p_hat) row = {c, t, s};
      }
      cell.monotone = cell.monotone && row.tail.p_hat <= prev;
      prev = row.tail.p_hat;
      cell.terminal = row.tail.p_hat;
      report.rows.push_back(row);
    }
    report.cells.push_back(cell);
  }
  return report;
}

struct PowerFit {
  std::size_t threshold = 0;
  double lambda = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  // RMS of log residuals
  std::size_t points = 0;
};

/// Least squares of log p_hat against log(r / R) over the points with
/// p_hat > 0: p_hat ≈ K (r / R)^λ.
inline PowerFit fit_power(const std::vector<TailEstimate>& tails) {
  std::vector<double> xs, ys;
  for (const TailEstimate& t : tails) {
    require(t.r > 0.0 && t.big_r > t.r, ErrorCode::invalid_argument, "tail radii must satisfy 0 < r < R");
    if (t.p_hat > 0.0) {
      xs.push_back(std::log(t.r / t.big_r));
      ys.push_back(std::log(t.p_hat));
    }
  }
  if (xs.size() < 3)
    throw Error(ErrorCode::degenerate_fit, "power fit needs at least 3 positive tail estimates, got " +
                                               std::to_string(xs.size()));
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  require(sxx > 0.0, ErrorCode::degenerate_fit, "power fit needs at least two distinct radii");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + slope * xs[i]);
    ss += e * e;
  }
  return {tails.front().threshold, slope, std::exp(intercept), std::sqrt(ss / n), xs.size()};
}

struct RateVerdict {
  bool pass = false;
  std::vector<double> radii;   // decreasing
  std::vector<double> ratios;  // q(r) / (g(r) r^{d-1})
  std::string reason;
};

/// Finite-ladder check that q(r) = o(g(r) r^{d-1}) as r → 0, with gauge
/// g(r) = r^gauge_exponent. Passes when the ratios decrease (up to the given
/// per-point slack, e.g. confidence half-widths of q) and the last ratio is
/// below half of the first. Identically zero tails pass.
inline RateVerdict rate_check(std::vector<double> radii, std::vector<double> q, std::size_t dim,
                              double gauge_exponent = 0.0, std::vector<double> slack = {}) {
  require(radii.size() == q.size(), ErrorCode::invalid_argument, "one tail value per radius");
  require(radii.size() >= 4, ErrorCode::invalid_argument, "rate check needs at least 4 radii");
  require(slack.empty() || slack.size() == q.size(), ErrorCode::invalid_argument, "one slack value per radius");
  require(dim >= 1, ErrorCode::invalid_argument, "dimension must be positive");
  std::vector<std::size_t> order(radii.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return radii[a] > radii[b]; });
  RateVerdict v;
  std::vector<double> s;
  for (std::size_t i : order) {
    require(radii[i] > 0.0 && q[i] >= 0.0, ErrorCode::invalid_argument, "radii must be positive, tails nonnegative");
    const double denom = std::pow(radii[i], static_cast<double>(dim) - 1.0 + gauge_exponent);
    v.radii.push_back(radii[i]);
    v.ratios.push_back(q[i] / denom);
    s.push_back(slack.empty() ? 0.0 : slack[i] / denom);
  }
  const double step = v.radii[1] / v.radii[0];
  for (std::size_t i = 1; i < v.radii.size(); ++i)
    require(v.radii[i] < v.radii[i - 1] && std::abs(v.radii[i] / v.radii[i - 1] - step) <= 1e-6 * step,
            ErrorCode::invalid_argument, "radii must form a geometric ladder");

  if (std::all_of(q.begin(), q.end(), [](double x) { return x == 0.0; })) {
    v.pass = true;
    v.reason = "tails vanish on the whole ladder";
    return v;
  }
  for (std::size_t i = 1; i < v.ratios.size(); ++i) {
    if (v.ratios[i] > v.ratios[i - 1] + s[i] + s[i - 1]) {
      v.reason = "ratio increases at r = " + std::to_string(v.radii[i]);
      return v;
    }
  }
  if (!(v.ratios.back() < 0.5 * v.ratios.front())) {
    v.reason = "last ratio is not below half of the first";
    return v;
  }
  v.pass = true;
  v.reason = "ratios decrease toward zero";
  return v;
}

// Hotspot location.

/// Side of the lattice cubes used for the initial cover: diameter just
/// below (R - r) / 2, so a cube meeting the mid-sphere lies in the open
/// annulus.
inline double hotspot_cube_side(const Annulus& ann) {
  return (ann.outer() - ann.inner()) / (2.0 * std::sqrt(static_cast<double>(ann.dim()))) * (1.0 - 1e-6);
}

inline constexpr std::size_t kMaxCoverCubes = 2'000'000;

/// Faces of the lattice cubes (anchored at the center, side
/// hotspot_cube_side) that meet the mid-sphere. Shared faces appear once;
/// order is by (fixed axis, lattice coordinates).
inline std::vector<AlignedFace> initial_face_cover(const Annulus& ann) {
  const std::size_t d = ann.dim();
  const double s = hotspot_cube_side(ann);
  const double m = ann.mid_radius();
  const auto reach = static_cast<long long>(std::ceil(m / s)) + 1;
  const auto span = static_cast<double>(2 * reach);
  require(std::pow(span, static_cast<double>(d)) <= static_cast<double>(kMaxCoverCubes), ErrorCode::input_too_large,
          "annulus too thin for the cube cover in this dimension");
  const Point& c = ann.center();
  std::vector<long long> idx(d, -reach);
  // key: fixed axis, then the lattice coordinates of the face's low corner.
  std::map<std::vector<long long>, AlignedFace> faces;
  while (true) {
    double near2 = 0.0, far2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double lo = static_cast<double>(idx[a]) * s;
      const double hi = lo + s;
      const double n = lo > 0.0 ? lo : (hi < 0.0 ? -hi : 0.0);
      const double f = std::max(std::abs(lo), std::abs(hi));
      near2 += n * n;
      far2 += f * f;
    }
    if (near2 <= m * m && m * m <= far2) {
      for (std::size_t axis = 0; axis < d; ++axis) {
        for (int side = 0; side < 2; ++side) {
          std::vector<long long> key{static_cast<long long>(axis)};
          std::vector<Interval> bounds;
          for (std::size_t a = 0; a < d; ++a) {
            key.push_back(idx[a] + (a == axis ? side : 0));
            if (a != axis) {
              const double lo = c[a] + static_cast<double>(idx[a]) * s;
              bounds.push_back({lo, lo + s});
            }
          }
          const double value = c[axis] + static_cast<double>(idx[axis] + side) * s;
          faces.try_emplace(key, AlignedFace(d, axis, value, std::move(bounds)));
        }
      }
    }
    std::size_t a = 0;
    while (a < d && ++idx[a] == reach) idx[a++] = -reach;
    if (a == d) break;
  }
  std::vector<AlignedFace> out;
  for (auto& [key, face] : faces) out.push_back(std::move(face));
  return out;
}

struct HotspotLevel {
  std::size_t k = 0;
  AlignedFace face;
  double eps = 0.0;  // face diameter
  double p_hat = 0.0;
};

struct HotspotReport {
  Point y;
  std::vector<HotspotLevel> levels;  // level 0 is the chosen face of the initial cover
  double p0 = 0.0;                   // hit rate of the chosen initial face
  double cover_rate = 0.0;           // fraction of samples with at least one crossing
  std::size_t samples = 0;
  std::size_t cover_faces = 0;
};

/// Recursively narrows down where crossings concentrate: among the faces of
/// the initial cover, then among the 2^{d-1} halves of the chosen face, picks
/// the face hit by crossings in the most samples (first on ties).
inline HotspotReport locate_hotspot(const Sampler& sampler, const Annulus& ann, std::size_t depth,
                                    std::size_t samples, std::uint64_t seed, std::size_t threads = 1) {
  require(depth >= 1, ErrorCode::invalid_argument, "hotspot depth must be >= 1");
  require(samples >= 1, ErrorCode::invalid_argument, "need at least one sample");
  // Crossing pieces of every sample.
  const auto pieces = parallel_map(samples, threads, [&](std::size_t i) {
    const CurveCollection coll = sampler(seed, i);
    require(coll.empty() || coll.dim() == ann.dim(), ErrorCode::dimension_mismatch,
            "sampled curves and annulus dimensions differ");
    std::vector<Polyline> out;
    for (const CurveEntry& e : coll.entries())
      for (const CrossingInterval& iv : find_crossings(e.curve, ann).intervals) out.push_back(e.curve.slice(iv.a, iv.b));
    return out;
  });

  auto rates = [&](const std::vector<AlignedFace>& faces) {
    const auto per_sample = parallel_map(samples, threads, [&](std::size_t i) {
      std::vector<char> hit(faces.size(), 0);
      for (std::size_t f = 0; f < faces.size(); ++f)
        for (const Polyline& p : pieces[i])
          if (polyline_face_intersects(p, faces[f])) {
            hit[f] = 1;
            break;
          }
      return hit;
    });
    std::vector<double> out(faces.size(), 0.0);
    for (const auto& hit : per_sample)
      for (std::size_t f = 0; f < faces.size(); ++f) out[f] += hit[f];
    for (double& v : out) v /= static_cast<double>(samples);
    return out;
  };
  auto pick = [](const std::vector<double>& r) {
    return static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
  };

  HotspotReport report;
  report.samples = samples;
  std::size_t crossing_samples = 0;
  for (const auto& p : pieces) crossing_samples += !p.empty();
  report.cover_rate = static_cast<double>(crossing_samples) / static_cast<double>(samples);
  if (crossing_samples == 0) throw Error(ErrorCode::no_crossings, "no crossings observed in any sample");

  const std::vector<AlignedFace> cover = initial_face_cover(ann);
  report.cover_faces = cover.size();
  const std::vector<double> r0 = rates(cover);
  const std::size_t best0 = pick(r0);
  if (r0[best0] == 0.0) throw Error(ErrorCode::no_crossings, "no crossing hits the initial face cover");
  report.p0 = r0[best0];
  report.levels.push_back({0, cover[best0], cover[best0].diameter(), r0[best0]});
  for (std::size_t k = 1; k <= depth; ++k) {
    const std::vector<AlignedFace> children = report.levels.back().face.subdivide();
    const std::vector<double> rk = rates(children);
    const std::size_t best = pick(rk);
    report.levels.push_back({k, children[best], children[best].diameter(), rk[best]});
  }
  report.y = report.levels.back().face.center();
  return report;
}

}  // namespace rcurves
