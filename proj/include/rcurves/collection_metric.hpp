#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "rcurves/collection.hpp"
#include "rcurves/curve_metric.hpp"
#include "rcurves/error.hpp"
#include "rcurves/matching.hpp"
#include "rcurves/parallel.hpp"

namespace rcurves {

/// Pairs of copy indices (positions in CurveCollection::expanded()).
struct PartialMatching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

struct CollectionMatch {
  MetricResult distance;
  PartialMatching matching;
};

/// Entry-by-entry curve distances, computed at tolerance `tol`.
inline std::vector<std::vector<double>> pairwise_curve_distances(const CurveCollection& a, const CurveCollection& b,
                                                                 double tol, std::size_t threads = 1) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const auto flat = parallel_map(na * nb, threads, [&](std::size_t k) {
    return curve_distance(a[k / nb].curve, b[k % nb].curve, tol).value;
  });
  std::vector<std::vector<double>> out(na, std::vector<double>(nb));
  for (std::size_t k = 0; k < flat.size(); ++k) out[k / nb][k % nb] = flat[k];
  return out;
}

namespace detail {

/// Least candidate threshold t admitting a partial matching that uses only
/// pairs at distance <= t and leaves unmatched only curves of diameter <= t.
inline CollectionMatch bottleneck_match(const std::vector<double>& diam_a, const std::vector<double>& diam_b,
                                        const std::function<double(std::size_t, std::size_t)>& dist, double tol) {
  const std::size_t na = diam_a.size();
  const std::size_t nb = diam_b.size();
  std::vector<double> candidates{0.0};
  candidates.insert(candidates.end(), diam_a.begin(), diam_a.end());
  candidates.insert(candidates.end(), diam_b.begin(), diam_b.end());
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) candidates.push_back(dist(i, j));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto feasible = [&](double t) -> std::optional<Matching> {
    BipartiteGraph g(na, nb);
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t j = 0; j < nb; ++j)
        if (dist(i, j) <= t) g.add_edge(i, j);
    std::vector<bool> ml(na), mr(nb);
    for (std::size_t i = 0; i < na; ++i) ml[i] = diam_a[i] > t;
    for (std::size_t j = 0; j < nb; ++j) mr[j] = diam_b[j] > t;
    return cover_mandatory(g, ml, mr);
  };

  // The largest candidate is always feasible (empty matching).
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(candidates[mid])) hi = mid;
    else lo = mid + 1;
  }
  const double t = candidates[lo];
  const Matching m = *feasible(t);
  CollectionMatch out{{t, tol, MetricMethod::bottleneck_search}, {}};
  for (std::size_t i = 0; i < na; ++i)
    if (m.left_to_right[i] != Matching::none) out.matching.pairs.emplace_back(i, m.left_to_right[i]);
  return out;
}

}  // namespace detail

/// d between collections: the least bottleneck cost over partial matchings,
/// where matched pairs cost their curve distance and unmatched curves cost
/// their diameter. Curve distances are computed at tol / 4.
inline CollectionMatch collection_match(const CurveCollection& a, const CurveCollection& b, double tol,
                                        std::size_t threads = 1) {
  require(tol > 0.0, ErrorCode::invalid_argument, "tolerance must be positive");
  require(a.empty() || b.empty() || a.dim() == b.dim(), ErrorCode::dimension_mismatch,
          "collection dimensions differ");
  const auto entry_dist = pairwise_curve_distances(a, b, tol / 4.0, threads);
  const auto copies_a = a.expanded();
  const auto copies_b = b.expanded();
  std::vector<double> diam_a, diam_b;
  for (std::size_t i : copies_a) diam_a.push_back(a[i].diameter);
  for (std::size_t j : copies_b) diam_b.push_back(b[j].diameter);
  return detail::bottleneck_match(
      diam_a, diam_b, [&](std::size_t i, std::size_t j) { return entry_dist[copies_a[i]][copies_b[j]]; }, tol);
}

inline MetricResult collection_distance(const CurveCollection& a, const CurveCollection& b, double tol,
                                        std::size_t threads = 1) {
  return collection_match(a, b, tol, threads).distance;
}

inline constexpr std::size_t kBruteForceMaxCurves = 10;

/// Exhaustive minimum over every partial matching; at most 10 curves in
/// total (counting multiplicity).
inline double brute_force_collection_distance(const CurveCollection& a, const CurveCollection& b,
                                              double tol = 1e-9) {
  const auto copies_a = a.expanded();
  const auto copies_b = b.expanded();
  require(copies_a.size() + copies_b.size() <= kBruteForceMaxCurves, ErrorCode::input_too_large,
          "brute force is limited to " + std::to_string(kBruteForceMaxCurves) + " curves in total");
  const auto entry_dist = pairwise_curve_distances(a, b, tol);
  const std::size_t na = copies_a.size();
  const std::size_t nb = copies_b.size();
  std::vector<bool> used(nb, false);
  double best = std::numeric_limits<double>::infinity();

  auto recurse = [&](auto&& self, std::size_t i, double cost) -> void {
    if (i == na) {
      for (std::size_t j = 0; j < nb; ++j)
        if (!used[j]) cost = std::max(cost, b[copies_b[j]].diameter);
      best = std::min(best, cost);
      return;
    }
    self(self, i + 1, std::max(cost, a[copies_a[i]].diameter));
    for (std::size_t j = 0; j < nb; ++j) {
      if (used[j]) continue;
      used[j] = true;
      self(self, i + 1, std::max(cost, entry_dist[copies_a[i]][copies_b[j]]));
      used[j] = false;
    }
  };
  recurse(recurse, 0, 0.0);
  return best;
}

}  // namespace rcurves
