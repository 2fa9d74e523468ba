#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <span>
#include <vector>

#include "rcurves/error.hpp"
#include "rcurves/geometry.hpp"

namespace rcurves {

/// A finite point set; list order is the total order used to break ties.
struct Net {
  std::vector<Point> points;
  double density = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  std::size_t dim() const { return points.empty() ? 0 : points.front().dim(); }
};

/// Index of the nearest net point; the least index among ties.
inline std::size_t argmin_cell(const Point& x, std::span<const Point> points) {
  require(!points.empty(), ErrorCode::invalid_argument, "argmin over an empty net");
  std::size_t best = 0;
  double best_d = squared_distance(x, points[0]);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = squared_distance(x, points[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

inline std::size_t argmin_cell(const Point& x, const Net& net) { return argmin_cell(x, net.points); }

/// Largest distance from a sample to its nearest net point.
inline double covering_radius(std::span<const Point> samples, std::span<const Point> points) {
  double worst = 0.0;
  for (const Point& s : samples) worst = std::max(worst, distance(s, points[argmin_cell(s, points)]));
  return worst;
}

/// Farthest-point selection starting from samples[0]: repeatedly adds the
/// sample farthest from the current net (first one on ties) until every
/// sample is within delta.
inline Net greedy_net(std::span<const Point> samples, double delta) {
  require(!samples.empty(), ErrorCode::invalid_argument, "greedy_net needs at least one sample");
  require(delta > 0.0, ErrorCode::invalid_argument, "net density must be positive");
  for (const Point& s : samples) require_same_dim(samples[0], s);
  Net net{{samples[0]}, delta};
  std::vector<double> gap(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) gap[i] = distance(samples[i], samples[0]);
  while (true) {
    const auto far = std::max_element(gap.begin(), gap.end());
    if (*far <= delta) break;
    const Point& chosen = samples[static_cast<std::size_t>(far - gap.begin())];
    net.points.push_back(chosen);
    for (std::size_t i = 0; i < samples.size(); ++i) gap[i] = std::min(gap[i], distance(samples[i], chosen));
  }
  return net;
}

/// Base nets indexed by (j, k), j, k >= 1, each a 1/(2k)-dense net of the
/// sample set supplied for that index, and the unions
///   F(eps, delta) = union of base(j', k') over j' <= ceil(1/eps), k' <= ceil(1/delta).
class NetFamily {
 public:
  /// sample_sets[j - 1][k - 1] are the samples for index (j, k); the grid
  /// must be rectangular.
  explicit NetFamily(const std::vector<std::vector<std::vector<Point>>>& sample_sets) {
    require(!sample_sets.empty() && !sample_sets.front().empty(), ErrorCode::invalid_argument,
            "net family needs at least one sample set");
    for (std::size_t j = 0; j < sample_sets.size(); ++j) {
      require(sample_sets[j].size() == sample_sets.front().size(), ErrorCode::invalid_argument,
              "net family sample grid must be rectangular");
      std::vector<Net> row;
      for (std::size_t k = 0; k < sample_sets[j].size(); ++k)
        row.push_back(greedy_net(sample_sets[j][k], 1.0 / (2.0 * static_cast<double>(k + 1))));
      base_.push_back(std::move(row));
    }
  }

  std::size_t max_j() const { return base_.size(); }
  std::size_t max_k() const { return base_.front().size(); }
  const Net& base(std::size_t j, std::size_t k) const {
    require(j >= 1 && j <= max_j() && k >= 1 && k <= max_k(), ErrorCode::invalid_argument,
            "net family index out of range");
    return base_[j - 1][k - 1];
  }

  /// Union of base nets up to (jmax, kmax), deduplicated, ordered by j',
  /// then k', then position in the base net.
  Net union_up_to(std::size_t jmax, std::size_t kmax) const {
    require(jmax >= 1 && jmax <= max_j() && kmax >= 1 && kmax <= max_k(), ErrorCode::invalid_argument,
            "net family index out of range");
    Net out{{}, base_[0][kmax - 1].density};
    std::set<Point> seen;
    for (std::size_t j = 0; j < jmax; ++j)
      for (std::size_t k = 0; k < kmax; ++k)
        for (const Point& p : base_[j][k].points)
          if (seen.insert(p).second) out.points.push_back(p);
    return out;
  }

  Net at(double eps, double delta) const {
    require(eps > 0.0 && delta > 0.0, ErrorCode::invalid_argument, "net family parameters must be positive");
    return union_up_to(static_cast<std::size_t>(std::ceil(1.0 / eps)),
                       static_cast<std::size_t>(std::ceil(1.0 / delta)));
  }

 private:
  std::vector<std::vector<Net>> base_;
};

inline NetFamily nested_family(const std::vector<std::vector<std::vector<Point>>>& sample_sets) {
  return NetFamily(sample_sets);
}

/// Points of a regular grid with the given spacing covering the box
/// [lo, hi]^dim, useful as net samples.
inline std::vector<Point> grid_points(std::size_t dim, double lo, double hi, double spacing) {
  require(dim >= 1 && hi >= lo && spacing > 0.0, ErrorCode::invalid_argument, "invalid grid parameters");
  const auto per_axis = static_cast<std::size_t>(std::floor((hi - lo) / spacing + 1e-9)) + 1;
  std::vector<Point> out;
  std::vector<std::size_t> idx(dim, 0);
  while (true) {
    Point p = Point::zeros(dim);
    for (std::size_t a = 0; a < dim; ++a) p[a] = lo + static_cast<double>(idx[a]) * spacing;
    out.push_back(std::move(p));
    std::size_t a = 0;
    while (a < dim && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == dim) break;
  }
  return out;
}

}  // namespace rcurves
