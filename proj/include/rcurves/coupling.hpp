#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "rcurves/error.hpp"
#include "rcurves/geometry.hpp"
#include "rcurves/nets.hpp"
#include "rcurves/parallel.hpp"
#include "rcurves/random.hpp"

namespace rcurves {

/// Finitely many distinct atoms with nonnegative probabilities summing to 1.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<Point> atoms, std::vector<double> probs)
      : atoms_(std::move(atoms)), probs_(std::move(probs)) {
    require(!atoms_.empty() && atoms_.size() == probs_.size(), ErrorCode::invalid_argument,
            "measure needs one probability per atom");
    double total = 0.0;
    for (double p : probs_) {
      require(p >= 0.0 && std::isfinite(p), ErrorCode::invalid_argument, "atom probabilities must be nonnegative");
      total += p;
    }
    require(std::abs(total - 1.0) <= 1e-12, ErrorCode::invalid_argument, "atom probabilities must sum to 1");
    std::vector<Point> sorted = atoms_;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), ErrorCode::invalid_argument,
            "measure atoms must be distinct");
    for (const Point& a : atoms_) require_same_dim(atoms_.front(), a);
  }

  static DiscreteMeasure point_mass(Point x) { return DiscreteMeasure({std::move(x)}, {1.0}); }

  const std::vector<Point>& atoms() const { return atoms_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return atoms_.size(); }

 private:
  std::vector<Point> atoms_;
  std::vector<double> probs_;
};

/// Cells of one refinement level. Cell c has label `labels[c]` (the argmin
/// indices in F^1..F^k) and member support points `members[c]`; cells are
/// in lexicographic label order.
struct CellLevel {
  std::vector<std::vector<std::size_t>> labels;
  std::vector<std::vector<std::size_t>> members;
};

/// Interval coding of a measure sequence against nets F^1..F^K. Measure j
/// is coded at level min(j, K); level 0 is the single cell holding
/// everything. Cell c of level k gets [lower(j, k, c), upper(j, k, c)).
class Coding {
 public:
  Coding(std::vector<DiscreteMeasure> measures, std::vector<Net> nets)
      : measures_(std::move(measures)), nets_(std::move(nets)) {
    require(!measures_.empty(), ErrorCode::invalid_argument, "coding needs at least one measure");
    for (const Net& n : nets_) require(!n.empty(), ErrorCode::invalid_argument, "coding nets must be nonempty");
    build_support();
    build_levels();
    build_boundaries();
  }

  std::size_t levels() const { return nets_.size(); }
  std::size_t num_measures() const { return measures_.size(); }
  const std::vector<DiscreteMeasure>& measures() const { return measures_; }
  const std::vector<Net>& nets() const { return nets_; }
  const std::vector<Point>& support() const { return support_; }
  const CellLevel& level(std::size_t k) const { return levels_.at(k); }
  std::size_t coding_level(std::size_t j) const { return std::min(j, levels()); }

  /// Support point probabilities of measure j.
  const std::vector<double>& weights(std::size_t j) const { return weights_.at(j); }

  /// p_j(A) for cell c of level k.
  double cell_mass(std::size_t j, std::size_t k, std::size_t c) const {
    double m = 0.0;
    for (std::size_t s : levels_.at(k).members[c]) m += weights_[j][s];
    return m;
  }

  double lower(std::size_t j, std::size_t k, std::size_t c) const { return bounds_.at(j).at(k).at(c); }
  double upper(std::size_t j, std::size_t k, std::size_t c) const { return bounds_.at(j).at(k).at(c + 1); }

  /// The level-k cell whose interval for measure j contains xi. Zero-mass
  /// cells have empty intervals, so xi falls into the next cell with mass.
  std::size_t locate(std::size_t j, std::size_t k, double xi) const {
    require(xi >= 0.0 && xi < 1.0, ErrorCode::invalid_argument, "xi must lie in [0, 1)");
    const auto& b = bounds_.at(j).at(k);
    return static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), xi) - b.begin()) - 1;
  }

  /// Level-k cell containing support point s.
  std::size_t cell_of(std::size_t k, std::size_t s) const { return cell_index_.at(k).at(s); }

  /// X̃_j for the uniform variable xi: a support index drawn from measure j
  /// conditioned on the level-min(j, K) cell selected by xi. `u` in [0, 1)
  /// drives the within-cell choice.
  std::size_t sample_index(std::size_t j, double xi, double u) const {
    const std::size_t k = coding_level(j);
    const std::size_t c = locate(j, k, xi);
    const auto& members = levels_[k].members[c];
    const double mass = cell_mass(j, k, c);
    double target = u * mass;
    std::size_t last_positive = members.front();
    for (std::size_t s : members) {
      const double w = weights_[j][s];
      if (w <= 0.0) continue;
      last_positive = s;
      if (target < w) return s;
      target -= w;
    }
    return last_positive;
  }

  /// Law of X̃_j integrated analytically over xi: for each support point,
  /// the xi-length of its cell's interval times its conditional weight.
  std::vector<double> marginal(std::size_t j) const {
    const std::size_t k = coding_level(j);
    std::vector<double> out(support_.size(), 0.0);
    for (std::size_t c = 0; c < levels_[k].members.size(); ++c) {
      const double len = upper(j, k, c) - lower(j, k, c);
      const double mass = cell_mass(j, k, c);
      if (len <= 0.0 || mass <= 0.0) continue;
      for (std::size_t s : levels_[k].members[c]) out[s] = len * weights_[j][s] / mass;
    }
    return out;
  }

 private:
  void build_support() {
    std::map<Point, std::size_t> index;
    for (const DiscreteMeasure& m : measures_)
      for (const Point& a : m.atoms())
        if (index.emplace(a, 0).second) support_.push_back(a);
    for (std::size_t s = 0; s < support_.size(); ++s) {
      require_same_dim(support_.front(), support_[s]);
      index[support_[s]] = s;
    }
    for (const Net& n : nets_)
      require(n.dim() == support_.front().dim(), ErrorCode::dimension_mismatch, "net and measure dimensions differ");
    for (const DiscreteMeasure& m : measures_) {
      std::vector<double> w(support_.size(), 0.0);
      for (std::size_t i = 0; i < m.size(); ++i) w[index[m.atoms()[i]]] = m.probs()[i];
      weights_.push_back(std::move(w));
    }
  }

  void build_levels() {
    const std::size_t n = support_.size();
    std::vector<std::vector<std::size_t>> full(n);
    for (std::size_t s = 0; s < n; ++s)
      for (const Net& net : nets_) full[s].push_back(argmin_cell(support_[s], net));
    for (std::size_t k = 0; k <= levels(); ++k) {
      std::map<std::vector<std::size_t>, std::vector<std::size_t>> cells;
      for (std::size_t s = 0; s < n; ++s)
        cells[std::vector<std::size_t>(full[s].begin(), full[s].begin() + static_cast<std::ptrdiff_t>(k))].push_back(s);
      CellLevel lvl;
      std::vector<std::size_t> where(n);
      for (auto& [label, members] : cells) {
        for (std::size_t s : members) where[s] = lvl.labels.size();
        lvl.labels.push_back(label);
        lvl.members.push_back(members);
      }
      levels_.push_back(std::move(lvl));
      cell_index_.push_back(std::move(where));
    }
  }

  // Prefix sums at the finest level; coarser boundaries are read off the
  // finest ones at the first child of each cell, so children tile their
  // parent exactly. Everything after the last cell with mass is pinned to 1.
  void build_boundaries() {
    const std::size_t big_k = levels();
    for (std::size_t j = 0; j < measures_.size(); ++j) {
      const CellLevel& fine = levels_[big_k];
      const std::size_t nc = fine.labels.size();
      std::vector<double> fb(nc + 1, 0.0);
      std::size_t last_positive = 0;
      for (std::size_t c = 0; c < nc; ++c) {
        const double m = cell_mass(j, big_k, c);
        fb[c + 1] = fb[c] + m;
        if (m > 0.0) last_positive = c;
      }
      for (std::size_t c = last_positive + 1; c <= nc; ++c) fb[c] = 1.0;

      std::vector<std::vector<double>> per_level(big_k + 1);
      for (std::size_t k = 0; k <= big_k; ++k) {
        const CellLevel& lvl = levels_[k];
        std::vector<double> b;
        std::size_t fine_c = 0;
        for (std::size_t c = 0; c < lvl.labels.size(); ++c) {
          b.push_back(fb[fine_c]);
          while (fine_c < nc && std::equal(lvl.labels[c].begin(), lvl.labels[c].end(), fine.labels[fine_c].begin()))
            ++fine_c;
        }
        b.push_back(1.0);
        per_level[k] = std::move(b);
      }
      bounds_.push_back(std::move(per_level));
    }
  }

  std::vector<DiscreteMeasure> measures_;
  std::vector<Net> nets_;
  std::vector<Point> support_;
  std::vector<std::vector<double>> weights_;
  std::vector<CellLevel> levels_;
  std::vector<std::vector<std::size_t>> cell_index_;
  std::vector<std::vector<std::vector<double>>> bounds_;  // [measure][level][cell boundary]
};

inline Coding build_coding(std::vector<DiscreteMeasure> measures, std::vector<Net> nets) {
  return Coding(std::move(measures), std::move(nets));
}

/// Stream ids used by the coupled sampler: stream 0 draws xi, stream j + 1
/// draws the within-cell choices for measure j.
inline double coupling_xi(std::uint64_t seed, std::uint64_t draw) {
  Philox rng(derive_seed(seed, draw), 0);
  return rng.uniform();
}

inline Point sample_coupled(const Coding& coding, double xi, std::size_t j, std::uint64_t seed,
                            std::uint64_t draw = 0) {
  Philox rng(derive_seed(seed, draw), j + 1);
  return coding.support()[coding.sample_index(j, xi, rng.uniform())];
}

struct LevelStability {
  std::size_t level = 0;
  double fraction = 0.0;
  bool flagged = false;
};

struct ConvergenceReport {
  std::size_t draws = 0;
  std::size_t horizon = 0;
  std::vector<LevelStability> levels;
};

inline constexpr double kStabilityFlagThreshold = 0.95;

/// For each draw and level k = 1..K, whether Y^k_j = argmin over F^k of X̃_j
/// is constant over the tail j in [ceil(J / 2), J] (and j >= k). Needs
/// measures 0..J.
inline ConvergenceReport convergence_diagnostic(const Coding& coding, std::size_t draws, std::size_t horizon,
                                                std::uint64_t seed, std::size_t threads = 1) {
  require(draws >= 1, ErrorCode::invalid_argument, "need at least one draw");
  require(horizon < coding.num_measures(), ErrorCode::invalid_argument,
          "horizon exceeds the number of measures supplied");
  const std::size_t big_k = coding.levels();
  const std::size_t tail = (horizon + 1) / 2;
  const auto stable = parallel_map(draws, threads, [&](std::size_t d) {
    const double xi = coupling_xi(seed, d);
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<char> ok(big_k, 1);
    std::vector<std::size_t> first(big_k, unset);
    for (std::size_t j = tail; j <= horizon; ++j) {
      Philox rng(derive_seed(seed, d), j + 1);
      const Point x = coding.support()[coding.sample_index(j, xi, rng.uniform())];
      for (std::size_t k = 1; k <= big_k; ++k) {
        if (j < k) continue;
        const std::size_t y = argmin_cell(x, coding.nets()[k - 1]);
        if (first[k - 1] == unset) first[k - 1] = y;
        else if (first[k - 1] != y) ok[k - 1] = 0;
      }
    }
    return ok;
  });
  ConvergenceReport report{draws, horizon, {}};
  for (std::size_t k = 1; k <= big_k; ++k) {
    std::size_t count = 0;
    for (const auto& ok : stable) count += ok[k - 1];
    const double f = static_cast<double>(count) / static_cast<double>(draws);
    report.levels.push_back({k, f, f < kStabilityFlagThreshold});
  }
  return report;
}

}  // namespace rcurves
