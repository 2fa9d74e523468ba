#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rcurves/crossings.hpp"
#include "rcurves/error.hpp"
#include "rcurves/geometry.hpp"

namespace rcurves {

struct CurveEntry {
  std::string id;
  Polyline curve;
  std::size_t multiplicity = 1;
  double diameter = 0.0;
};

/// A finite multiset of nontrivial curves sharing one dimension. Each entry
/// stands for `multiplicity` identical copies.
class CurveCollection {
 public:
  CurveCollection() = default;

  /// Adds a curve; an empty id is replaced by "c<index>". Trivial curves
  /// (zero diameter) are rejected.
  void add(Polyline curve, std::size_t multiplicity = 1, std::string id = {}) {
    if (id.empty()) id = "c" + std::to_string(entries_.size());
    require(multiplicity >= 1, ErrorCode::invalid_argument, "multiplicity of '" + id + "' must be >= 1");
    require(entries_.empty() || curve.dim() == dim(), ErrorCode::dimension_mismatch,
            "curve '" + id + "' has dimension " + std::to_string(curve.dim()) + ", collection has " +
                std::to_string(dim()));
    const double diam = rcurves::diameter(curve);
    require(diam > 0.0, ErrorCode::trivial_path, "trivial path '" + id + "' (zero diameter)");
    entries_.push_back({std::move(id), std::move(curve), multiplicity, diam});
  }

  const std::vector<CurveEntry>& entries() const { return entries_; }
  const CurveEntry& operator[](std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t dim() const { return entries_.empty() ? 0 : entries_.front().curve.dim(); }

  /// Number of curves counting multiplicity.
  std::size_t total_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.multiplicity;
    return n;
  }

  /// Entry index of every individual copy, in entry order.
  std::vector<std::size_t> expanded() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < entries_.size(); ++i) out.insert(out.end(), entries_[i].multiplicity, i);
    return out;
  }

  double max_diameter() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, e.diameter);
    return m;
  }

  friend bool operator==(const CurveCollection& a, const CurveCollection& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
      const auto& x = a.entries_[i];
      const auto& y = b.entries_[i];
      if (x.id != y.id || x.multiplicity != y.multiplicity || !(x.curve == y.curve)) return false;
    }
    return true;
  }

 private:
  std::vector<CurveEntry> entries_;
};

/// Γ(δ): the curves with diameter strictly greater than delta.
inline CurveCollection filter_macroscopic(const CurveCollection& coll, double delta) {
  require(delta >= 0.0, ErrorCode::invalid_argument, "delta must be nonnegative");
  CurveCollection out;
  for (const auto& e : coll.entries())
    if (e.diameter > delta) out.add(e.curve, e.multiplicity, e.id);
  return out;
}

inline std::size_t count_crossings_collection(const CurveCollection& coll, const Annulus& ann) {
  require(coll.empty() || coll.dim() == ann.dim(), ErrorCode::dimension_mismatch,
          "collection and annulus dimensions differ");
  std::size_t total = 0;
  for (const auto& e : coll.entries()) {
    // A curve of diameter below R - r cannot cross.
    if (e.diameter < ann.outer() - ann.inner()) continue;
    total += e.multiplicity * find_crossings(e.curve, ann).count();
  }
  return total;
}

}  // namespace rcurves
