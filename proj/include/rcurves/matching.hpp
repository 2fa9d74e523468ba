#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "rcurves/error.hpp"

namespace rcurves {

class BipartiteGraph {
 public:
  BipartiteGraph(std::size_t left, std::size_t right) : left_adj_(left), right_adj_(right) {}

  void add_edge(std::size_t u, std::size_t v) {
    require(u < left_adj_.size() && v < right_adj_.size(), ErrorCode::invalid_argument,
            "bipartite edge out of range");
    left_adj_[u].push_back(v);
    right_adj_[v].push_back(u);
  }

  std::size_t left_size() const { return left_adj_.size(); }
  std::size_t right_size() const { return right_adj_.size(); }
  const std::vector<std::size_t>& left_neighbors(std::size_t u) const { return left_adj_[u]; }
  const std::vector<std::size_t>& right_neighbors(std::size_t v) const { return right_adj_[v]; }

 private:
  std::vector<std::vector<std::size_t>> left_adj_;
  std::vector<std::vector<std::size_t>> right_adj_;
};

struct Matching {
  static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> left_to_right;
  std::vector<std::size_t> right_to_left;

  std::size_t size() const {
    std::size_t n = 0;
    for (std::size_t v : left_to_right) n += v != none;
    return n;
  }
};

/// Hopcroft–Karp maximum matching that may only use the left vertices
/// flagged in `active_left` (all of them when the vector is empty).
inline Matching max_matching(const BipartiteGraph& g, const std::vector<bool>& active_left = {}) {
  constexpr std::size_t none = Matching::none;
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
  const std::size_t nl = g.left_size();
  Matching m{std::vector<std::size_t>(nl, none), std::vector<std::size_t>(g.right_size(), none)};
  auto active = [&](std::size_t u) { return active_left.empty() || active_left[u]; };
  std::vector<std::size_t> layer(nl, inf);

  auto bfs = [&] {
    std::queue<std::size_t> queue;
    bool found = false;
    for (std::size_t u = 0; u < nl; ++u) {
      if (active(u) && m.left_to_right[u] == none) {
        layer[u] = 0;
        queue.push(u);
      } else {
        layer[u] = inf;
      }
    }
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop();
      for (std::size_t v : g.left_neighbors(u)) {
        const std::size_t w = m.right_to_left[v];
        if (w == none) {
          found = true;
        } else if (layer[w] == inf) {
          layer[w] = layer[u] + 1;
          queue.push(w);
        }
      }
    }
    return found;
  };

  auto dfs = [&](auto&& self, std::size_t u) -> bool {
    for (std::size_t v : g.left_neighbors(u)) {
      const std::size_t w = m.right_to_left[v];
      if (w == none || (layer[w] == layer[u] + 1 && self(self, w))) {
        m.left_to_right[u] = v;
        m.right_to_left[v] = u;
        return true;
      }
    }
    layer[u] = inf;
    return false;
  };

  while (bfs()) {
    for (std::size_t u = 0; u < nl; ++u)
      if (active(u) && m.left_to_right[u] == none) dfs(dfs, u);
  }
  return m;
}

/// A matching covering every mandatory vertex on both sides, or nothing if
/// none exists. Starts from a matching covering the left mandatory set and
/// repairs each uncovered right mandatory vertex along an alternating path
/// that ends at a free left vertex or releases a non-mandatory right vertex;
/// such a path exists whenever a right-covering matching exists.
inline std::optional<Matching> cover_mandatory(const BipartiteGraph& g, const std::vector<bool>& mandatory_left,
                                               const std::vector<bool>& mandatory_right) {
  constexpr std::size_t none = Matching::none;
  std::size_t need_left = 0;
  for (bool b : mandatory_left) need_left += b;
  Matching m = max_matching(g, mandatory_left);
  if (m.size() < need_left) return std::nullopt;

  const std::size_t nl = g.left_size();
  for (std::size_t start = 0; start < g.right_size(); ++start) {
    if (!mandatory_right[start] || m.right_to_left[start] != none) continue;
    // parent[u]: right vertex from which left vertex u was reached.
    std::vector<std::size_t> parent(nl, none);
    std::queue<std::size_t> queue;
    queue.push(start);
    std::size_t end = none;
    while (!queue.empty() && end == none) {
      const std::size_t w = queue.front();
      queue.pop();
      for (std::size_t u : g.right_neighbors(w)) {
        if (parent[u] != none) continue;
        parent[u] = w;
        const std::size_t next = m.left_to_right[u];
        if (next == none || !mandatory_right[next]) {
          end = u;
          break;
        }
        queue.push(next);
      }
    }
    if (end == none) return std::nullopt;
    const std::size_t released = m.left_to_right[end];
    if (released != none) m.right_to_left[released] = none;
    for (std::size_t u = end; u != none;) {
      const std::size_t w = parent[u];
      const std::size_t previous = m.right_to_left[w];
      m.left_to_right[u] = w;
      m.right_to_left[w] = u;
      u = w == start ? none : previous;
    }
  }
  return m;
}

}  // namespace rcurves
