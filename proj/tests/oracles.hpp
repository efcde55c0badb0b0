#pragma once

// Slow, independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "lfpp/box_array.hpp"
#include "lfpp/gff.hpp"
#include "lfpp/lattice.hpp"
#include "lfpp/rng.hpp"

namespace oracle {

using lfpp::BoxArray;
using lfpp::GridBox;
using lfpp::Vertex;

/// Sum of w over a vertex set in row-major order (the library's convention,
/// recomputed from scratch).
inline double sorted_sum(const BoxArray<double>& w, std::vector<std::size_t> idx) {
  std::sort(idx.begin(), idx.end());
  double s = 0.0;
  for (std::size_t i : idx) s += w[i];
  return s;
}

/// Minimum weight over every simple path that starts in `from` and ends in
/// `to` (depth-first enumeration).
inline double exhaustive_min(const BoxArray<double>& w, const std::vector<char>& from, const std::vector<char>& to) {
  const GridBox& b = w.box();
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> on(b.size(), 0);
  std::vector<std::size_t> path;
  std::function<void(std::size_t)> dfs = [&](std::size_t i) {
    on[i] = 1;
    path.push_back(i);
    if (to[i]) best = std::min(best, sorted_sum(w, path));
    const Vertex v = b.vertex(i);
    for (Vertex u : {Vertex{v.x + 1, v.y}, Vertex{v.x - 1, v.y}, Vertex{v.x, v.y + 1}, Vertex{v.x, v.y - 1}})
      if (b.contains(u) && !on[b.index(u)]) dfs(b.index(u));
    path.pop_back();
    on[i] = 0;
  };
  for (std::size_t i = 0; i < b.size(); ++i)
    if (from[i]) dfs(i);
  return best;
}

/// Per-target minimum over simple paths from x (one enumeration).
inline std::vector<double> exhaustive_from(const BoxArray<double>& w, Vertex x) {
  const GridBox& b = w.box();
  std::vector<double> best(b.size(), std::numeric_limits<double>::infinity());
  std::vector<char> on(b.size(), 0);
  std::vector<std::size_t> path;
  std::function<void(std::size_t)> dfs = [&](std::size_t i) {
    on[i] = 1;
    path.push_back(i);
    best[i] = std::min(best[i], sorted_sum(w, path));
    const Vertex v = b.vertex(i);
    for (Vertex u : {Vertex{v.x + 1, v.y}, Vertex{v.x - 1, v.y}, Vertex{v.x, v.y + 1}, Vertex{v.x, v.y - 1}})
      if (b.contains(u) && !on[b.index(u)]) dfs(b.index(u));
    path.pop_back();
    on[i] = 0;
  };
  dfs(b.index(x));
  return best;
}

inline double exhaustive_lr(const BoxArray<double>& w) {
  const GridBox& b = w.box();
  std::vector<char> from(b.size()), to(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    from[i] = b.vertex(i).x == b.x0;
    to[i] = b.vertex(i).x == b.x1() - 1;
  }
  return exhaustive_min(w, from, to);
}

inline double exhaustive_point(const BoxArray<double>& w, Vertex x, Vertex y) {
  const GridBox& b = w.box();
  std::vector<char> from(b.size()), to(b.size());
  from[b.index(x)] = 1;
  to[b.index(y)] = 1;
  return exhaustive_min(w, from, to);
}

/// Minimum-weight connected vertex subset meeting every terminal set, over all
/// 2^|box| subsets.
inline double brute_force_connector(const BoxArray<double>& w, const std::vector<std::vector<Vertex>>& sets) {
  const GridBox& b = w.box();
  const std::size_t n = b.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    bool hits = true;
    for (const auto& s : sets)
      hits = hits && std::any_of(s.begin(), s.end(), [&](Vertex v) { return mask >> b.index(v) & 1u; });
    if (!hits) continue;
    // Connectivity by flood fill from the lowest set bit.
    std::uint32_t seen = mask & (~mask + 1), frontier = seen;
    while (frontier) {
      std::uint32_t next = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(frontier >> i & 1u)) continue;
        const Vertex v = b.vertex(i);
        for (Vertex u : {Vertex{v.x + 1, v.y}, Vertex{v.x - 1, v.y}, Vertex{v.x, v.y + 1}, Vertex{v.x, v.y - 1}})
          if (b.contains(u)) next |= 1u << b.index(u);
      }
      next &= mask & ~seen;
      seen |= next;
      frontier = next;
    }
    if (seen != mask) continue;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) idx.push_back(i);
    best = std::min(best, sorted_sum(w, idx));
  }
  return best;
}

/// (I - P)^{-1} on the interior of `domain` by dense LU, built from scratch.
inline Eigen::MatrixXd dense_green(const GridBox& domain) {
  const GridBox in = lfpp::interior(domain);
  const auto n = static_cast<Eigen::Index>(in.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t i = 0; i < in.size(); ++i)
    for (std::size_t j = 0; j < in.size(); ++j)
      if (lfpp::l1_distance(in.vertex(i), in.vertex(j)) == 1)
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -0.25;
  return a.partialPivLu().inverse();
}

/// Random field values for oracle comparisons (i.i.d. normals; the engine
/// does not care where weights come from).
inline BoxArray<double> random_y(const GridBox& b, std::uint64_t seed) {
  lfpp::NormalSource g(seed);
  BoxArray<double> y(b);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = g();
  return y;
}

}  // namespace oracle

#define EXPECT_KIND(stmt, k)                                      \
  do {                                                            \
    try {                                                         \
      (void)(stmt);                                               \
      ADD_FAILURE() << "expected " #k;                            \
    } catch (const lfpp::Error& e_) {                             \
      EXPECT_EQ(e_.kind(), lfpp::ErrorKind::k) << e_.what();      \
    }                                                             \
  } while (0)
