#pragma once

// Passes: S x S, 2S x S and S x 2S dyadic sub-rectangles of a frame at scale
// S. A path crosses a pass when a contiguous stretch of it stays inside the
// pass and joins the two longer sides (any two opposite sides of a square).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lfpp/error.hpp"
#include "lfpp/fpp.hpp"
#include "lfpp/lattice.hpp"

namespace lfpp {

struct Pass {
  GridBox rect;

  friend bool operator==(const Pass&, const Pass&) = default;
};

inline bool is_valid_pass(const Pass& p, const GridBox& frame, std::int64_t s) {
  const GridBox& r = p.rect;
  const bool shape = (r.width == s && r.height == s) || (r.width == 2 * s && r.height == s) ||
                     (r.width == s && r.height == 2 * s);
  return shape && frame.contains(r) && (r.x0 - frame.x0) % r.width == 0 && (r.y0 - frame.y0) % r.height == 0;
}

inline void check_scale(const GridBox& frame, std::int64_t s) {
  if (s < 1 || frame.width % s != 0 || frame.height % s != 0)
    fail(ErrorKind::NonDivisible, "scale " + std::to_string(s) + " does not divide the frame");
}

/// All passes of `frame` at scale s: squares, then landscape, then portrait,
/// each in row-major order of their origin.
inline std::vector<Pass> enumerate_passes(const GridBox& frame, std::int64_t s) {
  check_scale(frame, s);
  std::vector<Pass> out;
  auto tile = [&](std::int64_t w, std::int64_t h) {
    for (std::int64_t y = frame.y0; y + h <= frame.y1(); y += h)
      for (std::int64_t x = frame.x0; x + w <= frame.x1(); x += w) out.push_back({GridBox(x, y, w, h)});
  };
  tile(s, s);
  tile(2 * s, s);
  tile(s, 2 * s);
  return out;
}

namespace detail {

/// Index along the path at which the first crossing of `pass` is completed,
/// or nullopt if the path never crosses it.
inline std::optional<std::size_t> first_crossing_end(const LatticePath& p, const Pass& pass) {
  const GridBox& r = pass.rect;
  const bool lr_ok = r.height >= r.width;  // portrait or square: left-right
  const bool bt_ok = r.width >= r.height;  // landscape or square: bottom-top
  bool left = false, right = false, bottom = false, top = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vertex& v = p[i];
    if (!r.contains(v)) {
      left = right = bottom = top = false;
      continue;
    }
    left |= v.x == r.x0;
    right |= v.x == r.x1() - 1;
    bottom |= v.y == r.y0;
    top |= v.y == r.y1() - 1;
    if ((lr_ok && left && right) || (bt_ok && bottom && top)) return i;
  }
  return std::nullopt;
}

}  // namespace detail

inline bool crosses_pass(const LatticePath& p, const Pass& pass) {
  return detail::first_crossing_end(p, pass).has_value();
}

struct PassCollection {
  std::vector<Pass> passes;  // in path order
  GridBox frame;
  std::int64_t scale = 0;
  std::string source_path_id;
  LatticePath path;
};

inline bool blow_ups_disjoint(std::span<const Pass> passes) {
  for (std::size_t i = 0; i < passes.size(); ++i)
    for (std::size_t j = i + 1; j < passes.size(); ++j)
      if (blow_up(passes[i].rect).intersects(blow_up(passes[j].rect))) return false;
  return true;
}

enum class GreedyRule {
  /// Walk the path; accept every pass whose crossing completes next, provided
  /// its blow-up misses the blow-ups already accepted.
  EarliestCompletion,
  /// One pass per column with index 1 mod 3 (the earliest-completed pass
  /// contained in that column). A column can be crossed without crossing any
  /// pass inside it, so this rule may return fewer than K/3 passes.
  ThirdColumns,
};

/// Disjoint-blow-up collection of passes crossed by `p`, in path order.
inline PassCollection greedy_disjoint_passes(const LatticePath& p, const GridBox& frame, std::int64_t s,
                                             std::string path_id = {},
                                             GreedyRule rule = GreedyRule::EarliestCompletion) {
  check_scale(frame, s);
  for (const Vertex& v : p.vertices())
    if (!frame.contains(v)) fail(ErrorKind::OutOfFrame, "path vertex escapes the frame");
  std::vector<std::pair<std::size_t, Pass>> chosen;
  if (rule == GreedyRule::EarliestCompletion) {
    std::vector<std::pair<std::size_t, Pass>> crossed;
    for (const Pass& pass : enumerate_passes(frame, s))
      if (auto end = detail::first_crossing_end(p, pass)) crossed.emplace_back(*end, pass);
    std::stable_sort(crossed.begin(), crossed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& cand : crossed) {
      const GridBox halo = blow_up(cand.second.rect);
      const bool clear = std::none_of(chosen.begin(), chosen.end(),
                                      [&](const auto& c) { return blow_up(c.second.rect).intersects(halo); });
      if (clear) chosen.push_back(cand);
    }
  } else {
    const std::int64_t columns = frame.width / s;
    for (std::int64_t c = 1; c < columns; c += 3) {
      const std::int64_t x = frame.x0 + c * s;
      std::optional<std::pair<std::size_t, Pass>> best;
      auto consider = [&](const Pass& pass) {
        if (auto end = detail::first_crossing_end(p, pass); end && (!best || *end < best->first))
          best.emplace(*end, pass);
      };
      for (std::int64_t y = frame.y0; y + s <= frame.y1(); y += s) consider({GridBox(x, y, s, s)});
      for (std::int64_t y = frame.y0; y + 2 * s <= frame.y1(); y += 2 * s) consider({GridBox(x, y, s, 2 * s)});
      if (best) chosen.push_back(*best);
    }
    std::stable_sort(chosen.begin(), chosen.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  PassCollection pc{{}, frame, s, std::move(path_id), p};
  for (auto& [end, pass] : chosen) pc.passes.push_back(pass);
  return pc;
}

/// First N passes of a collection.
inline PassCollection prefix(const PassCollection& pc, std::size_t n) {
  PassCollection out = pc;
  if (n < out.passes.size()) out.passes.resize(n);
  return out;
}

struct PassCost {
  double lhs = 0.0;  // psi(pi)
  double rhs = 0.0;  // sum over passes of Psi_easy(P)
};

/// Cheapest crossing of a pass in the sense of `crosses_pass`: the easy
/// crossing of a rectangle, and the cheaper of LR and BT for a square.
inline double pass_crossing_weight(const Pass& pass, const WeightField& wf) {
  const double easy = crossing_weight(pass.rect, CrossingSpec::easy(), wf).weight;
  if (pass.rect.aspect() != Aspect::Square) return easy;
  return std::min(easy, crossing_weight(pass.rect, CrossingSpec::bt(), wf).weight);
}

/// Both sides of psi(pi) >= sum_P Psi_easy(P; Y_R), evaluated with one weight
/// field over the frame.
inline PassCost pass_cost_bound(const PassCollection& pc, const WeightField& wf) {
  PassCost out;
  out.lhs = path_weight(pc.path, wf);
  for (const Pass& pass : pc.passes) out.rhs += pass_crossing_weight(pass, wf);
  return out;
}

/// |collection| / ||pi||_S.
inline double pass_density(const PassCollection& pc) {
  return static_cast<double>(pc.passes.size()) / static_cast<double>(boxes_entered(pc.path, pc.scale, pc.frame));
}

}  // namespace lfpp
