#pragma once

// Vertex-weighted first-passage percolation on boxes: w(x) = exp(gamma Y(x)),
// path weight psi(pi) = sum of w over the path's vertices (both endpoints
// included), crossing weights, point-to-point weights, diameters and
// minimum-weight connectors of up to four terminal sets.
//
// Weights of paths and connectors are always summed over the vertices in
// ascending row-major order, so a result's weight does not depend on the
// orientation in which the path is listed and is bit-reproducible.
// Ties between minimising paths are broken towards the row-major smallest
// parent.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "lfpp/box_array.hpp"
#include "lfpp/error.hpp"
#include "lfpp/gff.hpp"
#include "lfpp/lattice.hpp"

namespace lfpp {

class WeightField {
 public:
  /// exp(gamma Y) on `box` from a sampled field; box must lie in the field's domain.
  WeightField(const GaussianField& field, const GridBox& box, double gamma)
      : WeightField(field.values().restrict_to(checked(field.domain(), box)), gamma) {}

  WeightField(const GaussianField& field, double gamma) : WeightField(field, field.base_box(), gamma) {}

  /// exp(gamma Y) from explicit Y values.
  WeightField(const BoxArray<double>& y, double gamma) : gamma_(gamma), w_(y.box()) {
    if (!(gamma >= 0.0)) fail(ErrorKind::InvalidArgument, "gamma must be non-negative");
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] = gamma == 0.0 ? 1.0 : std::exp(gamma * y[i]);
  }

  /// Explicit weights (must be strictly positive).
  static WeightField from_weights(BoxArray<double> weights, double gamma = std::numeric_limits<double>::quiet_NaN()) {
    for (double w : weights.values())
      if (!(w > 0.0)) fail(ErrorKind::InvalidArgument, "vertex weights must be strictly positive");
    WeightField wf;
    wf.gamma_ = gamma;
    wf.w_ = std::move(weights);
    return wf;
  }

  static WeightField unit(const GridBox& box) { return from_weights(BoxArray<double>(box, 1.0), 0.0); }

  const GridBox& box() const { return w_.box(); }
  double gamma() const { return gamma_; }
  double at(Vertex v) const { return w_.at(v); }
  const BoxArray<double>& weights() const { return w_; }

  bool is_constant() const {
    const auto v = w_.values();
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  }

 private:
  WeightField() = default;
  static const GridBox& checked(const GridBox& domain, const GridBox& box) {
    if (!domain.contains(box)) fail(ErrorKind::OutOfBox, "weight box escapes the field's domain");
    return box;
  }

  double gamma_ = 0.0;
  BoxArray<double> w_;
};

/// Sum of w over the listed vertices (with multiplicity), in row-major order.
inline double path_weight(std::span<const Vertex> vertices, const WeightField& wf) {
  std::vector<Vertex> sorted(vertices.begin(), vertices.end());
  for (const Vertex& v : sorted)
    if (!wf.box().contains(v)) fail(ErrorKind::OutOfBox, "path vertex outside the weight field");
  std::sort(sorted.begin(), sorted.end());
  double s = 0.0;
  for (const Vertex& v : sorted) s += wf.at(v);
  return s;
}

inline double path_weight(const LatticePath& p, const WeightField& wf) { return path_weight(p.vertices(), wf); }

enum class CrossingKind { LR, BT, Easy, Hard, SegmentToSegment, PointToPoint, FourSegmentX };

enum class Side { Left, Right, Bottom, Top };

/// Vertices of one side of `box` with offset along the side in [from, to).
inline std::vector<Vertex> side_segment(const GridBox& box, Side side, std::int64_t from, std::int64_t to) {
  std::vector<Vertex> out;
  const bool vertical = side == Side::Left || side == Side::Right;
  const std::int64_t len = vertical ? box.height : box.width;
  from = std::max<std::int64_t>(from, 0);
  to = std::min(to, len);
  for (std::int64_t t = from; t < to; ++t) {
    switch (side) {
      case Side::Left: out.push_back({box.x0, box.y0 + t}); break;
      case Side::Right: out.push_back({box.x1() - 1, box.y0 + t}); break;
      case Side::Bottom: out.push_back({box.x0 + t, box.y0}); break;
      case Side::Top: out.push_back({box.x0 + t, box.y1() - 1}); break;
    }
  }
  return out;
}

inline std::vector<Vertex> whole_side(const GridBox& box, Side side) {
  return side_segment(box, side, 0, std::max(box.width, box.height));
}

/// Which terminal sets a crossing or connector must join. LR, BT, easy and
/// hard are resolved against the box they are evaluated on; easy is LR on
/// portrait boxes and BT on landscape ones, hard the other way round, and
/// both are LR on squares.
class CrossingSpec {
 public:
  static CrossingSpec lr() { return CrossingSpec(CrossingKind::LR, {}); }
  static CrossingSpec bt() { return CrossingSpec(CrossingKind::BT, {}); }
  static CrossingSpec easy() { return CrossingSpec(CrossingKind::Easy, {}); }
  static CrossingSpec hard() { return CrossingSpec(CrossingKind::Hard, {}); }
  static CrossingSpec segments(std::vector<Vertex> sources, std::vector<Vertex> targets) {
    return CrossingSpec(CrossingKind::SegmentToSegment, {std::move(sources), std::move(targets)});
  }
  static CrossingSpec points(Vertex a, Vertex b) { return CrossingSpec(CrossingKind::PointToPoint, {{a}, {b}}); }
  /// Connector joining L x [h/2 + a, h), L x [0, h/2 - a), R x [h/2 + a, h), R x [0, h/2 - a).
  static CrossingSpec four_segment_x(const GridBox& box, std::int64_t a) {
    const std::int64_t half = box.height / 2;
    if (a < 0 || half - a <= 0 || half + a >= box.height)
      fail(ErrorKind::EmptySpec, "offset leaves an empty segment");
    return CrossingSpec(CrossingKind::FourSegmentX,
                        {side_segment(box, Side::Left, half + a, box.height), side_segment(box, Side::Left, 0, half - a),
                         side_segment(box, Side::Right, half + a, box.height),
                         side_segment(box, Side::Right, 0, half - a)});
  }

  CrossingKind kind() const { return kind_; }
  bool is_connector() const { return kind_ == CrossingKind::FourSegmentX; }

  /// LR/BT after applying the easy/hard convention for `box`.
  CrossingKind resolved_kind(const GridBox& box) const {
    switch (kind_) {
      case CrossingKind::Easy: return box.is_landscape() ? CrossingKind::BT : CrossingKind::LR;
      case CrossingKind::Hard: return box.is_portrait() ? CrossingKind::BT : CrossingKind::LR;
      default: return kind_;
    }
  }

  /// Explicit terminal sets on `box`, validated.
  std::vector<std::vector<Vertex>> terminal_sets(const GridBox& box) const {
    std::vector<std::vector<Vertex>> out;
    switch (resolved_kind(box)) {
      case CrossingKind::LR: out = {whole_side(box, Side::Left), whole_side(box, Side::Right)}; break;
      case CrossingKind::BT: out = {whole_side(box, Side::Bottom), whole_side(box, Side::Top)}; break;
      default: out = sets_; break;
    }
    if (out.empty()) fail(ErrorKind::EmptySpec, "no terminal sets");
    for (const auto& s : out) {
      if (s.empty()) fail(ErrorKind::EmptySpec, "terminal set is empty");
      for (const Vertex& v : s)
        if (!box.contains(v)) fail(ErrorKind::OutOfBox, "terminal vertex outside the box");
    }
    return out;
  }

  const std::vector<std::vector<Vertex>>& explicit_sets() const { return sets_; }

 private:
  CrossingSpec(CrossingKind k, std::vector<std::vector<Vertex>> sets) : kind_(k), sets_(std::move(sets)) {}
  CrossingKind kind_;
  std::vector<std::vector<Vertex>> sets_;
};

inline std::string to_string(CrossingKind k) {
  switch (k) {
    case CrossingKind::LR: return "LR";
    case CrossingKind::BT: return "BT";
    case CrossingKind::Easy: return "easy";
    case CrossingKind::Hard: return "hard";
    case CrossingKind::SegmentToSegment: return "segment";
    case CrossingKind::PointToPoint: return "point";
    case CrossingKind::FourSegmentX: return "four-segment-X";
  }
  return "?";
}

struct GeodesicResult {
  double weight = 0.0;
  std::optional<LatticePath> path;  // empty for connectors
  std::vector<Vertex> vertex_set;   // sorted, distinct
  CrossingKind kind = CrossingKind::LR;
};

// ---------------------------------------------------------------------------
// Shortest-path engine.

namespace detail {

inline constexpr std::int32_t kNoParent = -1;

/// Local neighbour enumeration for a box, row-major indices.
template <class F>
inline void for_each_neighbor(const GridBox& box, std::size_t i, F&& f) {
  const auto w = static_cast<std::size_t>(box.width);
  const auto h = static_cast<std::size_t>(box.height);
  const std::size_t x = i % w, y = i / w;
  if (y > 0) f(i - w);
  if (x > 0) f(i - 1);
  if (x + 1 < w) f(i + 1);
  if (y + 1 < h) f(i + w);
}

struct SearchState {
  std::vector<double> dist;
  std::vector<std::int32_t> parent;
};

/// Multi-source Dijkstra over `box` with vertex weights `w` (local, row-major).
/// Sources start at their own weight. Stops once `stop_after` targets are
/// settled (0 = search everything). Returns settled targets in settle order.
/// Ties in the frontier are popped in row-major order; among equally short
/// parents the row-major smallest is kept.
inline std::vector<std::size_t> dijkstra(const GridBox& box, std::span<const double> w,
                                         std::span<const std::size_t> sources, const std::vector<char>& is_target,
                                         std::size_t stop_after, SearchState& st) {
  const std::size_t n = box.size();
  st.dist.assign(n, std::numeric_limits<double>::infinity());
  st.parent.assign(n, kNoParent);
  std::vector<char> done(n, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t s : sources)
    if (w[s] < st.dist[s]) {
      st.dist[s] = w[s];
      heap.emplace(w[s], s);
    }
  std::vector<std::size_t> settled_targets;
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[u] || d != st.dist[u]) continue;
    done[u] = 1;
    if (!is_target.empty() && is_target[u]) {
      settled_targets.push_back(u);
      if (stop_after != 0 && settled_targets.size() >= stop_after) break;
    }
    for_each_neighbor(box, u, [&](std::size_t v) {
      if (done[v]) return;
      const double nd = d + w[v];
      if (nd < st.dist[v]) {
        st.dist[v] = nd;
        st.parent[v] = static_cast<std::int32_t>(u);
        heap.emplace(nd, v);
      } else if (nd == st.dist[v] && static_cast<std::int32_t>(u) < st.parent[v]) {
        st.parent[v] = static_cast<std::int32_t>(u);
      }
    });
  }
  return settled_targets;
}

/// Breadth-first equivalent of `dijkstra` for constant weights. Produces the
/// same distances, parents and target order as the heap search.
inline std::vector<std::size_t> bfs_constant(const GridBox& box, double c, std::span<const std::size_t> sources,
                                             const std::vector<char>& is_target, std::size_t stop_after,
                                             SearchState& st) {
  const std::size_t n = box.size();
  st.dist.assign(n, std::numeric_limits<double>::infinity());
  st.parent.assign(n, kNoParent);
  std::vector<std::int64_t> level(n, -1);
  std::vector<std::size_t> frontier;
  for (std::size_t s : sources)
    if (level[s] < 0) {
      level[s] = 0;
      st.dist[s] = c;
      frontier.push_back(s);
    }
  std::vector<std::size_t> settled_targets;
  std::int64_t depth = 0;
  while (!frontier.empty()) {
    std::sort(frontier.begin(), frontier.end());
    bool stop = false;
    for (std::size_t u : frontier)
      if (!is_target.empty() && is_target[u]) {
        settled_targets.push_back(u);
        if (stop_after != 0 && settled_targets.size() >= stop_after) {
          stop = true;
          break;
        }
      }
    std::vector<std::size_t> next;
    for (std::size_t u : frontier)
      for_each_neighbor(box, u, [&](std::size_t v) {
        if (level[v] < 0) {
          level[v] = depth + 1;
          st.dist[v] = st.dist[u] + c;
          next.push_back(v);
        }
        if (level[v] == depth + 1 && (st.parent[v] == kNoParent || static_cast<std::int32_t>(u) < st.parent[v]))
          st.parent[v] = static_cast<std::int32_t>(u);
      });
    if (stop) break;
    frontier = std::move(next);
    ++depth;
  }
  return settled_targets;
}

inline std::vector<std::size_t> search(const GridBox& box, std::span<const double> local_w, bool constant,
                                       std::span<const std::size_t> sources, const std::vector<char>& is_target,
                                       std::size_t stop_after, SearchState& st) {
  if (constant) return bfs_constant(box, local_w.empty() ? 1.0 : local_w[0], sources, is_target, stop_after, st);
  return dijkstra(box, local_w, sources, is_target, stop_after, st);
}

inline std::vector<double> local_weights(const GridBox& box, const WeightField& wf) {
  std::vector<double> w(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) w[i] = wf.at(box.vertex(i));
  return w;
}

inline bool all_equal(std::span<const double> w) {
  return std::all_of(w.begin(), w.end(), [&](double x) { return x == w.front(); });
}

inline std::vector<Vertex> trace(const GridBox& box, const SearchState& st, std::size_t target) {
  std::vector<Vertex> rev;
  for (std::int64_t i = static_cast<std::int64_t>(target); i != kNoParent; i = st.parent[static_cast<std::size_t>(i)])
    rev.push_back(box.vertex(static_cast<std::size_t>(i)));
  return {rev.rbegin(), rev.rend()};
}

inline std::vector<Vertex> sorted_unique(std::vector<Vertex> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace detail

/// Which priority structure backs the two-terminal searches. `Auto` uses the
/// breadth-first fast path when all weights in the box are equal.
enum class QueueKind { Auto, BinaryHeap };

inline GeodesicResult min_weight_connector(const GridBox& box, const std::vector<std::vector<Vertex>>& terminal_sets,
                                           const WeightField& wf);

/// Minimum-weight nearest-neighbour path inside `box` between the spec's
/// source and target sets.
inline GeodesicResult crossing_weight(const GridBox& box, const CrossingSpec& spec, const WeightField& wf,
                                      QueueKind queue = QueueKind::Auto) {
  if (!wf.box().contains(box)) fail(ErrorKind::OutOfBox, "crossing box escapes the weight field");
  const auto sets = spec.terminal_sets(box);
  if (spec.is_connector()) {
    GeodesicResult r = min_weight_connector(box, sets, wf);
    r.kind = spec.kind();
    return r;
  }
  if (sets.size() != 2) fail(ErrorKind::EmptySpec, "a crossing needs exactly two terminal sets");
  std::vector<std::size_t> sources;
  for (const Vertex& v : sets[0]) sources.push_back(box.index(v));
  std::vector<char> is_target(box.size(), 0);
  for (const Vertex& v : sets[1]) is_target[box.index(v)] = 1;
  const std::vector<double> w = detail::local_weights(box, wf);
  detail::SearchState st;
  const bool constant = queue == QueueKind::Auto && detail::all_equal(w);
  const auto hit = detail::search(box, w, constant, sources, is_target, 1, st);
  if (hit.empty()) fail(ErrorKind::Disconnected, "no path between terminal sets");
  LatticePath path(detail::trace(box, st, hit.front()));
  GeodesicResult r;
  r.weight = path_weight(path, wf);
  r.vertex_set = detail::sorted_unique({path.vertices().begin(), path.vertices().end()});
  r.path = std::move(path);
  r.kind = spec.resolved_kind(box);
  return r;
}

/// Psi_{x,y}(box). Always searched from the row-major smaller endpoint so the
/// result is exactly symmetric; the path is returned oriented from x to y.
inline GeodesicResult point_weight(Vertex x, Vertex y, const GridBox& box, const WeightField& wf,
                                   QueueKind queue = QueueKind::Auto) {
  if (!box.contains(x) || !box.contains(y)) fail(ErrorKind::OutOfBox, "endpoint outside the box");
  const bool flip = y < x;
  GeodesicResult r = crossing_weight(box, CrossingSpec::points(flip ? y : x, flip ? x : y), wf, queue);
  if (flip) r.path = r.path->reversed();
  r.kind = CrossingKind::PointToPoint;
  return r;
}

/// Weight of every listed target from a single source (full search).
inline std::vector<double> point_weights_from(Vertex source, const GridBox& box, const WeightField& wf,
                                              std::span<const Vertex> targets) {
  const std::vector<double> w = detail::local_weights(box, wf);
  std::vector<char> is_target(box.size(), 0);
  for (const Vertex& t : targets) is_target[box.index(t)] = 1;
  detail::SearchState st;
  const std::size_t src = box.index(source);
  const std::size_t distinct =
      static_cast<std::size_t>(std::count(is_target.begin(), is_target.end(), static_cast<char>(1)));
  detail::dijkstra(box, w, std::span<const std::size_t>(&src, 1), is_target, distinct, st);
  std::vector<double> out;
  out.reserve(targets.size());
  for (const Vertex& t : targets) out.push_back(st.dist[box.index(t)]);
  return out;
}

enum class DiameterMode { Boundary, All };

inline constexpr std::size_t kAllPairsBudget = 65536;

struct DiameterResult {
  double value = 0.0;
  Vertex a{}, b{};
  std::size_t searches = 0;  // single-source searches actually run
};

/// max over pairs of the designated set of Psi_{x,y}(box). Exact: candidate
/// sources are pruned only when an eccentricity upper bound (triangle
/// inequality in the vertex-weight form Psi_xz <= Psi_xy + Psi_yz - w(y))
/// falls strictly below the best pair already found.
inline DiameterResult diameter_weights(const GridBox& box, const WeightField& wf, DiameterMode mode,
                                       std::size_t budget = kAllPairsBudget) {
  if (!wf.box().contains(box)) fail(ErrorKind::OutOfBox, "box escapes the weight field");
  if (box.size() > budget) fail(ErrorKind::TooLarge, "box exceeds the all-pairs budget");
  const std::vector<double> w = detail::local_weights(box, wf);
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < box.size(); ++i)
    if (mode == DiameterMode::All || box.on_boundary(box.vertex(i))) cand.push_back(i);
  std::vector<char> is_cand(box.size(), 0);
  for (std::size_t i : cand) is_cand[i] = 1;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lo(box.size(), 0.0), hi(box.size(), inf);
  std::vector<char> processed(box.size(), 0);
  double best = -inf;
  std::size_t best_a = cand.front(), best_b = cand.front();
  std::size_t searches = 0;
  detail::SearchState st;
  const double margin = 1e-9;
  auto alive = [&](std::size_t u) { return !processed[u] && hi[u] >= best * (1.0 - margin); };

  for (bool pick_high = true;; pick_high = !pick_high) {
    std::size_t next = box.size();
    for (std::size_t u : cand) {
      if (!alive(u)) continue;
      if (next == box.size() || (pick_high ? hi[u] > hi[next] : lo[u] < lo[next])) next = u;
    }
    if (next == box.size()) break;
    processed[next] = 1;
    ++searches;
    detail::dijkstra(box, w, std::span<const std::size_t>(&next, 1), {}, 0, st);
    double ecc = -inf;
    std::size_t far = next;
    for (std::size_t u : cand)
      if (st.dist[u] > ecc) {
        ecc = st.dist[u];
        far = u;
      }
    if (ecc > best) {
      best = ecc;
      best_a = next;
      best_b = far;
    }
    for (std::size_t u : cand) {
      lo[u] = std::max({lo[u], st.dist[u], ecc - st.dist[u] + w[u]});
      hi[u] = std::min(hi[u], st.dist[u] + ecc - w[next]);
    }
  }
  DiameterResult r;
  r.a = box.vertex(std::min(best_a, best_b));
  r.b = box.vertex(std::max(best_a, best_b));
  r.value = point_weight(r.a, r.b, box, wf, QueueKind::BinaryHeap).weight;
  r.searches = searches;
  return r;
}

/// Minimum-weight connected vertex set meeting every terminal set (2 to 4
/// sets): Steiner dynamic programme over (vertex, subset of sets) with
/// subset merges followed by shortest-path relaxation per subset.
inline GeodesicResult min_weight_connector(const GridBox& box, const std::vector<std::vector<Vertex>>& terminal_sets,
                                           const WeightField& wf) {
  const std::size_t k = terminal_sets.size();
  if (k > 4) fail(ErrorKind::TooManyTerminals, "at most four terminal sets are supported");
  if (k < 2) fail(ErrorKind::EmptySpec, "a connector needs at least two terminal sets");
  if (!wf.box().contains(box)) fail(ErrorKind::OutOfBox, "connector box escapes the weight field");
  for (const auto& s : terminal_sets) {
    if (s.empty()) fail(ErrorKind::EmptySpec, "terminal set is empty");
    for (const Vertex& v : s)
      if (!box.contains(v)) fail(ErrorKind::OutOfBox, "terminal vertex outside the box");
  }
  const std::size_t n = box.size();
  const std::size_t full = (std::size_t{1} << k) - 1;
  const std::vector<double> w = detail::local_weights(box, wf);
  const double inf = std::numeric_limits<double>::infinity();

  // Back-pointer: kind 0 = leaf, 1 = merge of (sub, mask ^ sub) at v, 2 = extension from parent vertex.
  struct Back {
    std::uint8_t kind = 0;
    std::uint8_t sub = 0;
    std::int32_t parent = -1;
  };
  std::vector<std::vector<double>> dp(full + 1, std::vector<double>(n, inf));
  std::vector<std::vector<Back>> back(full + 1, std::vector<Back>(n));
  for (std::size_t t = 0; t < k; ++t)
    for (const Vertex& v : terminal_sets[t]) dp[std::size_t{1} << t][box.index(v)] = w[box.index(v)];

  for (std::size_t mask = 1; mask <= full; ++mask) {
    auto& d = dp[mask];
    auto& b = back[mask];
    const std::size_t low = mask & (~mask + 1);
    for (std::size_t sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
      if (!(sub & low)) continue;  // each unordered split once
      const auto& d1 = dp[sub];
      const auto& d2 = dp[mask ^ sub];
      for (std::size_t v = 0; v < n; ++v) {
        const double c = d1[v] + d2[v] - w[v];
        if (c < d[v]) {
          d[v] = c;
          b[v] = {1, static_cast<std::uint8_t>(sub), -1};
        }
      }
    }
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::size_t v = 0; v < n; ++v)
      if (d[v] < inf) heap.emplace(d[v], v);
    std::vector<char> done(n, 0);
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (done[u] || du != d[u]) continue;
      done[u] = 1;
      detail::for_each_neighbor(box, u, [&](std::size_t v) {
        if (done[v]) return;
        const double nd = du + w[v];
        if (nd < d[v]) {
          d[v] = nd;
          b[v] = {2, 0, static_cast<std::int32_t>(u)};
          heap.emplace(nd, v);
        }
      });
    }
  }

  std::size_t root = 0;
  for (std::size_t v = 1; v < n; ++v)
    if (dp[full][v] < dp[full][root]) root = v;
  if (!(dp[full][root] < inf)) fail(ErrorKind::Disconnected, "terminal sets cannot be connected");

  std::vector<Vertex> verts;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{full, root}};
  while (!stack.empty()) {
    const auto [mask, v] = stack.back();
    stack.pop_back();
    verts.push_back(box.vertex(v));
    const Back& bk = back[mask][v];
    if (bk.kind == 1) {
      stack.emplace_back(bk.sub, v);
      stack.emplace_back(mask ^ bk.sub, v);
    } else if (bk.kind == 2) {
      stack.emplace_back(mask, static_cast<std::size_t>(bk.parent));
    }
  }
  GeodesicResult r;
  r.vertex_set = detail::sorted_unique(std::move(verts));
  r.weight = path_weight(r.vertex_set, wf);
  r.kind = CrossingKind::FourSegmentX;
  return r;
}

/// ||pi||_S of a geodesic.
inline std::size_t geodesic_box_count(const GeodesicResult& g, std::int64_t s, const GridBox& frame) {
  if (!g.path) fail(ErrorKind::NotAPath, "connector results carry no path");
  return boxes_entered(*g.path, s, frame);
}

}  // namespace lfpp
