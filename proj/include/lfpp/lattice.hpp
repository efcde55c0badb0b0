#pragma once

// Integer-lattice geometry: half-open boxes, blow-ups, dyadic tilings and
// nearest-neighbour paths. A box [x0, x0+w) x [y0, y0+h) has w*h vertices.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "lfpp/error.hpp"

namespace lfpp {

struct Vertex {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend constexpr bool operator==(const Vertex&, const Vertex&) = default;
  // Row-major (y, then x) order; this is the order used for every
  // deterministic tie-break in the library.
  friend constexpr std::strong_ordering operator<=>(const Vertex& a, const Vertex& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

constexpr std::int64_t l1_distance(Vertex a, Vertex b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

enum class Aspect { Square, Portrait, Landscape };

struct GridBox {
  std::int64_t x0 = 0;
  std::int64_t y0 = 0;
  std::int64_t width = 1;
  std::int64_t height = 1;

  constexpr GridBox() = default;
  constexpr GridBox(std::int64_t x0_, std::int64_t y0_, std::int64_t w, std::int64_t h)
      : x0(x0_), y0(y0_), width(w), height(h) {
    if (w < 1 || h < 1) fail(ErrorKind::InvalidArgument, "box width and height must be >= 1");
  }

  static constexpr GridBox square(std::int64_t side) { return GridBox(0, 0, side, side); }

  constexpr std::int64_t x1() const { return x0 + width; }
  constexpr std::int64_t y1() const { return y0 + height; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(width * height); }

  constexpr bool contains(Vertex v) const { return v.x >= x0 && v.x < x1() && v.y >= y0 && v.y < y1(); }
  constexpr bool contains(const GridBox& b) const {
    return b.x0 >= x0 && b.y0 >= y0 && b.x1() <= x1() && b.y1() <= y1();
  }
  constexpr bool intersects(const GridBox& b) const {
    return b.x0 < x1() && x0 < b.x1() && b.y0 < y1() && y0 < b.y1();
  }

  /// True for vertices on the outermost one-vertex layer of the box.
  constexpr bool on_boundary(Vertex v) const {
    return contains(v) && (v.x == x0 || v.y == y0 || v.x == x1() - 1 || v.y == y1() - 1);
  }

  constexpr Aspect aspect() const {
    if (height > width) return Aspect::Portrait;
    if (width > height) return Aspect::Landscape;
    return Aspect::Square;
  }
  constexpr bool is_portrait() const { return aspect() == Aspect::Portrait; }
  constexpr bool is_landscape() const { return aspect() == Aspect::Landscape; }

  /// Row-major index of a contained vertex.
  constexpr std::size_t index(Vertex v) const {
    return static_cast<std::size_t>((v.y - y0) * width + (v.x - x0));
  }
  constexpr Vertex vertex(std::size_t i) const {
    const auto k = static_cast<std::int64_t>(i);
    return {x0 + k % width, y0 + k / width};
  }

  friend constexpr bool operator==(const GridBox&, const GridBox&) = default;
};

/// Box shrunk by one vertex on every side; empty boxes are reported through
/// `has_interior`.
constexpr bool has_interior(const GridBox& b) { return b.width >= 3 && b.height >= 3; }
constexpr GridBox interior(const GridBox& b) {
  if (!has_interior(b)) fail(ErrorKind::InvalidArgument, "box has no interior vertices");
  return GridBox(b.x0 + 1, b.y0 + 1, b.width - 2, b.height - 2);
}

/// The box with three times the side lengths, centred on `b`.
constexpr GridBox blow_up(const GridBox& b) {
  return GridBox(b.x0 - b.width, b.y0 - b.height, 3 * b.width, 3 * b.height);
}

/// Aligned s x s tiles of `b` in row-major order.
inline std::vector<GridBox> dyadic_subboxes(const GridBox& b, std::int64_t s) {
  if (s < 1) fail(ErrorKind::InvalidArgument, "tile side must be positive");
  if (b.width % s != 0 || b.height % s != 0)
    fail(ErrorKind::NonDivisible, "tile side " + std::to_string(s) + " does not divide box dimensions");
  if (b.x0 % s != 0 || b.y0 % s != 0)
    fail(ErrorKind::NonDivisible, "box origin is not aligned to tile side " + std::to_string(s));
  std::vector<GridBox> out;
  out.reserve(static_cast<std::size_t>((b.width / s) * (b.height / s)));
  for (std::int64_t y = b.y0; y < b.y1(); y += s)
    for (std::int64_t x = b.x0; x < b.x1(); x += s) out.emplace_back(x, y, s, s);
  return out;
}

/// max(outer.width / inner.width, outer.height / inner.height).
inline double box_ratio(const GridBox& outer, const GridBox& inner) {
  if (!outer.contains(inner)) fail(ErrorKind::NotNested, "inner box is not contained in outer box");
  return std::max(static_cast<double>(outer.width) / static_cast<double>(inner.width),
                  static_cast<double>(outer.height) / static_cast<double>(inner.height));
}

class LatticePath {
 public:
  LatticePath() = default;
  explicit LatticePath(std::vector<Vertex> vertices) : v_(std::move(vertices)) {
    if (v_.empty()) fail(ErrorKind::InvalidArgument, "a lattice path needs at least one vertex");
    for (std::size_t i = 1; i < v_.size(); ++i)
      if (l1_distance(v_[i - 1], v_[i]) != 1)
        fail(ErrorKind::InvalidArgument, "consecutive path vertices must be nearest neighbours");
  }

  std::span<const Vertex> vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  const Vertex& front() const { return v_.front(); }
  const Vertex& back() const { return v_.back(); }
  const Vertex& operator[](std::size_t i) const { return v_[i]; }

  bool is_simple() const {
    std::vector<Vertex> s(v_);
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) == s.end();
  }

  LatticePath reversed() const {
    LatticePath p;
    p.v_.assign(v_.rbegin(), v_.rend());
    return p;
  }

  friend bool operator==(const LatticePath&, const LatticePath&) = default;

 private:
  std::vector<Vertex> v_;
};

/// Number of distinct s-tiles of `frame` that contain a path vertex.
inline std::size_t boxes_entered(const LatticePath& p, std::int64_t s, const GridBox& frame) {
  if (s < 1 || frame.width % s != 0 || frame.height % s != 0)
    fail(ErrorKind::NonDivisible, "frame is not tileable by side " + std::to_string(s));
  const std::int64_t cols = frame.width / s;
  std::unordered_set<std::int64_t> seen;
  for (const Vertex& v : p.vertices()) {
    if (!frame.contains(v)) fail(ErrorKind::OutOfFrame, "path vertex escapes the frame");
    seen.insert(((v.y - frame.y0) / s) * cols + (v.x - frame.x0) / s);
  }
  return seen.size();
}

}  // namespace lfpp
