#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lfpp/error.hpp"
#include "lfpp/lattice.hpp"

namespace lfpp {

/// One value per vertex of a box, stored row-major.
template <class T>
class BoxArray {
 public:
  BoxArray() = default;
  explicit BoxArray(const GridBox& box, T fill = T{}) : box_(box), data_(box.size(), fill) {}
  BoxArray(const GridBox& box, std::vector<T> data) : box_(box), data_(std::move(data)) {
    if (data_.size() != box_.size()) fail(ErrorKind::DimensionMismatch, "array size does not match box");
  }

  const GridBox& box() const { return box_; }
  std::size_t size() const { return data_.size(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& at(Vertex v) { return data_[box_.index(v)]; }
  const T& at(Vertex v) const { return data_[box_.index(v)]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  /// Copy of the values on a sub-box.
  BoxArray restrict_to(const GridBox& sub) const {
    if (!box_.contains(sub)) fail(ErrorKind::NotContained, "restriction box escapes the array");
    BoxArray out(sub);
    for (std::int64_t y = sub.y0; y < sub.y1(); ++y)
      for (std::int64_t x = sub.x0; x < sub.x1(); ++x) out.at({x, y}) = at({x, y});
    return out;
  }

 private:
  GridBox box_{};
  std::vector<T> data_;
};

}  // namespace lfpp
