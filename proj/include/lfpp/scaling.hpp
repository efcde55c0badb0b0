#pragma once

// Normalized metrics on [0,1]^2 sampled on an (m+1) x (m+1) grid, compared
// across scales by identity-correspondence distortion.
//
// The box is [0,S]^2 (S+1 vertices per side) so that S x is a lattice point
// for every grid node x. Distances keep both endpoint weights, so the
// diagonal holds w(S x) / kappa rather than 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "lfpp/error.hpp"
#include "lfpp/fpp.hpp"
#include "lfpp/gff.hpp"
#include "lfpp/mc.hpp"
#include "lfpp/parallel.hpp"
#include "lfpp/rng.hpp"
#include "lfpp/stats.hpp"

namespace lfpp {

inline GridBox closed_square(std::int64_t s) { return GridBox(0, 0, s + 1, s + 1); }

struct KappaEstimate {
  double kappa = 0.0;
  QuantileCI ci;
  EmpiricalDistribution samples;
};

/// p-quantile (default: median) of Psi_LR([0,S]^2).
inline KappaEstimate estimate_kappa(std::int64_t S, double gamma, std::size_t n, std::uint64_t seed, double p = 0.5,
                                    unsigned threads = 1) {
  KappaEstimate k;
  k.samples = ensemble(closed_square(S), Functional::LR, gamma, n, derive_seed(seed, "kappa"), threads);
  k.ci = quantile_ci(k.samples, p);
  k.kappa = k.ci.estimate;
  return k;
}

class SampledMetric {
 public:
  SampledMetric(std::int64_t S, double gamma, std::int64_t m, double kappa, std::uint64_t seed, std::vector<double> dist)
      : S_(S), gamma_(gamma), m_(m), kappa_(kappa), seed_(seed), dist_(std::move(dist)) {
    if (m_ < 1) fail(ErrorKind::InvalidArgument, "grid resolution must be at least 1");
    if (dist_.size() != nodes() * nodes()) fail(ErrorKind::DimensionMismatch, "distance matrix has the wrong size");
  }

  /// Grid metric from a function of node coordinates (for synthetic checks).
  static SampledMetric from_function(std::int64_t m, const std::function<double(double, double, double, double)>& f) {
    const std::size_t n = static_cast<std::size_t>((m + 1) * (m + 1));
    std::vector<double> d(n * n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        const auto pa = coord(m, a), pb = coord(m, b);
        d[a * n + b] = f(pa.first, pa.second, pb.first, pb.second);
      }
    return SampledMetric(0, 0.0, m, 1.0, 0, std::move(d));
  }

  std::int64_t scale() const { return S_; }
  double gamma() const { return gamma_; }
  std::int64_t m() const { return m_; }
  double kappa() const { return kappa_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t nodes() const { return static_cast<std::size_t>((m_ + 1) * (m_ + 1)); }
  /// Node (i, j) is the point (i/m, j/m); index j (m+1) + i.
  std::size_t node(std::int64_t i, std::int64_t j) const { return static_cast<std::size_t>(j * (m_ + 1) + i); }
  std::pair<double, double> coordinates(std::size_t a) const { return coord(m_, a); }
  double at(std::size_t a, std::size_t b) const { return dist_[a * nodes() + b]; }
  const std::vector<double>& matrix() const { return dist_; }

 private:
  static std::pair<double, double> coord(std::int64_t m, std::size_t a) {
    const auto w = static_cast<std::size_t>(m + 1);
    return {static_cast<double>(a % w) / static_cast<double>(m), static_cast<double>(a / w) / static_cast<double>(m)};
  }

  std::int64_t S_;
  double gamma_;
  std::int64_t m_;
  double kappa_;
  std::uint64_t seed_;
  std::vector<double> dist_;
};

/// One field on [0,S]^2; one shortest-path solve per grid node. Entry (a, b)
/// is taken from the solve started at the smaller of the two node indices, so
/// the matrix is exactly symmetric.
inline SampledMetric sample_normalized_metric(std::int64_t S, double gamma, std::int64_t m, double kappa,
                                              std::uint64_t seed, unsigned threads = 1) {
  if (m < 1 || S < 1 || S % m != 0) fail(ErrorKind::NonDivisible, "S must be a positive multiple of m");
  if (!(kappa > 0.0)) fail(ErrorKind::InvalidArgument, "kappa must be positive");
  const GridBox box = closed_square(S);
  const WeightField wf(sample_dgff(box, seed), gamma);
  const std::int64_t step = S / m;
  const auto n = static_cast<std::size_t>((m + 1) * (m + 1));
  std::vector<Vertex> pts(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto i = static_cast<std::int64_t>(a % static_cast<std::size_t>(m + 1));
    const auto j = static_cast<std::int64_t>(a / static_cast<std::size_t>(m + 1));
    pts[a] = {i * step, j * step};
  }
  std::vector<double> d(n * n);
  parallel_for(n, threads, [&](std::size_t a) {
    const std::vector<Vertex> targets(pts.begin() + static_cast<std::ptrdiff_t>(a), pts.end());
    const std::vector<double> w = point_weights_from(pts[a], box, wf, targets);
    for (std::size_t b = a; b < n; ++b) d[a * n + b] = d[b * n + a] = w[b - a] / kappa;
  });
  return SampledMetric(S, gamma, m, kappa, seed, std::move(d));
}

/// Tensor-product bilinear interpolation in both arguments.
inline double interpolate(const SampledMetric& d, double x1, double y1, double x2, double y2) {
  const auto m = d.m();
  struct Corner {
    std::size_t node;
    double weight;
  };
  auto corners = [&](double x, double y) {
    x = std::clamp(x, 0.0, 1.0) * static_cast<double>(m);
    y = std::clamp(y, 0.0, 1.0) * static_cast<double>(m);
    const auto i = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(x)), m - 1);
    const auto j = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(y)), m - 1);
    const double tx = x - static_cast<double>(i), ty = y - static_cast<double>(j);
    return std::array<Corner, 4>{Corner{d.node(i, j), (1 - tx) * (1 - ty)}, Corner{d.node(i + 1, j), tx * (1 - ty)},
                                 Corner{d.node(i, j + 1), (1 - tx) * ty}, Corner{d.node(i + 1, j + 1), tx * ty}};
  };
  const auto ca = corners(x1, y1), cb = corners(x2, y2);
  double v = 0.0;
  for (const Corner& a : ca) {
    if (a.weight == 0.0) continue;
    for (const Corner& b : cb)
      if (b.weight != 0.0) v += a.weight * b.weight * d.at(a.node, b.node);
  }
  return v;
}

/// max |a - b| over all node pairs (identity correspondence).
inline double distortion(const SampledMetric& a, const SampledMetric& b) {
  if (a.m() != b.m()) fail(ErrorKind::GridMismatch, "metrics live on different grids");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.matrix().size(); ++i) worst = std::max(worst, std::abs(a.matrix()[i] - b.matrix()[i]));
  return worst;
}

struct DistortionRow {
  std::int64_t S = 0;
  double kappa_S = 0.0, kappa_2S = 0.0;
  double distortion = 0.0;
};

/// distortion(d_S, d_2S) per S, both metrics drawn from the same seed and
/// each normalized by its own kappa estimate.
inline std::vector<DistortionRow> cross_scale_distortion(const std::vector<std::int64_t>& scales, double gamma,
                                                         std::int64_t m, std::size_t kappa_replicas,
                                                         std::uint64_t seed, unsigned threads = 1) {
  std::vector<DistortionRow> rows;
  for (std::int64_t s : scales) {
    const double k1 = estimate_kappa(s, gamma, kappa_replicas, derive_seed(seed, s), 0.5, threads).kappa;
    const double k2 = estimate_kappa(2 * s, gamma, kappa_replicas, derive_seed(seed, 2 * s), 0.5, threads).kappa;
    const auto a = sample_normalized_metric(s, gamma, m, k1, derive_seed(seed, "metric"), threads);
    const auto b = sample_normalized_metric(2 * s, gamma, m, k2, derive_seed(seed, "metric"), threads);
    rows.push_back({s, k1, k2, distortion(a, b)});
  }
  return rows;
}

struct HolderFit {
  double xi_upper = 0.0, xi_lower = 0.0;
  double C_upper = 0.0, C_lower = 0.0;
};

/// Log-log fits of the max and min distance per l-infinity distance bin k/m
/// (k = 1..m) against k/m.
inline HolderFit holder_fit(const SampledMetric& d) {
  if (d.m() < 8) fail(ErrorKind::InvalidArgument, "holder_fit needs m >= 8");
  const auto m = d.m();
  const std::size_t n = d.nodes();
  std::vector<double> hi(static_cast<std::size_t>(m + 1), -std::numeric_limits<double>::infinity());
  std::vector<double> lo(static_cast<std::size_t>(m + 1), std::numeric_limits<double>::infinity());
  double first = std::numeric_limits<double>::quiet_NaN();
  bool varied = false;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto w = static_cast<std::size_t>(m + 1);
      const auto dx = std::abs(static_cast<std::int64_t>(a % w) - static_cast<std::int64_t>(b % w));
      const auto dy = std::abs(static_cast<std::int64_t>(a / w) - static_cast<std::int64_t>(b / w));
      const auto k = static_cast<std::size_t>(std::max(dx, dy));
      const double v = d.at(a, b);
      if (std::isnan(first)) first = v;
      varied |= v != first;
      hi[k] = std::max(hi[k], v);
      lo[k] = std::min(lo[k], v);
    }
  if (!varied) fail(ErrorKind::DegenerateData, "all distances are equal");
  std::vector<double> r;
  for (std::int64_t k = 1; k <= m; ++k) r.push_back(static_cast<double>(k) / static_cast<double>(m));
  const LinearFit up = log_log_fit(r, std::span<const double>(hi).subspan(1));
  const LinearFit dn = log_log_fit(r, std::span<const double>(lo).subspan(1));
  return {up.slope, dn.slope, std::exp(up.intercept), std::exp(dn.intercept)};
}

}  // namespace lfpp
