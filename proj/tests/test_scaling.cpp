#include <gtest/gtest.h>

#include <cmath>

#include "lfpp/scaling.hpp"
#include "oracles.hpp"

using namespace lfpp;

namespace {

double l1(double a, double b, double c, double d) { return std::abs(a - c) + std::abs(b - d); }

}  // namespace

TEST(Kappa, ZeroGamma) {
  for (std::int64_t s : {4, 8, 32}) EXPECT_EQ(estimate_kappa(s, 0.0, 5, 1).kappa, static_cast<double>(s + 1));
}

TEST(Kappa, PositiveWithInterval) {
  const auto k = estimate_kappa(8, 0.4, 200, 3);
  EXPECT_GT(k.kappa, 0.0);
  EXPECT_LE(k.ci.lo, k.kappa);
  EXPECT_GE(k.ci.hi, k.kappa);
  const auto k2 = estimate_kappa(8, 0.4, 800, 4);
  EXPECT_GE(k2.kappa, k.ci.lo);
  EXPECT_LE(k2.kappa, k.ci.hi);
}

TEST(Metric, ZeroGammaValues) {
  const std::int64_t s = 16, m = 4;
  const auto d = sample_normalized_metric(s, 0.0, m, static_cast<double>(s + 1), 1);
  const double kappa = static_cast<double>(s + 1);
  EXPECT_DOUBLE_EQ(d.at(d.node(0, 0), d.node(m, m)), static_cast<double>(2 * s + 1) / kappa);
  EXPECT_DOUBLE_EQ(d.at(d.node(0, 0), d.node(0, 0)), 1.0 / kappa);
  for (std::size_t a = 0; a < d.nodes(); ++a)
    for (std::size_t b = 0; b < d.nodes(); ++b) {
      const auto [x1, y1] = d.coordinates(a);
      const auto [x2, y2] = d.coordinates(b);
      EXPECT_LE(std::abs(d.at(a, b) - l1(x1, y1, x2, y2)), 3.0 / kappa);
    }
}

TEST(Metric, SymmetricAndTriangle) {
  const auto d = sample_normalized_metric(16, 0.5, 8, 10.0, 7);
  const std::size_t n = d.nodes();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      EXPECT_EQ(d.at(a, b), d.at(b, a));
      EXPECT_GT(d.at(a, b), 0.0);
    }
  // Vertex weights make the triangle inequality hold with room to spare:
  // d(a,c) <= d(a,b) + d(b,c) - w(b)/kappa.
  std::size_t bad = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) bad += d.at(a, c) > d.at(a, b) + d.at(b, c);
  EXPECT_EQ(bad, 0u);
}

TEST(Metric, Errors) {
  EXPECT_KIND(sample_normalized_metric(10, 0.0, 4, 1.0, 1), NonDivisible);
  EXPECT_KIND(sample_normalized_metric(8, 0.0, 4, 0.0, 1), InvalidArgument);
}

TEST(Metric, ThreadInvariant) {
  const auto a = sample_normalized_metric(16, 0.3, 4, 5.0, 2, 1);
  const auto b = sample_normalized_metric(16, 0.3, 4, 5.0, 2, 3);
  EXPECT_EQ(a.matrix(), b.matrix());
}

TEST(Interpolation, NodesAndMidpoints) {
  const auto d = SampledMetric::from_function(4, [](double a, double b, double c, double e) { return l1(a, b, c, e); });
  EXPECT_DOUBLE_EQ(interpolate(d, 0.25, 0.5, 1.0, 0.0), 1.25);
  // Bilinear in each argument: the midpoint of two nodes averages them.
  const double mid = interpolate(d, 0.125, 0.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(mid, 0.5 * (d.at(d.node(0, 0), d.node(4, 4)) + d.at(d.node(1, 0), d.node(4, 4))));
  const double v = interpolate(d, 0.3, 0.7, 0.61, 0.12);
  double lo = 1e9, hi = -1e9;
  for (std::int64_t i : {1, 2})
    for (std::int64_t j : {2, 3})
      for (std::int64_t k : {2, 3})
        for (std::int64_t l : {0, 1}) {
          lo = std::min(lo, d.at(d.node(i, j), d.node(k, l)));
          hi = std::max(hi, d.at(d.node(i, j), d.node(k, l)));
        }
  EXPECT_GE(v, lo);
  EXPECT_LE(v, hi);
}

TEST(Distortion, Basics) {
  const auto a = sample_normalized_metric(8, 0.4, 4, 4.0, 1);
  const auto b = sample_normalized_metric(8, 0.4, 4, 4.0, 2);
  const auto c = sample_normalized_metric(8, 0.4, 4, 4.0, 3);
  EXPECT_EQ(distortion(a, a), 0.0);
  EXPECT_EQ(distortion(a, b), distortion(b, a));
  EXPECT_LE(distortion(a, c), distortion(a, b) + distortion(b, c));
  EXPECT_KIND(distortion(a, sample_normalized_metric(8, 0.4, 8, 4.0, 1)), GridMismatch);
}

TEST(Distortion, ZeroGammaAcrossScales) {
  const auto rows = cross_scale_distortion({8, 16}, 0.0, 4, 3, 1);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.kappa_S, static_cast<double>(r.S + 1));
    EXPECT_EQ(r.kappa_2S, static_cast<double>(2 * r.S + 1));
    EXPECT_LE(r.distortion, 3.0 / static_cast<double>(r.S + 1));
  }
}

TEST(Holder, SyntheticL1) {
  const auto d = SampledMetric::from_function(16, [](double a, double b, double c, double e) { return l1(a, b, c, e); });
  const HolderFit h = holder_fit(d);
  EXPECT_NEAR(h.xi_upper, 1.0, 0.02);
  EXPECT_NEAR(h.xi_lower, 1.0, 0.02);
  EXPECT_NEAR(h.C_upper, 2.0, 1e-9);
  EXPECT_NEAR(h.C_lower, 1.0, 1e-9);
  const auto d3 =
      SampledMetric::from_function(16, [](double a, double b, double c, double e) { return 3 * l1(a, b, c, e); });
  const HolderFit h3 = holder_fit(d3);
  EXPECT_NEAR(h3.xi_upper, h.xi_upper, 1e-12);
  EXPECT_NEAR(h3.C_upper, 3 * h.C_upper, 1e-9);
  const auto sq = SampledMetric::from_function(
      16, [](double a, double b, double c, double e) { return std::sqrt(std::max(std::abs(a - c), std::abs(b - e))); });
  EXPECT_NEAR(holder_fit(sq).xi_upper, 0.5, 1e-9);
}

TEST(Holder, Errors) {
  EXPECT_KIND(holder_fit(SampledMetric::from_function(16, [](double, double, double, double) { return 1.0; })),
              DegenerateData);
  EXPECT_KIND(holder_fit(SampledMetric::from_function(4, [](double a, double, double c, double) { return a + c; })),
              InvalidArgument);
}
