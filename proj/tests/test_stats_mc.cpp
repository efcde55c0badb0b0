#include <gtest/gtest.h>

#include <cmath>

#include "lfpp/mc.hpp"
#include "oracles.hpp"

using namespace lfpp;

TEST(Stats, QuantileExamples) {
  const EmpiricalDistribution d({4.0, 1.0, 3.0, 2.0});
  EXPECT_EQ(quantile(d, 0.25), 1.0);
  EXPECT_EQ(quantile(d, 0.26), 2.0);
  EXPECT_EQ(quantile(d, 0.5), 2.0);
  EXPECT_EQ(quantile(d, 1.0), 4.0);
  EXPECT_KIND(quantile(d, 0.0), BadP);
  EXPECT_KIND(quantile(d, 1.5), BadP);
}

TEST(Stats, Cv2) {
  const std::vector<double> x{1.0, 3.0};
  EXPECT_DOUBLE_EQ(cv2(x), 0.5);
  const std::vector<double> y{5.0, 15.0};
  EXPECT_DOUBLE_EQ(cv2(y), cv2(x));
  const std::vector<double> z{-1.0, 1.0};
  EXPECT_KIND(cv2(z), ZeroMean);
}

TEST(Stats, QuantileCIBracketsEstimate) {
  std::vector<double> v;
  for (int i = 1; i <= 400; ++i) v.push_back(i);
  const QuantileCI ci = quantile_ci(EmpiricalDistribution(v), 0.5);
  EXPECT_EQ(ci.estimate, 200.0);
  EXPECT_LT(ci.lo, ci.estimate);
  EXPECT_GT(ci.hi, ci.estimate);
}

TEST(Ensemble, ZeroGammaIsDeterministic) {
  ExperimentPlan plan;
  plan.S = 8;
  plan.replicas = 10;
  plan.functionals = {Functional::LR, Functional::BT, Functional::Max};
  const auto d = run_ensemble(plan);
  ASSERT_EQ(d.size(), 3u);
  for (double v : d[0].samples()) EXPECT_EQ(v, 8.0);
  for (double v : d[2].samples()) EXPECT_EQ(v, 15.0);
}

TEST(Ensemble, ThreadCountInvariant) {
  ExperimentPlan plan;
  plan.K = 2;
  plan.S = 8;
  plan.gamma = 0.4;
  plan.replicas = 24;
  plan.seed = 99;
  plan.functionals = {Functional::LR, Functional::Hard};
  const auto a = run_ensemble(plan);
  plan.threads = 4;
  const auto b = run_ensemble(plan);
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t i = 0; i < a[j].n(); ++i) EXPECT_EQ(a[j].samples()[i], b[j].samples()[i]);
}

TEST(Ensemble, IndependentSeedsAgreeInMean) {
  const GridBox b = GridBox::square(16);
  const auto a = ensemble(b, Functional::LR, 0.1, 2000, 1);
  const auto c = ensemble(b, Functional::LR, 0.1, 2000, 2);
  const double se = std::sqrt(variance(a.samples()) / 2000 + variance(c.samples()) / 2000);
  EXPECT_LT(std::abs(mean(a.samples()) - mean(c.samples())), 3 * se);
}

TEST(QuantileRatio, Deterministic) {
  const EmpiricalDistribution x(std::vector<double>(5, 8.0)), y(std::vector<double>(5, 16.0));
  const auto r = quantile_ratio_bounds(x, y, 0.5, 0.5, 0.9, 0.9, 0.0, 0.0);
  EXPECT_EQ(r.A, 1.0);
  EXPECT_EQ(r.B, 1.0);
  EXPECT_EQ(r.quantile_ratio, 0.5);
  EXPECT_TRUE(r.mean_inside);
  EXPECT_TRUE(r.quantiles_inside);
  EXPECT_TRUE(r.assumptions_hold);
  EXPECT_KIND(quantile_ratio_bounds(x, y, 0.5, 0.5, 0.9, 0.9, 0.5, 0.0), AssumptionViolated);
  EXPECT_KIND(quantile_ratio_bounds(x, y, 0.0, 0.5, 0.9, 0.9, 0.0, 0.0), BadP);
}

TEST(QuantileRatio, EnvelopesAtSmallGamma) {
  const auto x = ensemble(GridBox::square(16), Functional::LR, 0.1, 200, 3);
  const auto y = ensemble(GridBox::square(32), Functional::LR, 0.1, 200, 4);
  const auto r = quantile_ratio_bounds(x, y, 0.5, 0.5, 0.9, 0.9, 0.05, 0.05);
  EXPECT_TRUE(r.assumptions_hold);
  EXPECT_TRUE(std::isfinite(r.A) && std::isfinite(r.B) && std::isfinite(r.A2) && std::isfinite(r.B2));
  EXPECT_LE(r.A, r.B);
  EXPECT_TRUE(r.mean_inside);
  EXPECT_TRUE(r.quantiles_inside);
  const auto same = quantile_ratio_bounds(x, x, 0.5, 0.5, 0.5, 0.5, 0.05, 0.05);
  EXPECT_EQ(same.quantile_ratio, 1.0);
  EXPECT_TRUE(same.mean_inside);
}

TEST(Rsw, ZeroGammaRatioTwo) {
  const auto rows = rsw_diagnostic({4, 8, 16}, 0.0, 0.5, 5, 1);
  for (const auto& r : rows) EXPECT_EQ(r.ratio, 2.0);
  const auto a = rsw_diagnostic({4, 8}, 0.3, 0.5, 30, 7);
  const auto b = rsw_diagnostic({8, 4}, 0.3, 0.5, 30, 7);
  EXPECT_EQ(a[0].ratio, b[1].ratio);
  EXPECT_EQ(a[1].ratio, b[0].ratio);
  EXPECT_GE(a[0].ratio, 1.0);
}

TEST(PowerLaw, ZeroGammaIsLinear) {
  const auto rep = power_law_fit(0.0, 0.5, {4, 8, 16, 32}, 5, 1);
  EXPECT_NEAR(rep.exponent, 1.0, 1e-12);
  const std::vector<double> s{1, 2, 4}, th{3, 6, 12};
  EXPECT_NEAR(log_log_fit(s, th).slope, 1.0, 1e-12);
  const auto pos = power_law_fit(0.3, 0.5, {4, 8, 16}, 40, 2);
  EXPECT_TRUE(std::isfinite(pos.exponent));
  EXPECT_LE(pos.exponent_ci.lo, pos.exponent_ci.hi);
  EXPECT_KIND(power_law_fit(0.0, 0.5, {4, 8}, 5, 1), InvalidArgument);
}

TEST(Gluing, ZeroGammaNeverViolated) {
  GluingParams gp;
  gp.gamma = 0.0;
  gp.n = 20;
  for (const auto& row : gluing_check(gp)) EXPECT_FALSE(row.violated) << row.inequality << " y=" << row.y;
  gp.gamma = 0.1;
  gp.n = 300;
  const auto a = gluing_check(gp), b = gluing_check(gp);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_GE(a.size(), 10u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].big, b[i].big);
}

TEST(Tails, ZeroGammaAndMonotone) {
  const auto rep = crossing_tail_check(0.0, 2, 2, 4, {0.25, 0.5, 1.0, 2.0}, 20, 1);
  EXPECT_EQ(rep.mean_hard, 8.0);
  for (const auto& r : rep.rows) EXPECT_EQ(r.tail, r.threshold <= 8.0 ? 1.0 : 0.0);
  const auto pos = crossing_tail_check(0.4, 2, 2, 4, {0.1, 0.2, 0.4, 0.8}, 200, 2);
  for (std::size_t i = 1; i < pos.rows.size(); ++i) EXPECT_LE(pos.rows[i].tail, pos.rows[i - 1].tail);
  // 8 x 16 box: easy crossing 8, diameter 8 + 16 - 1 = 23.
  const auto d = diameter_tail(0.0, 8, 0.5, {1.0, 2.875, 3.0}, 10, 3);
  EXPECT_EQ(d.mean_hard, 8.0);
  EXPECT_EQ(d.rows[0].tail, 1.0);
  EXPECT_EQ(d.rows[1].tail, 1.0);
  EXPECT_EQ(d.rows[2].tail, 0.0);
}

TEST(EfronStein, LinearSumIsTight) {
  const std::size_t r = 8;
  const auto rep = efron_stein_harness(
      r, 20000, 12, [](std::size_t, NormalSource& g) { return g(); },
      [](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += static_cast<double>(j + 1) * x[j];
        return s;
      });
  EXPECT_NEAR(rep.variance.estimate / rep.half_sum.estimate, 1.0, 0.05);
  EXPECT_NEAR(rep.variance.estimate, 204.0, 204.0 * 0.05);
  const auto mx = efron_stein_harness(
      4, 5000, 13, [](std::size_t, NormalSource& g) { return g(); },
      [](std::span<const double> x) { return *std::max_element(x.begin(), x.end()); });
  EXPECT_LE(mx.variance.estimate, mx.half_sum.estimate);
}

TEST(EfronStein, ExperimentShapes) {
  const auto zero = efron_stein_experiment(0.0, 2, 2, 4, 20, 1);
  EXPECT_EQ(zero.full.variance.estimate, 0.0);
  EXPECT_EQ(zero.full.half_sum.estimate, 0.0);
  const auto ex = efron_stein_experiment(0.3, 2, 2, 4, 200, 2);
  EXPECT_EQ(ex.boxes_only.block_half.size(), 4u);
  EXPECT_EQ(ex.full.block_half.size(), 5u);
  EXPECT_LE(ex.boxes_only.half_sum.estimate, ex.full.half_sum.estimate);
  for (double o : ex.full.occupancy) {
    EXPECT_GE(o, 0.0);
    EXPECT_LE(o, 1.0);
  }
  EXPECT_KIND(efron_stein_experiment(0.1, 8, 8, 8, 2, 1), TooLarge);
}

TEST(Fkg, ZeroGammaDegenerateAndErrorShrinks) {
  EXPECT_TRUE(fkg_sign_check(0.0, 8, 20, 1).degenerate);
  const auto a = fkg_sign_check(0.3, 8, 500, 2), b = fkg_sign_check(0.3, 8, 2000, 3);
  EXPECT_FALSE(a.degenerate);
  EXPECT_NEAR(b.std_error / a.std_error, 0.5, 0.15);
}

TEST(Cv2, ZeroGammaAndGrowth) {
  EXPECT_EQ(cv2_report(0.0, 8, 10, 1).estimate, 0.0);
  const auto lo = cv2_report(0.05, 16, 300, 2), hi = cv2_report(0.5, 16, 300, 2);
  EXPECT_LT(lo.estimate, hi.estimate);
}

TEST(PassProbe, SmallRun) {
  const PassProbe p = pass_probe(0.2, 6, 4, 4, 20, 1);
  EXPECT_EQ(p.replicas, 20u);
  EXPECT_GE(p.min_passes, 2u);
  EXPECT_EQ(p.overlapping, 0u);
  EXPECT_EQ(p.cost_failures, 0u);
}
