#include <gtest/gtest.h>

#include <cmath>

#include "lfpp/gff.hpp"
#include "lfpp/stats.hpp"
#include "oracles.hpp"

using namespace lfpp;

TEST(Green, SingleSite) {
  const GreenMatrix g = green_dense(GridBox(0, 0, 3, 3));
  ASSERT_EQ(g.size(), 1u);
  EXPECT_NEAR(g.entries()(0, 0), 1.0, 1e-12);
}

TEST(Green, TwoSites) {
  const GreenMatrix g = green_dense(GridBox(0, 0, 4, 3));
  ASSERT_EQ(g.size(), 2u);
  EXPECT_NEAR(g.entries()(0, 0), 16.0 / 15.0, 1e-12);
  EXPECT_NEAR(g.entries()(1, 1), 16.0 / 15.0, 1e-12);
  EXPECT_NEAR(g.entries()(0, 1), 4.0 / 15.0, 1e-12);
}

TEST(Green, InvertsKilledWalk) {
  const GridBox d(0, 0, 9, 7);
  const GreenMatrix g = green_dense(d);
  const Eigen::MatrixXd ip = Eigen::MatrixXd(killed_walk_operator(d));
  const Eigen::MatrixXd prod = g.entries() * ip;
  EXPECT_LT((prod - Eigen::MatrixXd::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((g.entries() - oracle::dense_green(d)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Green, BoundaryEntriesVanish) {
  const GreenMatrix g = green_dense(GridBox(0, 0, 5, 5));
  EXPECT_EQ(g.at({0, 2}, {2, 2}), 0.0);
  EXPECT_GT(g.at({2, 2}, {2, 2}), 1.0);
}

TEST(Green, SpectralColumnMatchesDense) {
  const GridBox d(-3, 2, 11, 8);
  const auto ref = oracle::dense_green(d);
  const GridBox in = interior(d);
  for (Vertex v : {Vertex{0, 5}, Vertex{-2, 3}, Vertex{6, 8}}) {
    const BoxArray<double> col = green_column(d, v);
    for (std::size_t i = 0; i < in.size(); ++i)
      EXPECT_NEAR(col.at(in.vertex(i)), ref(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(in.index(v))),
                  1e-12);
  }
}

TEST(Green, DenseLimit) { EXPECT_KIND(green_dense(GridBox(0, 0, 12, 12), 50), TooLarge); }

TEST(Sampler, DeterministicWithZeroBoundary) {
  const GridBox base(0, 0, 5, 4);
  const GaussianField a = sample_dgff(base, 11), b = sample_dgff(base, 11), c = sample_dgff(base, 12);
  EXPECT_EQ(a.domain(), blow_up(base));
  EXPECT_EQ(a.values().values()[0], b.values().values()[0]);
  bool differs = false;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    EXPECT_EQ(a.values()[i], b.values()[i]);
    differs |= a.values()[i] != c.values()[i];
    if (a.domain().on_boundary(a.domain().vertex(i))) EXPECT_EQ(a.values()[i], 0.0);
  }
  EXPECT_TRUE(differs);
}

TEST(Sampler, CovarianceMatchesGreen) {
  const GridBox base = GridBox::square(2);  // 6 x 6 domain, 16 interior sites
  const GridBox in = interior(blow_up(base));
  const auto ref = oracle::dense_green(blow_up(base));
  const int n = 20000;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ref.rows(), ref.cols());
  Eigen::VectorXd y(ref.rows());
  for (int r = 0; r < n; ++r) {
    const GaussianField f = sample_dgff(base, derive_seed(5, static_cast<std::uint64_t>(r)));
    for (std::size_t i = 0; i < in.size(); ++i) y(static_cast<Eigen::Index>(i)) = f.at(in.vertex(i));
    acc.noalias() += y * y.transpose();
  }
  acc /= n;
  EXPECT_LT((acc - ref).cwiseAbs().maxCoeff(), 0.05);
}

TEST(CoarseFine, HarmonicAndAdditive) {
  const GridBox base = GridBox::square(12);
  const GaussianField f = sample_dgff(base, 3);
  const GridBox sub(4, 4, 4, 4);
  const CoarseFine cf = coarse_fine_decompose(f, sub);
  const GridBox region = blow_up(sub);
  EXPECT_EQ(cf.coarse.box(), region);
  for (std::size_t i = 0; i < region.size(); ++i) {
    const Vertex v = region.vertex(i);
    EXPECT_NEAR(cf.coarse[i] + cf.fine[i], f.at(v), 1e-12);
    if (region.on_boundary(v)) {
      EXPECT_EQ(cf.fine[i], 0.0);
      continue;
    }
    const double avg = 0.25 * (cf.coarse.at({v.x + 1, v.y}) + cf.coarse.at({v.x - 1, v.y}) +
                               cf.coarse.at({v.x, v.y + 1}) + cf.coarse.at({v.x, v.y - 1}));
    EXPECT_NEAR(cf.coarse[i], avg, 1e-10);
  }
  EXPECT_KIND(coarse_fine_decompose(f, GridBox(-12, 0, 4, 4)), NotContained);
}

TEST(CoarseFine, ConstantBoundaryGivesConstantCoarse) {
  BoxArray<double> data(GridBox(0, 0, 9, 9), 2.5);
  data.at({4, 4}) = -7.0;  // interior values are ignored
  const BoxArray<double> h = harmonic_extension(data);
  for (double v : h.values()) EXPECT_NEAR(v, 2.5, 1e-12);
}

TEST(CoarseFine, FineCovarianceIsBlowUpGreen) {
  const GridBox base = GridBox::square(6), sub(2, 2, 2, 2);
  const GridBox region = blow_up(sub), in = interior(region);
  const auto ref = oracle::dense_green(region);
  const int n = 20000;
  const auto m = static_cast<Eigen::Index>(in.size());
  Eigen::MatrixXd ff = Eigen::MatrixXd::Zero(m, m), cf = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd a(m), b(m);
  for (int r = 0; r < n; ++r) {
    const CoarseFine d = coarse_fine_decompose(sample_dgff(base, derive_seed(21, static_cast<std::uint64_t>(r))), sub);
    for (std::size_t i = 0; i < in.size(); ++i) {
      a(static_cast<Eigen::Index>(i)) = d.fine.at(in.vertex(i));
      b(static_cast<Eigen::Index>(i)) = d.coarse.at(in.vertex(i));
    }
    ff.noalias() += a * a.transpose();
    cf.noalias() += b * a.transpose();
  }
  ff /= n;
  cf /= n;
  EXPECT_LT((ff - ref).cwiseAbs().maxCoeff(), 0.05);
  // Coarse and fine are independent; cross-covariance entries have standard
  // error roughly sqrt(G_coarse G_fine / n) < 0.01.
  EXPECT_LT(cf.cwiseAbs().maxCoeff(), 0.05);
}

TEST(CoarseMax, DegenerateAndFinite) {
  // The blow-up of a single base vertex is the whole domain, whose boundary
  // layer is identically zero.
  const GaussianField f = sample_dgff(GridBox::square(1), 4);
  EXPECT_EQ(coarse_max(f, GridBox::square(1)), 0.0);
  const auto rows = coarse_max_diagnostic({4, 8}, 20, 9);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_TRUE(std::isfinite(r.mean));
    EXPECT_GT(r.std_error, 0.0);
  }
}

TEST(EdgeFlows, SingleInteriorVertex) {
  const GridBox d(0, 0, 3, 3);
  const EdgeFlows fl(d, green_dense(d));
  ASSERT_EQ(fl.edge_count(), 4u);
  double energy = 0.0;
  for (std::size_t e = 0; e < 4; ++e) {
    EXPECT_NEAR(std::abs(fl.flow({1, 1}, e)), 0.25, 1e-15);
    energy += fl.flow({1, 1}, e) * fl.flow({1, 1}, e);
  }
  EXPECT_NEAR(energy, 0.25, 1e-15);
}

TEST(EdgeFlows, EnergyIdentity) {
  for (std::int64_t side : {4, 7, 12}) {
    const GridBox d(0, 0, side, side - 1);
    const GreenMatrix g = green_dense(d);
    const EdgeFlows fl(d, g);
    const GridBox in = interior(d);
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double e = fl.matrix().row(static_cast<Eigen::Index>(i)).squaredNorm();
      EXPECT_NEAR(e, g.entries()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) / 4.0, 1e-8);
    }
    // Full covariance: 4 F F^T = G.
    EXPECT_LT((4.0 * fl.matrix() * fl.matrix().transpose() - g.entries()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(EdgeFlows, ResampleNothingOrEverything) {
  const GridBox d(0, 0, 8, 8);
  const EdgeNoiseField enf = to_edge_representation(d, green_dense(d), 2);
  const Resampled none = resample_subbox(enf, GridBox(3, 3, 1, 1), 5);  // no edge inside a single vertex
  for (double v : none.delta.values()) EXPECT_EQ(v, 0.0);
  EXPECT_KIND(resample_subbox(enf, GridBox(5, 5, 4, 4), 5), NotContained);

  // Whole domain: resampled field independent of the original.
  const int n = 20000;
  std::vector<double> a(n), b(n);
  const Vertex x{3, 4};
  for (int r = 0; r < n; ++r) {
    const EdgeNoiseField f = enf.redraw(derive_seed(8, static_cast<std::uint64_t>(r)));
    const Resampled rs = resample_subbox(f, d, derive_seed(9, static_cast<std::uint64_t>(r)));
    a[static_cast<std::size_t>(r)] = rs.original.at(x);
    b[static_cast<std::size_t>(r)] = rs.resampled.at(x);
  }
  EXPECT_LE(std::abs(correlation(a, b)), 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST(EdgeFlows, XiVarianceMatchesFlowEnergy) {
  const GridBox d(0, 0, 10, 10);
  const EdgeNoiseField enf = to_edge_representation(d, green_dense(d), 1);
  const GridBox c(3, 3, 4, 4);
  const Vertex x{1, 8};
  double predicted = 0.0;
  for (std::size_t e : enf.flows().edges_inside(c)) predicted += 4.0 * enf.flows().flow(x, e) * enf.flows().flow(x, e);
  const int n = 20000;
  double s2 = 0.0;
  for (int r = 0; r < n; ++r) {
    const EdgeNoiseField f = enf.redraw(derive_seed(30, static_cast<std::uint64_t>(r)));
    const double delta = resample_subbox(f, c, derive_seed(31, static_cast<std::uint64_t>(r))).delta.at(x);
    s2 += delta * delta;
  }
  // Xi = Y - Y^(i) has variance 2 * 4 * sum i_x(e)^2.
  EXPECT_NEAR(s2 / n, 2.0 * predicted, 0.1 * 2.0 * predicted);
}

TEST(EdgeFlows, FlowBoundProbe) {
  for (std::int64_t s : {4, 8}) {
    const FlowBoundProbe p = flow_bound_probe(s, 3, 3);
    EXPECT_GT(p.max_scaled_flow, 0.0);
    EXPECT_LE(p.max_scaled_flow, 4.0);
    EXPECT_LE(p.max_flow_energy, 8.0);
  }
}
