#pragma once

// Seeded Monte Carlo ensembles and the statistical diagnostics built on them.
// Every diagnostic draws each arm (scale, box shape, auxiliary ensemble) from
// its own sub-seed, and every replica from derive_seed(arm, replica), so
// results are bit-identical for any thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lfpp/error.hpp"
#include "lfpp/fpp.hpp"
#include "lfpp/gff.hpp"
#include "lfpp/lattice.hpp"
#include "lfpp/parallel.hpp"
#include "lfpp/passes.hpp"
#include "lfpp/rng.hpp"
#include "lfpp/stats.hpp"

namespace lfpp {

enum class Functional { LR, BT, Easy, Hard, Max };

inline std::string to_string(Functional f) {
  switch (f) {
    case Functional::LR: return "LR";
    case Functional::BT: return "BT";
    case Functional::Easy: return "easy";
    case Functional::Hard: return "hard";
    case Functional::Max: return "max";
  }
  return "?";
}

inline std::string describe(const GridBox& b) {
  return "[" + std::to_string(b.x0) + "," + std::to_string(b.x1()) + ")x[" + std::to_string(b.y0) + "," +
         std::to_string(b.y1()) + ")";
}

inline double evaluate(Functional f, const GridBox& box, const WeightField& wf) {
  switch (f) {
    case Functional::LR: return crossing_weight(box, CrossingSpec::lr(), wf).weight;
    case Functional::BT: return crossing_weight(box, CrossingSpec::bt(), wf).weight;
    case Functional::Easy: return crossing_weight(box, CrossingSpec::easy(), wf).weight;
    case Functional::Hard: return crossing_weight(box, CrossingSpec::hard(), wf).weight;
    case Functional::Max: return diameter_weights(box, wf, DiameterMode::All).value;
  }
  return 0.0;
}

/// Runs fn(replica_seed, out) for n replicas; out has k slots. Returns k
/// columns indexed by replica.
template <class F>
std::vector<std::vector<double>> replicate(std::size_t n, std::size_t k, std::uint64_t arm_seed, unsigned threads,
                                           F&& fn) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "need at least one replica");
  std::vector<double> flat(n * k);
  parallel_for(n, threads, [&](std::size_t r) { fn(derive_seed(arm_seed, r), std::span<double>(&flat[r * k], k)); });
  std::vector<std::vector<double>> cols(k, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < k; ++j) cols[j][r] = flat[r * k + j];
  return cols;
}

struct ExperimentPlan {
  std::int64_t K = 1, L = 1, S = 8;
  double gamma = 0.0;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  std::vector<Functional> functionals{Functional::LR};
  unsigned threads = 1;

  GridBox box() const { return GridBox(0, 0, K * S, L * S); }
};

/// One distribution per requested functional, all evaluated on the same
/// field per replica (field over blow_up of the plan's box).
inline std::vector<EmpiricalDistribution> run_ensemble(const ExperimentPlan& plan) {
  if (plan.functionals.empty()) fail(ErrorKind::InvalidArgument, "no functional requested");
  if (!(plan.gamma >= 0.0)) fail(ErrorKind::InvalidArgument, "gamma must be non-negative");
  const GridBox box = plan.box();
  auto cols = replicate(plan.replicas, plan.functionals.size(), plan.seed, plan.threads,
                        [&](std::uint64_t s, std::span<double> out) {
                          const WeightField wf(sample_dgff(box, s), plan.gamma);
                          for (std::size_t j = 0; j < out.size(); ++j) out[j] = evaluate(plan.functionals[j], box, wf);
                        });
  std::vector<EmpiricalDistribution> out;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    std::string d = to_string(plan.functionals[j]) + " on " + describe(box) + " gamma=" + std::to_string(plan.gamma) +
                    " n=" + std::to_string(plan.replicas);
    out.emplace_back(std::move(cols[j]), std::move(d), plan.seed);
  }
  return out;
}

/// Single-functional ensemble on an arbitrary box.
inline EmpiricalDistribution ensemble(const GridBox& box, Functional f, double gamma, std::size_t n, std::uint64_t seed,
                                      unsigned threads = 1) {
  auto cols = replicate(n, 1, seed, threads, [&](std::uint64_t s, std::span<double> out) {
    out[0] = evaluate(f, box, WeightField(sample_dgff(box, s), gamma));
  });
  return EmpiricalDistribution(std::move(cols[0]),
                               to_string(f) + " on " + describe(box) + " gamma=" + std::to_string(gamma), seed);
}

/// Distribution-free confidence interval for the p-quantile: order statistics
/// at n p -/+ z sqrt(n p (1-p)).
struct QuantileCI {
  double estimate = 0.0, lo = 0.0, hi = 0.0;
};

inline QuantileCI quantile_ci(const EmpiricalDistribution& d, double p, double z = 1.96) {
  const double n = static_cast<double>(d.n());
  const double half = z * std::sqrt(n * p * (1.0 - p));
  auto at = [&](double k) {
    const auto i = static_cast<std::size_t>(std::clamp(k, 1.0, n));
    return d.samples()[i - 1];
  };
  return {quantile(d, p), at(std::floor(n * p - half)), at(std::ceil(n * p + half))};
}

// ---------------------------------------------------------------------------
// Chebyshev quantile/mean envelopes. With CV^2(X) < delta < p:
//   (1 - sqrt(delta/p)) mu <= F^{-1}(p) <= (1 + sqrt(delta/(1-p))) mu.

struct QuantileRatioReport {
  double A = 0.0, B = 0.0;    // envelope for mean ratio vs quantile ratio
  double A2 = 0.0, B2 = 0.0;  // envelope for the (p', q') quantile ratio
  double quantile_ratio = 0.0;   // F_X^{-1}(p) / F_Y^{-1}(q)
  double mean_ratio = 0.0;       // mu_X / mu_Y
  double quantile_ratio2 = 0.0;  // F_X^{-1}(p') / F_Y^{-1}(q')
  double cv2_x = 0.0, cv2_y = 0.0;
  bool assumptions_hold = false;  // empirical CV^2 below the stated deltas
  bool mean_inside = false;
  bool quantiles_inside = false;
};

namespace detail {
inline double lower_factor(double delta, double p) { return 1.0 - std::sqrt(delta / p); }
inline double upper_factor(double delta, double p) {
  return p >= 1.0 ? std::numeric_limits<double>::infinity() : 1.0 + std::sqrt(delta / (1.0 - p));
}
inline bool within_cv2(double cv2, double delta) { return cv2 < delta || (delta == 0.0 && cv2 == 0.0); }
}  // namespace detail

inline QuantileRatioReport quantile_ratio_bounds(const EmpiricalDistribution& dx, const EmpiricalDistribution& dy,
                                                 double p, double q, double p2, double q2, double delta_x,
                                                 double delta_y) {
  for (double v : {p, q, p2, q2})
    if (!(v > 0.0 && v <= 1.0)) fail(ErrorKind::BadP, "probability levels must lie in (0, 1]");
  if (!(delta_x >= 0.0 && delta_y >= 0.0)) fail(ErrorKind::InvalidArgument, "deltas must be non-negative");
  if (delta_x >= std::min(p, p2) || delta_y >= std::min(q, q2))
    fail(ErrorKind::AssumptionViolated, "delta must lie below every probability level it is paired with");
  using detail::lower_factor, detail::upper_factor;
  QuantileRatioReport r;
  r.A = lower_factor(delta_y, q) / upper_factor(delta_x, p);
  r.B = upper_factor(delta_y, q) / lower_factor(delta_x, p);
  r.A2 = r.A * lower_factor(delta_x, p2) / upper_factor(delta_y, q2);
  r.B2 = r.B * upper_factor(delta_x, p2) / lower_factor(delta_y, q2);
  r.quantile_ratio = quantile(dx, p) / quantile(dy, q);
  r.quantile_ratio2 = quantile(dx, p2) / quantile(dy, q2);
  r.mean_ratio = mean(dx.samples()) / mean(dy.samples());
  r.cv2_x = cv2(dx);
  r.cv2_y = cv2(dy);
  r.assumptions_hold = detail::within_cv2(r.cv2_x, delta_x) && detail::within_cv2(r.cv2_y, delta_y);
  // Relative tolerance so the delta = 0 collapse to equality survives rounding.
  const double eps = 1e-12;
  r.mean_inside = r.A * r.quantile_ratio <= r.mean_ratio * (1 + eps) &&
                  r.mean_ratio <= r.B * r.quantile_ratio * (1 + eps);
  r.quantiles_inside = r.A2 * r.quantile_ratio <= r.quantile_ratio2 * (1 + eps) &&
                       r.quantile_ratio2 <= r.B2 * r.quantile_ratio * (1 + eps);
  return r;
}

// ---------------------------------------------------------------------------
// RSW ratio per scale on [0,S) x [0,2S).

struct RswRow {
  std::int64_t S = 0;
  double theta_hard = 0.0, theta_easy = 0.0, ratio = 0.0;
};

inline std::vector<RswRow> rsw_diagnostic(const std::vector<std::int64_t>& scales, double gamma, double p,
                                          std::size_t n, std::uint64_t seed, unsigned threads = 1) {
  std::vector<RswRow> rows;
  for (std::int64_t s : scales) {
    const GridBox box(0, 0, s, 2 * s);
    const auto hard = ensemble(box, Functional::Hard, gamma, n, derive_seed(derive_seed(seed, "rsw/hard"), s), threads);
    const auto easy = ensemble(box, Functional::Easy, gamma, n, derive_seed(derive_seed(seed, "rsw/easy"), s), threads);
    RswRow row{s, quantile(hard, p), quantile(easy, p), 0.0};
    row.ratio = row.theta_hard / row.theta_easy;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Power-law growth of easy-crossing quantiles in S.

struct PowerLawRow {
  std::int64_t S = 0;
  double theta_easy = 0.0;
  double residual = 0.0;  // of the log-log fit
};

struct PowerLawReport {
  double exponent = 0.0;
  double intercept = 0.0;  // log-scale
  BootstrapSummary exponent_ci;
  std::vector<PowerLawRow> rows;
};

/// Slope of log theta against log S from (S, theta) pairs.
inline LinearFit log_log_fit(std::span<const double> s, std::span<const double> theta) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0 && theta[i] > 0.0)) fail(ErrorKind::DegenerateData, "log-log fit needs positive values");
    lx.push_back(std::log(s[i]));
    ly.push_back(std::log(theta[i]));
  }
  return least_squares(lx, ly);
}

inline PowerLawReport power_law_fit(double gamma, double p, const std::vector<std::int64_t>& scales, std::size_t n,
                                    std::uint64_t seed, unsigned threads = 1) {
  if (scales.size() < 3) fail(ErrorKind::InvalidArgument, "power-law fit needs at least three scales");
  std::vector<std::vector<double>> samples;  // unsorted, replica order
  std::vector<double> sx;
  for (std::int64_t s : scales) {
    const GridBox box(0, 0, s, 2 * s);
    auto cols = replicate(n, 1, derive_seed(derive_seed(seed, "powerlaw"), s), threads,
                          [&](std::uint64_t rs, std::span<double> out) {
                            out[0] = evaluate(Functional::Easy, box, WeightField(sample_dgff(box, rs), gamma));
                          });
    samples.push_back(std::move(cols[0]));
    sx.push_back(static_cast<double>(s));
  }
  auto thetas = [&](std::span<const std::size_t> idx) {
    std::vector<double> th;
    std::vector<double> buf(idx.size());
    for (const auto& col : samples) {
      for (std::size_t i = 0; i < idx.size(); ++i) buf[i] = col[idx[i]];
      std::sort(buf.begin(), buf.end());
      th.push_back(quantile(buf, p));
    }
    return th;
  };
  PowerLawReport rep;
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const std::vector<double> th = thetas(all);
  const LinearFit fit = log_log_fit(sx, th);
  rep.exponent = fit.slope;
  rep.intercept = fit.intercept;
  for (std::size_t i = 0; i < scales.size(); ++i) rep.rows.push_back({scales[i], th[i], fit.residuals[i]});
  rep.exponent_ci = bootstrap(
      n, [&](std::span<const std::size_t> idx) { return log_log_fit(sx, thetas(idx)).slope; },
      derive_seed(seed, "powerlaw/bootstrap"));
  return rep;
}

// ---------------------------------------------------------------------------
// Gluing inequalities.
//   stretch: P[Psi_LR(B) <= 2ky] >= P[Psi_LR(A) <= y]^(2k-1) - o(1),
//            A = [0,aS)x[0,bS), B = [0,(ka-(k-1)b)S)x[0,bS), a > b.
//   squish:  P[Psi_easy(B') <= y] <= 2k P[Psi_easy(A') <= y] + o(1),
//            A' = [0,bS)x[0,(b+1)S), B' = [0,bS)x[0,kS), b < k.

struct GluingParams {
  double gamma = 0.1;
  std::int64_t S = 8;
  std::int64_t k = 2;
  std::int64_t a = 2, b = 1;
  std::vector<double> y_grid;  // empty: detail::spanning_grid
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  double slack = 0.05;
  unsigned threads = 1;
};

struct GluingRow {
  std::string inequality;  // "stretch" or "squish"
  double y = 0.0;
  double big = 0.0;    // empirical probability for the big box
  double bound = 0.0;  // the other side
  double std_error = 0.0;
  double slack = 0.0;
  bool violated = false;
};

inline double fraction_at_most(const EmpiricalDistribution& d, double y) {
  const auto s = d.samples();
  return static_cast<double>(std::upper_bound(s.begin(), s.end(), y) - s.begin()) / static_cast<double>(d.n());
}

namespace detail {
/// Ten evenly spaced y covering the 5%..95% ranges of `a` and of `scale * b`.
inline std::vector<double> spanning_grid(const EmpiricalDistribution& a, const EmpiricalDistribution& b, double scale) {
  const double lo = std::min(quantile(a, 0.05), scale * quantile(b, 0.05));
  const double hi = std::max(quantile(a, 0.95), scale * quantile(b, 0.95));
  std::vector<double> ys;
  for (int i = 0; i < 10; ++i) ys.push_back(lo + (hi - lo) * i / 9.0);
  return ys;
}
}  // namespace detail

inline std::vector<GluingRow> gluing_check(const GluingParams& gp) {
  if (gp.a <= gp.b || gp.b < 1 || gp.k < 1 || gp.S < 1)
    fail(ErrorKind::InvalidArgument, "gluing needs a > b >= 1, k >= 1, S >= 1");
  const auto n = static_cast<double>(gp.n);
  const GridBox small(0, 0, gp.a * gp.S, gp.b * gp.S);
  const GridBox big(0, 0, (gp.k * gp.a - (gp.k - 1) * gp.b) * gp.S, gp.b * gp.S);
  const auto dA = ensemble(small, Functional::LR, gp.gamma, gp.n, derive_seed(gp.seed, "gluing/stretch/A"), gp.threads);
  const auto dB = ensemble(big, Functional::LR, gp.gamma, gp.n, derive_seed(gp.seed, "gluing/stretch/B"), gp.threads);
  const double twok = 2.0 * static_cast<double>(gp.k);
  const std::vector<double> ys =
      gp.y_grid.empty() ? detail::spanning_grid(dA, dB, 1.0 / twok) : gp.y_grid;
  std::vector<GluingRow> rows;
  const double e = static_cast<double>(2 * gp.k - 1);
  for (double y : ys) {
    const double pb = fraction_at_most(dB, twok * y);
    const double pa = fraction_at_most(dA, y);
    const double rhs = std::pow(pa, e);
    // Delta method for pa^e.
    const double se_rhs = e * std::pow(pa, e - 1) * std::sqrt(pa * (1 - pa) / n);
    const double se = std::sqrt(pb * (1 - pb) / n + se_rhs * se_rhs);
    rows.push_back({"stretch", y, pb, rhs, se, gp.slack, rhs - pb > 3 * se + gp.slack});
  }
  if (gp.b < gp.k) {
    const GridBox a2(0, 0, gp.b * gp.S, (gp.b + 1) * gp.S);
    const GridBox b2(0, 0, gp.b * gp.S, gp.k * gp.S);
    const auto dA2 = ensemble(a2, Functional::Easy, gp.gamma, gp.n, derive_seed(gp.seed, "gluing/squish/A"), gp.threads);
    const auto dB2 = ensemble(b2, Functional::Easy, gp.gamma, gp.n, derive_seed(gp.seed, "gluing/squish/B"), gp.threads);
    const std::vector<double> ys2 = gp.y_grid.empty() ? detail::spanning_grid(dA2, dB2, 1.0) : gp.y_grid;
    const double f = 2.0 * static_cast<double>(gp.k);
    for (double y : ys2) {
      const double pb = fraction_at_most(dB2, y);
      const double pa = fraction_at_most(dA2, y);
      const double se = std::sqrt(pb * (1 - pb) / n + f * f * pa * (1 - pa) / n);
      rows.push_back({"squish", y, pb, f * pa, se, gp.slack, pb - f * pa > 3 * se + gp.slack});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Crossing tail: P[Psi_LR(R) >= 2uK E Psi_hard(A)] against u^(-L/3), with
// R = [0,KS)x[0,LS) and A = [0,S)x[0,2S).

struct TailRow {
  double u = 0.0;
  double threshold = 0.0;
  double tail = 0.0;
  double std_error = 0.0;
  double envelope = 0.0;
};

struct TailReport {
  double mean_hard = 0.0;  // auxiliary estimate of E Psi_hard(A) (crossing tail) or Theta_easy[q] (diameter tail)
  std::vector<TailRow> rows;
};

inline double fraction_at_least(const EmpiricalDistribution& d, double t) {
  const auto s = d.samples();
  return static_cast<double>(s.end() - std::lower_bound(s.begin(), s.end(), t)) / static_cast<double>(d.n());
}

inline TailReport crossing_tail_check(double gamma, std::int64_t K, std::int64_t L, std::int64_t S,
                                      const std::vector<double>& us, std::size_t n, std::uint64_t seed,
                                      unsigned threads = 1) {
  const GridBox r(0, 0, K * S, L * S);
  const auto aux = ensemble(GridBox(0, 0, S, 2 * S), Functional::Hard, gamma, n, derive_seed(seed, "tails/aux"), threads);
  const auto main = ensemble(r, Functional::LR, gamma, n, derive_seed(seed, "tails/main"), threads);
  TailReport rep;
  rep.mean_hard = mean(aux.samples());
  for (double u : us) {
    const double t = 2.0 * u * static_cast<double>(K) * rep.mean_hard;
    const double ph = fraction_at_least(main, t);
    rep.rows.push_back({u, t, ph, std::sqrt(ph * (1 - ph) / static_cast<double>(n)),
                        std::pow(u, -static_cast<double>(L) / 3.0)});
  }
  return rep;
}

/// Tail of Psi_max / Theta_easy[q] on [0,S) x [0,2S). The envelope column is
/// left at 0: the power-law constants are existential.
inline TailReport diameter_tail(double gamma, std::int64_t S, double q, const std::vector<double>& us, std::size_t n,
                                std::uint64_t seed, unsigned threads = 1) {
  const GridBox box(0, 0, S, 2 * S);
  const auto easy = ensemble(box, Functional::Easy, gamma, n, derive_seed(seed, "diameter/easy"), threads);
  const auto diam = ensemble(box, Functional::Max, gamma, n, derive_seed(seed, "diameter/max"), threads);
  TailReport rep;
  rep.mean_hard = quantile(easy, q);
  for (double u : us) {
    const double t = u * rep.mean_hard;
    const double ph = fraction_at_least(diam, t);
    rep.rows.push_back({u, t, ph, std::sqrt(ph * (1 - ph) / static_cast<double>(n)), 0.0});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Efron-Stein: Var f(X) <= 1/2 sum_i E[(f(X) - f(X^(i)))^2] for independent
// blocks X_1..X_r, X^(i) = X with block i replaced by an independent copy.

struct EfronSteinReport {
  BootstrapSummary variance;  // Var-hat f
  BootstrapSummary half_sum;  // 1/2 sum_i E-hat[Delta_i^2] over all blocks
  std::vector<double> block_half;  // 1/2 E-hat[Delta_i^2] per block
  std::vector<double> occupancy;   // per-block indicator frequency (FPP experiment)
  double ratio() const { return half_sum.estimate > 0 ? variance.estimate / half_sum.estimate : 0.0; }
};

/// f: value per replica; deltas[i][r]: Delta_i in replica r.
inline EfronSteinReport efron_stein_summary(const std::vector<double>& f, const std::vector<std::vector<double>>& deltas,
                                            std::uint64_t seed) {
  const std::size_t n = f.size();
  if (n < 2) fail(ErrorKind::InvalidArgument, "need at least two replicas");
  EfronSteinReport rep;
  std::vector<double> sq(n, 0.0);  // per-replica 1/2 sum_i Delta_i^2
  for (const auto& d : deltas) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      sq[r] += 0.5 * d[r] * d[r];
      s += d[r] * d[r];
    }
    rep.block_half.push_back(0.5 * s / static_cast<double>(n));
  }
  rep.variance = bootstrap(f, [](std::span<const double> x) { return variance(x); }, derive_seed(seed, "es/var"));
  rep.half_sum = bootstrap(sq, [](std::span<const double> x) { return mean(x); }, derive_seed(seed, "es/rhs"));
  return rep;
}

/// Generic harness: r independent coordinates drawn by draw(j, gen), f of the
/// coordinate vector.
template <class Draw, class F>
EfronSteinReport efron_stein_harness(std::size_t r, std::size_t n, std::uint64_t seed, Draw&& draw, F&& f,
                                     unsigned threads = 1) {
  auto cols = replicate(n, r + 1, seed, threads, [&](std::uint64_t rs, std::span<double> out) {
    NormalSource gen(rs);
    std::vector<double> x(r);
    for (std::size_t j = 0; j < r; ++j) x[j] = draw(j, gen);
    const double fx = f(std::span<const double>(x));
    out[0] = fx;
    for (std::size_t j = 0; j < r; ++j) {
      const double keep = x[j];
      x[j] = draw(j, gen);
      out[j + 1] = fx - f(std::span<const double>(x));
      x[j] = keep;
    }
  });
  std::vector<std::vector<double>> deltas(cols.begin() + 1, cols.end());
  return efron_stein_summary(cols[0], deltas, seed);
}

/// Interior vertices of blow_up(R) allowed in the experiment: the dense Green
/// and flow matrices take about 3 n^2 doubles (400 MB at the limit).
inline constexpr std::size_t kEfronSteinVertexLimit = 4096;

struct EfronSteinExperiment {
  EfronSteinReport boxes_only;  // blocks = the K L dyadic S-boxes of R
  EfronSteinReport full;        // plus one residual block holding every other edge
};

/// Psi_LR(R) on R = [0,KS)x[0,LS) under the edge-noise representation of the
/// field with Dirichlet data on blow_up(R). Blocks are the noises of edges
/// inside each dyadic S-box of R; the remaining edges (between boxes, and
/// outside R) form a residual block, without which the blocks do not
/// exhaust the independent inputs and the inequality need not hold.
inline EfronSteinExperiment efron_stein_experiment(double gamma, std::int64_t K, std::int64_t L, std::int64_t S,
                                                   std::size_t n, std::uint64_t seed, unsigned threads = 1) {
  const GridBox r(0, 0, K * S, L * S);
  const GridBox domain = blow_up(r);
  if (interior(domain).size() > kEfronSteinVertexLimit)
    fail(ErrorKind::TooLarge, "Efron-Stein experiment needs dense Green and flow matrices; domain too large");
  const EdgeFlows flows(domain, green_dense(domain));
  const GridBox in = interior(domain);
  // Rows of the flow matrix for vertices of R.
  Eigen::MatrixXd fr(static_cast<Eigen::Index>(r.size()), flows.matrix().cols());
  for (std::size_t i = 0; i < r.size(); ++i)
    fr.row(static_cast<Eigen::Index>(i)) = flows.matrix().row(static_cast<Eigen::Index>(in.index(r.vertex(i))));
  const std::vector<GridBox> boxes = dyadic_subboxes(r, S);
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<char> covered(flows.edge_count(), 0);
  for (const GridBox& c : boxes) {
    blocks.push_back(flows.edges_inside(c));
    for (std::size_t e : blocks.back()) covered[e] = 1;
  }
  std::vector<std::size_t> residual;
  for (std::size_t e = 0; e < covered.size(); ++e)
    if (!covered[e]) residual.push_back(e);
  blocks.push_back(residual);
  const std::size_t nb = blocks.size();
  std::vector<GridBox> halos;
  for (const GridBox& c : boxes) halos.push_back(blow_up(c));

  // Per replica: f, nb deltas, nb-1 occupancy indicators.
  auto cols = replicate(n, 1 + nb + boxes.size(), seed, threads, [&](std::uint64_t rs, std::span<double> out) {
    const Eigen::VectorXd xi = flows.draw_noise(derive_seed(rs, "noise"));
    const Eigen::VectorXd y = fr * xi;
    auto psi = [&](const Eigen::VectorXd& yy) {
      BoxArray<double> arr(r);
      for (std::size_t i = 0; i < r.size(); ++i) arr[i] = yy(static_cast<Eigen::Index>(i));
      return crossing_weight(r, CrossingSpec::lr(), WeightField(arr, gamma));
    };
    const GeodesicResult g = psi(y);
    out[0] = g.weight;
    const double sd = std::sqrt(kEdgeNoiseVariance);
    for (std::size_t b = 0; b < nb; ++b) {
      NormalSource fresh(derive_seed(rs, b + 1));
      Eigen::VectorXd yb = y;
      for (std::size_t e : blocks[b]) {
        const auto k = static_cast<Eigen::Index>(e);
        yb -= fr.col(k) * (xi(k) - sd * fresh());
      }
      out[1 + b] = g.weight - psi(yb).weight;
    }
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      const bool hit = std::any_of(g.vertex_set.begin(), g.vertex_set.end(),
                                   [&](const Vertex& v) { return halos[b].contains(v); });
      out[1 + nb + b] = hit ? 1.0 : 0.0;
    }
  });
  std::vector<std::vector<double>> deltas(cols.begin() + 1, cols.begin() + 1 + static_cast<std::ptrdiff_t>(nb));
  EfronSteinExperiment ex;
  ex.full = efron_stein_summary(cols[0], deltas, seed);
  deltas.pop_back();
  ex.boxes_only = efron_stein_summary(cols[0], deltas, seed);
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const double occ = mean(cols[1 + nb + b]);
    ex.full.occupancy.push_back(occ);
    ex.boxes_only.occupancy.push_back(occ);
  }
  return ex;
}

// ---------------------------------------------------------------------------
// FKG sign: Psi_LR and Psi_BT of one square's field are both increasing in Y.

struct CorrelationReport {
  double correlation = 0.0;
  double std_error = 0.0;  // bootstrap
  bool degenerate = false;
  std::size_t n = 0;
};

inline CorrelationReport fkg_sign_check(double gamma, std::int64_t S, std::size_t n, std::uint64_t seed,
                                        unsigned threads = 1) {
  const GridBox box = GridBox::square(S);
  auto cols = replicate(n, 2, derive_seed(seed, "fkg"), threads, [&](std::uint64_t rs, std::span<double> out) {
    const WeightField wf(sample_dgff(box, rs), gamma);
    out[0] = evaluate(Functional::LR, box, wf);
    out[1] = evaluate(Functional::BT, box, wf);
  });
  CorrelationReport rep;
  rep.n = n;
  rep.correlation = correlation(cols[0], cols[1]);
  if (std::isnan(rep.correlation)) {
    rep.degenerate = true;
    rep.std_error = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  std::vector<double> a(n), b(n);
  rep.std_error = bootstrap(
                      n,
                      [&](std::span<const std::size_t> idx) {
                        for (std::size_t i = 0; i < n; ++i) {
                          a[i] = cols[0][idx[i]];
                          b[i] = cols[1][idx[i]];
                        }
                        return correlation(a, b);
                      },
                      derive_seed(seed, "fkg/bootstrap"))
                      .std_error;
  return rep;
}

// ---------------------------------------------------------------------------
// CV^2 of Psi_LR on [0,S)^2 with a bootstrap interval.

inline BootstrapSummary cv2_report(double gamma, std::int64_t S, std::size_t n, std::uint64_t seed,
                                   unsigned threads = 1) {
  const auto d = ensemble(GridBox::square(S), Functional::LR, gamma, n, derive_seed(seed, "cv2"), threads);
  return bootstrap(d.samples(), [](std::span<const double> x) { return cv2(x); }, derive_seed(seed, "cv2/bootstrap"));
}

// ---------------------------------------------------------------------------
// Pass machinery per replica on R = [0,KS)x[0,LS).

struct PassProbe {
  std::size_t replicas = 0;
  std::size_t min_passes = 0;
  std::size_t below_third = 0;    // replicas with |P| < floor(K/3)
  std::size_t overlapping = 0;    // replicas whose blow-ups intersect
  std::size_t cost_failures = 0;  // replicas with psi(pi) < sum of pass weights
  double mean_density = 0.0;
};

inline PassProbe pass_probe(double gamma, std::int64_t K, std::int64_t L, std::int64_t S, std::size_t n,
                            std::uint64_t seed, unsigned threads = 1) {
  const GridBox r(0, 0, K * S, L * S);
  auto cols = replicate(n, 4, derive_seed(seed, "passes"), threads, [&](std::uint64_t rs, std::span<double> out) {
    const WeightField wf(sample_dgff(r, rs), gamma);
    const GeodesicResult g = crossing_weight(r, CrossingSpec::lr(), wf);
    const PassCollection pc = greedy_disjoint_passes(*g.path, r, S);
    const PassCost cost = pass_cost_bound(pc, wf);
    out[0] = static_cast<double>(pc.passes.size());
    out[1] = blow_ups_disjoint(pc.passes) ? 1.0 : 0.0;
    out[2] = cost.lhs >= cost.rhs ? 1.0 : 0.0;
    out[3] = pass_density(pc);
  });
  PassProbe p;
  p.replicas = n;
  p.min_passes = static_cast<std::size_t>(*std::min_element(cols[0].begin(), cols[0].end()));
  for (std::size_t i = 0; i < n; ++i) {
    p.below_third += cols[0][i] < static_cast<double>(K / 3);
    p.overlapping += cols[1][i] == 0.0;
    p.cost_failures += cols[2][i] == 0.0;
  }
  p.mean_density = mean(cols[3]);
  return p;
}

}  // namespace lfpp
