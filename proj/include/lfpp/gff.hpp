#pragma once

// Discrete Gaussian free field with Dirichlet boundary on the blow-up of a
// box. Covariance convention: Cov(Y(x), Y(y)) = G(x, y), the expected number
// of visits to y of simple random walk started at x and killed on the
// outermost vertex layer of the domain, i.e. G = (I - P)^{-1}.

#include <fftw3.h>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "lfpp/box_array.hpp"
#include "lfpp/error.hpp"
#include "lfpp/lattice.hpp"
#include "lfpp/parallel.hpp"
#include "lfpp/rng.hpp"

namespace lfpp {

inline constexpr std::size_t kDenseGreenLimit = 40000;

class GaussianField {
 public:
  GaussianField(const GridBox& base_box, BoxArray<double> values, std::uint64_t seed)
      : base_box_(base_box), values_(std::move(values)), seed_(seed) {
    if (values_.box() != blow_up(base_box_))
      fail(ErrorKind::DimensionMismatch, "field values must cover the blow-up of the base box");
  }

  const GridBox& base_box() const { return base_box_; }
  const GridBox& domain() const { return values_.box(); }
  std::uint64_t seed() const { return seed_; }
  double at(Vertex v) const { return values_.at(v); }
  const BoxArray<double>& values() const { return values_; }

 private:
  GridBox base_box_;
  BoxArray<double> values_;
  std::uint64_t seed_;
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : ptr(static_cast<double*>(fftw_malloc(sizeof(double) * std::max<std::size_t>(n, 1)))) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* ptr;
};

/// In-place unnormalised 2-D DST-I (FFTW RODFT00) of an ny x nx row-major array:
/// out[k][j] = 4 sum in[q][p] sin(pi (p+1)(j+1)/(nx+1)) sin(pi (q+1)(k+1)/(ny+1)).
/// FFTW_ESTIMATE keeps the plan, and hence the rounding, reproducible.
inline void dst2d_inplace(double* data, int ny, int nx) {
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_r2r_2d(ny, nx, data, data, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

/// 1 - lambda for the Dirichlet sine mode (j, k) of an m x n interior.
inline double one_minus_eigenvalue(int j, int k, int m, int n) {
  using std::numbers::pi;
  return 1.0 - 0.5 * (std::cos(pi * j / (m + 1)) + std::cos(pi * k / (n + 1)));
}

}  // namespace detail

/// Exact DGFF sample on blow_up(base_box) via the sine eigenbasis of the
/// killed walk: Y = sum_{jk} g_{jk} (1 - lambda_{jk})^{-1/2} phi_{jk}.
inline GaussianField sample_dgff(const GridBox& base_box, std::uint64_t seed) {
  const GridBox domain = blow_up(base_box);
  BoxArray<double> values(domain, 0.0);
  if (!has_interior(domain)) return GaussianField(base_box, std::move(values), seed);
  const GridBox in = interior(domain);
  const int m = static_cast<int>(in.width);
  const int n = static_cast<int>(in.height);
  detail::FftwBuffer buf(in.size());
  // Orthonormal sine basis = RODFT00 / sqrt(2 (N + 1)) per axis.
  const double scale = 1.0 / std::sqrt(4.0 * (m + 1.0) * (n + 1.0));
  NormalSource normal(seed);
  for (int k = 1; k <= n; ++k)
    for (int j = 1; j <= m; ++j)
      buf.ptr[static_cast<std::size_t>(k - 1) * m + (j - 1)] =
          normal() * scale / std::sqrt(detail::one_minus_eigenvalue(j, k, m, n));
  detail::dst2d_inplace(buf.ptr, n, m);
  for (std::int64_t y = 0; y < n; ++y)
    for (std::int64_t x = 0; x < m; ++x)
      values.at({in.x0 + x, in.y0 + y}) = buf.ptr[static_cast<std::size_t>(y) * m + x];
  return GaussianField(base_box, std::move(values), seed);
}

/// Solves (I - P) u = rhs on the interior of `domain` with the sine basis.
/// `rhs` and the result are interior arrays.
inline BoxArray<double> apply_green_spectral(const GridBox& domain, const BoxArray<double>& rhs) {
  const GridBox in = interior(domain);
  if (rhs.box() != in) fail(ErrorKind::DimensionMismatch, "rhs must live on the domain interior");
  const int m = static_cast<int>(in.width);
  const int n = static_cast<int>(in.height);
  detail::FftwBuffer buf(in.size());
  std::copy(rhs.values().begin(), rhs.values().end(), buf.ptr);
  detail::dst2d_inplace(buf.ptr, n, m);
  const double norm = 1.0 / (4.0 * (m + 1.0) * (n + 1.0));
  for (int k = 1; k <= n; ++k)
    for (int j = 1; j <= m; ++j)
      buf.ptr[static_cast<std::size_t>(k - 1) * m + (j - 1)] *= norm / detail::one_minus_eigenvalue(j, k, m, n);
  detail::dst2d_inplace(buf.ptr, n, m);
  BoxArray<double> out(in);
  std::copy(buf.ptr, buf.ptr + in.size(), out.values().begin());
  return out;
}

/// G(., v) on the whole domain (zero on the boundary layer).
inline BoxArray<double> green_column(const GridBox& domain, Vertex v) {
  const GridBox in = interior(domain);
  BoxArray<double> out(domain, 0.0);
  if (!in.contains(v)) return out;
  BoxArray<double> rhs(in, 0.0);
  rhs.at(v) = 1.0;
  const BoxArray<double> col = apply_green_spectral(domain, rhs);
  for (std::size_t i = 0; i < in.size(); ++i) out.at(in.vertex(i)) = col[i];
  return out;
}

/// Dense Green's function of the walk killed on the boundary layer, indexed by
/// interior vertices in row-major order.
class GreenMatrix {
 public:
  GreenMatrix(const GridBox& domain, Eigen::MatrixXd entries) : domain_(domain), entries_(std::move(entries)) {}

  const GridBox& domain() const { return domain_; }
  GridBox interior_box() const { return interior(domain_); }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }

  /// G(a, b), zero when either vertex is on the boundary layer.
  double at(Vertex a, Vertex b) const {
    const GridBox in = interior_box();
    if (!in.contains(a) || !in.contains(b)) return 0.0;
    return entries_(static_cast<Eigen::Index>(in.index(a)), static_cast<Eigen::Index>(in.index(b)));
  }

 private:
  GridBox domain_;
  Eigen::MatrixXd entries_;
};

/// Sparse I - P on the interior of `domain`.
inline Eigen::SparseMatrix<double> killed_walk_operator(const GridBox& domain) {
  const GridBox in = interior(domain);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(in.size() * 5);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const Vertex v = in.vertex(i);
    trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
    for (Vertex u : {Vertex{v.x - 1, v.y}, Vertex{v.x + 1, v.y}, Vertex{v.x, v.y - 1}, Vertex{v.x, v.y + 1}})
      if (in.contains(u)) trip.emplace_back(static_cast<int>(i), static_cast<int>(in.index(u)), -0.25);
  }
  const auto n = static_cast<Eigen::Index>(in.size());
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

/// G = (I - P)^{-1} by sparse Cholesky and direct solves.
inline GreenMatrix green_dense(const GridBox& domain, std::size_t dense_limit = kDenseGreenLimit) {
  if (!has_interior(domain)) fail(ErrorKind::InvalidArgument, "domain has no interior vertices");
  const GridBox in = interior(domain);
  if (in.size() > dense_limit)
    fail(ErrorKind::TooLarge, std::to_string(in.size()) + " interior vertices exceed the dense limit");
  const Eigen::SparseMatrix<double> a = killed_walk_operator(domain);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
  if (solver.info() != Eigen::Success) fail(ErrorKind::InvalidArgument, "factorisation of I - P failed");
  const auto n = static_cast<Eigen::Index>(in.size());
  Eigen::MatrixXd g = solver.solve(Eigen::MatrixXd::Identity(n, n));
  g = 0.5 * (g + g.transpose()).eval();
  return GreenMatrix(domain, std::move(g));
}

/// Discrete-harmonic extension of the boundary-layer values of `data` into
/// the interior of its box (conjugate gradient on the 5-point Laplacian).
inline BoxArray<double> harmonic_extension(const BoxArray<double>& data, double rel_tol = 1e-12) {
  BoxArray<double> out = data;
  const GridBox box = data.box();
  if (!has_interior(box)) return out;
  const GridBox in = interior(box);
  const std::size_t n = in.size();
  std::vector<double> b(n, 0.0), u(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex v = in.vertex(i);
    for (Vertex w : {Vertex{v.x - 1, v.y}, Vertex{v.x + 1, v.y}, Vertex{v.x, v.y - 1}, Vertex{v.x, v.y + 1}})
      if (!in.contains(w)) b[i] += data.at(w);
  }
  const std::int64_t w = in.width, h = in.height;
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::int64_t r = 0; r < h; ++r)
      for (std::int64_t c = 0; c < w; ++c) {
        const std::size_t i = static_cast<std::size_t>(r * w + c);
        double s = 4.0 * x[i];
        if (c > 0) s -= x[i - 1];
        if (c + 1 < w) s -= x[i + 1];
        if (r > 0) s -= x[i - static_cast<std::size_t>(w)];
        if (r + 1 < h) s -= x[i + static_cast<std::size_t>(w)];
        y[i] = s;
      }
  };
  auto dot = [](const std::vector<double>& a, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * c[i];
    return s;
  };
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm > 0.0) {
    std::vector<double> r = b, p = b, ap(n);
    double rr = dot(r, r);
    const std::size_t max_iter = 20 * n + 100;
    for (std::size_t it = 0; it < max_iter && std::sqrt(rr) > rel_tol * bnorm; ++it) {
      apply(p, ap);
      const double alpha = rr / dot(p, ap);
      for (std::size_t i = 0; i < n; ++i) {
        u[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      const double rr_new = dot(r, r);
      const double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) out.at(in.vertex(i)) = u[i];
  return out;
}

struct CoarseFine {
  BoxArray<double> coarse;  // E[Y | Y on the boundary layer of blow_up(sub)]
  BoxArray<double> fine;    // Y - coarse; independent of the coarse part
};

/// Markov decomposition of `field` on blow_up(sub).
inline CoarseFine coarse_fine_decompose(const GaussianField& field, const GridBox& sub) {
  const GridBox region = blow_up(sub);
  if (!field.domain().contains(region))
    fail(ErrorKind::NotContained, "blow-up of the sub-box escapes the field's domain");
  if (!field.base_box().contains(sub)) fail(ErrorKind::NotContained, "sub-box is not inside the base box");
  BoxArray<double> restricted = field.values().restrict_to(region);
  BoxArray<double> coarse = harmonic_extension(restricted);
  BoxArray<double> fine(region);
  for (std::size_t i = 0; i < region.size(); ++i) fine[i] = restricted[i] - coarse[i];
  return {std::move(coarse), std::move(fine)};
}

/// max over x in sub of the coarse field on blow_up(sub).
inline double coarse_max(const GaussianField& field, const GridBox& sub) {
  const CoarseFine cf = coarse_fine_decompose(field, sub);
  double best = -std::numeric_limits<double>::infinity();
  for (std::int64_t y = sub.y0; y < sub.y1(); ++y)
    for (std::int64_t x = sub.x0; x < sub.x1(); ++x) best = std::max(best, cf.coarse.at({x, y}));
  return best;
}

struct CoarseMaxRow {
  std::int64_t size = 0;
  std::size_t replicas = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of E[max_{x in A} E[Y_B(x) | Y_B on the boundary of
/// blow_up(A)]] with B = [0, 3s)^2 and A its central s-box, per size s.
inline std::vector<CoarseMaxRow> coarse_max_diagnostic(const std::vector<std::int64_t>& sizes, std::size_t replicas,
                                                       std::uint64_t seed, unsigned threads = 1) {
  if (replicas < 2) fail(ErrorKind::InvalidArgument, "need at least two replicas for a standard error");
  std::vector<CoarseMaxRow> rows;
  for (std::int64_t s : sizes) {
    const GridBox base = GridBox::square(3 * s);
    const GridBox sub(s, s, s, s);
    const std::uint64_t arm = derive_seed(seed, static_cast<std::uint64_t>(s));
    std::vector<double> samples(replicas);
    parallel_for(replicas, threads, [&](std::size_t r) {
      samples[r] = coarse_max(sample_dgff(base, derive_seed(arm, r)), sub);
    });
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(replicas);
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= static_cast<double>(replicas - 1);
    rows.push_back({s, replicas, mean, std::sqrt(var / static_cast<double>(replicas))});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Edge-noise representation: Y(x) = sum_e i_x(e) xi(e), where i_x(e) is the
// flow through e of a unit current from x to the boundary layer. With
// deg = 4 everywhere, i_x(e) = (G(x, e+) - G(x, e-)) / 4 for e oriented from
// its row-major smaller endpoint e- to e+. Edge noises have variance 4 so the
// derived field has covariance G.

inline constexpr double kEdgeNoiseVariance = 4.0;

struct Edge {
  Vertex lo;  // row-major smaller endpoint (e-)
  Vertex hi;  // e+
};

class EdgeFlows {
 public:
  EdgeFlows(const GridBox& domain, const GreenMatrix& green) : domain_(domain) {
    if (green.domain() != domain) fail(ErrorKind::DimensionMismatch, "Green matrix belongs to another domain");
    const GridBox in = interior(domain);
    for (std::int64_t y = domain.y0; y < domain.y1(); ++y)
      for (std::int64_t x = domain.x0; x < domain.x1(); ++x) {
        const Vertex v{x, y};
        for (Vertex u : {Vertex{x + 1, y}, Vertex{x, y + 1}})
          if (domain.contains(u) && (in.contains(v) || in.contains(u))) edges_.push_back({v, u});
      }
    const auto nv = static_cast<Eigen::Index>(in.size());
    const auto ne = static_cast<Eigen::Index>(edges_.size());
    flows_.resize(nv, ne);
    for (Eigen::Index e = 0; e < ne; ++e) {
      const Edge& ed = edges_[static_cast<std::size_t>(e)];
      const bool lo_in = in.contains(ed.lo), hi_in = in.contains(ed.hi);
      for (Eigen::Index xi = 0; xi < nv; ++xi) {
        const double g_hi = hi_in ? green.entries()(xi, static_cast<Eigen::Index>(in.index(ed.hi))) : 0.0;
        const double g_lo = lo_in ? green.entries()(xi, static_cast<Eigen::Index>(in.index(ed.lo))) : 0.0;
        flows_(xi, e) = 0.25 * (g_hi - g_lo);
      }
    }
  }

  const GridBox& domain() const { return domain_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  /// i_x(e) for an interior x (zero for boundary x).
  double flow(Vertex x, std::size_t edge) const {
    const GridBox in = interior(domain_);
    if (!in.contains(x)) return 0.0;
    return flows_(static_cast<Eigen::Index>(in.index(x)), static_cast<Eigen::Index>(edge));
  }
  const Eigen::MatrixXd& matrix() const { return flows_; }

  /// Indices of edges whose endpoints both lie in `c`.
  std::vector<std::size_t> edges_inside(const GridBox& c) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (c.contains(edges_[e].lo) && c.contains(edges_[e].hi)) out.push_back(e);
    return out;
  }

  /// sum_e i_x(e) xi(e) over the whole domain (zero on the boundary layer).
  BoxArray<double> field(const Eigen::VectorXd& xi) const {
    if (xi.size() != static_cast<Eigen::Index>(edges_.size()))
      fail(ErrorKind::DimensionMismatch, "one noise per edge required");
    const GridBox in = interior(domain_);
    const Eigen::VectorXd y = flows_ * xi;
    BoxArray<double> out(domain_, 0.0);
    for (std::size_t i = 0; i < in.size(); ++i) out.at(in.vertex(i)) = y(static_cast<Eigen::Index>(i));
    return out;
  }

  Eigen::VectorXd draw_noise(std::uint64_t seed) const {
    NormalSource normal(seed);
    const double sd = std::sqrt(kEdgeNoiseVariance);
    Eigen::VectorXd xi(static_cast<Eigen::Index>(edges_.size()));
    for (Eigen::Index e = 0; e < xi.size(); ++e) xi(e) = sd * normal();
    return xi;
  }

 private:
  GridBox domain_;
  std::vector<Edge> edges_;
  Eigen::MatrixXd flows_;  // interior vertex x edge
};

class EdgeNoiseField {
 public:
  EdgeNoiseField(std::shared_ptr<const EdgeFlows> flows, std::uint64_t seed)
      : flows_(std::move(flows)), seed_(seed), xi_(flows_->draw_noise(seed)), values_(flows_->field(xi_)) {}

  const GridBox& domain() const { return flows_->domain(); }
  const EdgeFlows& flows() const { return *flows_; }
  std::shared_ptr<const EdgeFlows> shared_flows() const { return flows_; }
  std::uint64_t seed() const { return seed_; }
  const Eigen::VectorXd& noise() const { return xi_; }
  const BoxArray<double>& values() const { return values_; }
  double at(Vertex v) const { return values_.at(v); }

  /// Same flows, fresh noise.
  EdgeNoiseField redraw(std::uint64_t seed) const { return EdgeNoiseField(flows_, seed); }

 private:
  std::shared_ptr<const EdgeFlows> flows_;
  std::uint64_t seed_;
  Eigen::VectorXd xi_;
  BoxArray<double> values_;
};

inline EdgeNoiseField to_edge_representation(const GridBox& domain, const GreenMatrix& green, std::uint64_t seed) {
  return EdgeNoiseField(std::make_shared<const EdgeFlows>(domain, green), seed);
}

struct Resampled {
  BoxArray<double> original;
  BoxArray<double> resampled;
  BoxArray<double> delta;  // original - resampled
};

/// Replaces the noises of edges with both endpoints in `c` by fresh ones.
inline Resampled resample_subbox(const EdgeNoiseField& enf, const GridBox& c, std::uint64_t seed) {
  if (!enf.domain().contains(c)) fail(ErrorKind::NotContained, "resampling box escapes the domain");
  const EdgeFlows& flows = enf.flows();
  const std::vector<std::size_t> inside = flows.edges_inside(c);
  NormalSource normal(seed);
  const double sd = std::sqrt(kEdgeNoiseVariance);
  Eigen::VectorXd diff = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(flows.edge_count()));
  for (std::size_t e : inside) {
    const auto k = static_cast<Eigen::Index>(e);
    diff(k) = enf.noise()(k) - sd * normal();
  }
  BoxArray<double> delta = flows.field(diff);
  BoxArray<double> resampled(enf.domain());
  for (std::size_t i = 0; i < resampled.size(); ++i) resampled[i] = enf.values()[i] - delta[i];
  return {enf.values(), std::move(resampled), std::move(delta)};
}

struct FlowBoundProbe {
  std::int64_t scale = 0;
  double max_scaled_flow = 0.0;     // max |i_x(e)| * S
  double max_flow_energy = 0.0;     // max sum_{e in C} i_x(e)^2
};

/// Over R = [0, K S) x [0, L S) with Dirichlet data on blow_up(R): for every
/// dyadic S-box C of R, x in R outside D = blow_up(C) and e inside C, records
/// max |i_x(e)| * S and max_x sum_{e in C} i_x(e)^2. Columns of G come from
/// the spectral solver, so no dense matrix is formed.
inline FlowBoundProbe flow_bound_probe(std::int64_t s, std::int64_t k, std::int64_t l) {
  const GridBox frame(0, 0, k * s, l * s);
  const GridBox domain = blow_up(frame);
  FlowBoundProbe out{s, 0.0, 0.0};
  for (const GridBox& c : dyadic_subboxes(frame, s)) {
    std::vector<BoxArray<double>> cols;
    cols.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) cols.push_back(green_column(domain, c.vertex(i)));
    const GridBox d = blow_up(c);
    for (std::size_t xi = 0; xi < frame.size(); ++xi) {
      const Vertex x = frame.vertex(xi);
      if (d.contains(x)) continue;
      double energy = 0.0;
      for (std::size_t a = 0; a < c.size(); ++a) {
        const Vertex va = c.vertex(a);
        for (Vertex vb : {Vertex{va.x + 1, va.y}, Vertex{va.x, va.y + 1}}) {
          if (!c.contains(vb)) continue;
          const double flow = 0.25 * (cols[c.index(vb)].at(x) - cols[a].at(x));
          out.max_scaled_flow = std::max(out.max_scaled_flow, std::abs(flow) * static_cast<double>(s));
          energy += flow * flow;
        }
      }
      out.max_flow_energy = std::max(out.max_flow_energy, energy);
    }
  }
  return out;
}

}  // namespace lfpp
