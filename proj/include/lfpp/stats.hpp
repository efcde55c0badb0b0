#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lfpp/error.hpp"
#include "lfpp/rng.hpp"

namespace lfpp {

/// Sorted samples of one functional, with the experiment that produced them.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  explicit EmpiricalDistribution(std::vector<double> samples, std::string descriptor = {}, std::uint64_t master_seed = 0)
      : samples_(std::move(samples)), descriptor_(std::move(descriptor)), seed_(master_seed) {
    if (samples_.empty()) fail(ErrorKind::InvalidArgument, "an empirical distribution needs at least one sample");
    std::sort(samples_.begin(), samples_.end());
  }

  std::span<const double> samples() const { return samples_; }
  std::size_t n() const { return samples_.size(); }
  const std::string& descriptor() const { return descriptor_; }
  std::uint64_t master_seed() const { return seed_; }
  double min() const { return samples_.front(); }
  double max() const { return samples_.back(); }

 private:
  std::vector<double> samples_;
  std::string descriptor_;
  std::uint64_t seed_ = 0;
};

/// Smallest sample w with empirical CDF(w) >= p: the ceil(p n)-th order statistic.
inline double quantile(std::span<const double> sorted, double p) {
  if (!(p > 0.0 && p <= 1.0)) fail(ErrorKind::BadP, "quantile level must lie in (0, 1]");
  if (sorted.empty()) fail(ErrorKind::InvalidArgument, "no samples");
  const auto n = static_cast<double>(sorted.size());
  // Guard the product against p n landing a hair above an integer.
  double k = std::ceil(p * n - 1e-9 * n);
  k = std::clamp(k, 1.0, n);
  return sorted[static_cast<std::size_t>(k) - 1];
}

inline double quantile(const EmpiricalDistribution& d, double p) { return quantile(d.samples(), p); }

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Unbiased sample variance (0 for a single sample).
inline double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

/// Unbiased variance over squared mean.
inline double cv2(std::span<const double> x) {
  const double m = mean(x);
  if (m == 0.0) fail(ErrorKind::ZeroMean, "coefficient of variation undefined for zero mean");
  return variance(x) / (m * m);
}

inline double cv2(const EmpiricalDistribution& d) { return cv2(d.samples()); }

/// Pearson correlation; NaN when either sample is constant.
inline double correlation(std::span<const double> a, std::span<const double> b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

inline constexpr std::size_t kBootstrapResamples = 1000;

struct BootstrapSummary {
  double estimate = 0.0;
  double std_error = 0.0;  // bootstrap standard deviation
  double lo = 0.0;         // 2.5% percentile
  double hi = 0.0;         // 97.5% percentile
};

/// Percentile bootstrap of a statistic of a set of n paired observations.
/// `stat` receives the resampled row indices.
inline BootstrapSummary bootstrap(std::size_t n, const std::function<double(std::span<const std::size_t>)>& stat,
                                  std::uint64_t seed, std::size_t resamples = kBootstrapResamples) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  BootstrapSummary out;
  out.estimate = stat(idx);
  std::mt19937_64 eng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> reps;
  reps.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& i : idx) i = pick(eng);
    const double v = stat(idx);
    if (std::isfinite(v)) reps.push_back(v);
  }
  if (reps.empty()) {
    out.std_error = out.lo = out.hi = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.std_error = std::sqrt(variance(reps));
  std::sort(reps.begin(), reps.end());
  out.lo = quantile(reps, 0.025);
  out.hi = quantile(reps, 0.975);
  return out;
}

/// Bootstrap of a statistic of one sample.
inline BootstrapSummary bootstrap(std::span<const double> x, const std::function<double(std::span<const double>)>& stat,
                                  std::uint64_t seed, std::size_t resamples = kBootstrapResamples) {
  std::vector<double> buf(x.size());
  return bootstrap(
      x.size(),
      [&](std::span<const std::size_t> idx) {
        for (std::size_t i = 0; i < idx.size(); ++i) buf[i] = x[idx[i]];
        return stat(buf);
      },
      seed, resamples);
}

/// Ordinary least squares y = intercept + slope x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::DegenerateData, "need at least two points");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) fail(ErrorKind::DegenerateData, "all abscissae equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) f.residuals.push_back(y[i] - (f.intercept + f.slope * x[i]));
  return f;
}

}  // namespace lfpp
