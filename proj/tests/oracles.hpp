#pragma once

// Naive reference computations used as test oracles. They share no code with
// the library beyond MultiIndex.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "assoc_clt/lattice.hpp"

namespace oracle {

using assoc_clt::MultiIndex;
using Cov = std::function<double(const std::vector<std::int64_t>&)>;

inline double radial_power(const std::vector<std::int64_t>& m, double alpha, double scale = 1.0) {
  double s2 = 0.0;
  for (auto v : m) s2 += static_cast<double>(v) * static_cast<double>(v);
  return scale * std::pow(1.0 + std::sqrt(s2), -alpha);
}

/// Visits every integer point of prod_k [lo_k, hi_k].
inline void grid(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi,
                 const std::function<void(const std::vector<std::int64_t>&)>& f) {
  std::vector<std::int64_t> x = lo;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (hi[k] < lo[k]) return;
  }
  for (;;) {
    f(x);
    std::size_t k = x.size();
    while (k > 0) {
      --k;
      if (x[k] < hi[k]) {
        ++x[k];
        break;
      }
      x[k] = lo[k];
      if (k == 0) return;
    }
  }
}

/// sum of R over the box [-n, n].
inline long double k_rect(const Cov& R, const std::vector<std::int64_t>& n) {
  std::vector<std::int64_t> lo(n.size());
  for (std::size_t k = 0; k < n.size(); ++k) lo[k] = -n[k];
  long double s = 0.0L;
  grid(lo, n, [&](const auto& m) { s += R(m); });
  return s;
}

/// sum over pairs (i, j) of U_n of R(i - j).
inline long double variance_pairs(const Cov& R, const std::vector<std::int64_t>& n) {
  std::vector<std::vector<std::int64_t>> pts;
  grid(std::vector<std::int64_t>(n.size(), 1), n, [&](const auto& x) { pts.push_back(x); });
  long double s = 0.0L;
  std::vector<std::int64_t> diff(n.size());
  for (const auto& a : pts) {
    for (const auto& b : pts) {
      for (std::size_t k = 0; k < n.size(); ++k) diff[k] = a[k] - b[k];
      s += R(diff);
    }
  }
  return s;
}

inline double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

/// Kolmogorov distance between the empirical law of xs and N(0, 1).
inline double ks(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Standard normal quantile by bisection on erf.
inline double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
