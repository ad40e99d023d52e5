#pragma once

// Stationary covariance models R(m) = cov(X_0, X_m) and the covariance
// functionals built from them: the rectangular sum K_X(n), the Euclidean and
// sup-norm ball sums K(r) and R_X(r), the susceptibility, and the exact
// variance of partial sums over boxes.

#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "assoc_clt/lattice.hpp"
#include "assoc_clt/summation.hpp"

namespace assoc_clt {

enum class ModelKind { finite, radial };

/// Nonnegative, symmetric stationary covariance on Z^d.
///
/// Two families are supported: finite-range tables (values stored densely on
/// the sup-norm ball of the support radius) and the radial power profile
/// R(m) = scale * (1 + ||m||)^(-alpha) with the Euclidean norm.
class CovarianceModel {
 public:
  using Entry = std::pair<MultiIndex, double>;

  /// Entries may list one or both of m and -m; a missing mirror is filled in.
  /// Throws std::invalid_argument on malformed input and std::domain_error when
  /// a value is negative or R(0) <= 0.
  static CovarianceModel finite(std::size_t d, std::span<const Entry> entries) {
    if (d == 0) throw std::invalid_argument("covariance model: dimension must be >= 1");
    std::int64_t radius = 0;
    for (const auto& [m, v] : entries) {
      if (m.dim() != d) throw std::invalid_argument("covariance entry " + to_string(m) + " has wrong dimension");
      if (!std::isfinite(v)) throw std::invalid_argument("covariance entry " + to_string(m) + " is not finite");
      radius = std::max(radius, sup_norm(m));
    }
    CovarianceModel model(ModelKind::finite, d);
    model.radius_ = radius;
    model.side_ = 2 * radius + 1;
    std::size_t size = 1;
    for (std::size_t k = 0; k < d; ++k) size *= static_cast<std::size_t>(model.side_);
    model.table_.assign(size, 0.0);
    std::vector<char> set(size, 0);
    for (const auto& [m, v] : entries) {
      for (const auto& target : {m, -m}) {
        const auto idx = model.table_index(target);
        if (set[idx] && model.table_[idx] != v) {
          throw std::invalid_argument("covariance entries for " + to_string(m) + " and its mirror disagree");
        }
        model.table_[idx] = v;
        set[idx] = 1;
      }
    }
    model.validate();
    return model;
  }

  static CovarianceModel finite(std::size_t d, std::initializer_list<Entry> entries) {
    return finite(d, std::span<const Entry>(entries.begin(), entries.size()));
  }

  /// R(m) = variance * 1{m = 0}.
  static CovarianceModel iid(std::size_t d, double variance) {
    const Entry e{MultiIndex::zeros(d), variance};
    return finite(d, std::span<const Entry>(&e, 1));
  }

  /// R(m) = scale * (1 + ||m||_2)^(-alpha). alpha = 0 gives the constant covariance.
  static CovarianceModel radial_power(std::size_t d, double alpha, double scale) {
    if (d == 0) throw std::invalid_argument("covariance model: dimension must be >= 1");
    if (!std::isfinite(alpha) || alpha < 0.0) throw std::invalid_argument("radial profile: alpha must be >= 0");
    if (!std::isfinite(scale) || scale <= 0.0) throw std::domain_error("radial profile: scale must be > 0");
    CovarianceModel model(ModelKind::radial, d);
    model.alpha_ = alpha;
    model.scale_ = scale;
    return model;
  }

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] ModelKind kind() const noexcept { return kind_; }
  [[nodiscard]] bool finite_range() const noexcept { return kind_ == ModelKind::finite; }
  /// Sup-norm support radius of a finite-range model.
  [[nodiscard]] std::optional<std::int64_t> range() const {
    if (kind_ == ModelKind::finite) return radius_;
    return std::nullopt;
  }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double scale() const noexcept { return scale_; }

  [[nodiscard]] double operator()(const MultiIndex& m) const {
    if (m.dim() != dim_) throw std::invalid_argument("covariance evaluated at wrong dimension");
    if (kind_ == ModelKind::finite) {
      if (sup_norm(m) > radius_) return 0.0;
      return table_[table_index(m)];
    }
    return radial_value(static_cast<double>(squared_norm(m)));
  }

  /// Radial profile at squared norm s2 (radial models only).
  [[nodiscard]] double radial_value(double s2) const noexcept {
    const double base = 1.0 + std::sqrt(s2);
    if (alpha_ == 0.0) return scale_;
    if (alpha_ == 1.0) return scale_ / base;
    return scale_ * std::pow(base, -alpha_);
  }

  /// Calls f(m, R(m)) for every m of the finite support with R(m) != 0.
  template <class F>
  void for_each_entry(F&& f) const {
    if (kind_ != ModelKind::finite) throw std::logic_error("for_each_entry on an infinite-range model");
    for_each_point(Box(MultiIndex::filled(dim_, -radius_ - 1), MultiIndex::filled(dim_, radius_)),
                   [&](const MultiIndex& m) {
                     const double v = table_[table_index(m)];
                     if (v != 0.0) f(m, v);
                   });
  }

 private:
  CovarianceModel(ModelKind kind, std::size_t d) : kind_(kind), dim_(d) {}

  [[nodiscard]] std::size_t table_index(const MultiIndex& m) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < dim_; ++k) {
      idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(m[k] + radius_);
    }
    return idx;
  }

  void validate() const {
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if (table_[i] < 0.0) throw std::domain_error("covariance must be nonnegative (positively associated fields)");
    }
    if (table_[table_index(MultiIndex::zeros(dim_))] <= 0.0) {
      throw std::domain_error("covariance must satisfy R(0) > 0");
    }
  }

  ModelKind kind_;
  std::size_t dim_;
  std::int64_t radius_ = 0;
  std::int64_t side_ = 1;
  std::vector<double> table_;
  double alpha_ = 0.0;
  double scale_ = 0.0;
};

namespace detail {

/// Sum of R(m) * prod_k weight(k, |m_k|) over the box |m_k| <= half[k].
/// Radial models are summed over one orthant with sign multiplicities.
template <class Weight>
long double symmetric_weighted_sum(const CovarianceModel& model, const MultiIndex& half, Weight&& weight) {
  require_same_dim(half, MultiIndex::zeros(model.dim()));
  for (auto h : half) {
    if (h < 0) return 0.0L;
  }
  CompensatedSum acc;
  if (model.finite_range()) {
    model.for_each_entry([&](const MultiIndex& m, double v) {
      long double w = v;
      for (std::size_t k = 0; k < m.dim(); ++k) {
        const auto a = m[k] < 0 ? -m[k] : m[k];
        if (a > half[k]) return;
        w *= weight(k, a);
      }
      acc += w;
    });
    return acc.value();
  }
  const std::size_t d = model.dim();
  if (d == 1) {
    acc += static_cast<long double>(model.radial_value(0.0)) * weight(0, 0);
    for (std::int64_t a = 1; a <= half[0]; ++a) {
      const double s = static_cast<double>(a);
      acc += 2.0L * model.radial_value(s * s) * weight(0, a);
    }
    return acc.value();
  }
  for_each_point(Box(MultiIndex::filled(d, -1), half), [&](const MultiIndex& m) {
    long double w = model.radial_value(static_cast<double>(squared_norm(m)));
    for (std::size_t k = 0; k < d; ++k) {
      w *= weight(k, m[k]);
      if (m[k] != 0) w *= 2.0L;
    }
    acc += w;
  });
  return acc.value();
}

}  // namespace detail

/// K_X(n) = sum of R(j) over -n <= j <= n. Coordinates of n may be 0.
[[nodiscard]] inline double k_rect(const CovarianceModel& model, const MultiIndex& n) {
  for (auto v : n) {
    if (v < 0) throw std::invalid_argument("k_rect: negative coordinate in " + to_string(n));
  }
  return static_cast<double>(
      detail::symmetric_weighted_sum(model, n, [](std::size_t, std::int64_t) { return 1.0L; }));
}

/// K(r) = sum of R(j) over the Euclidean ball ||j|| <= r.
[[nodiscard]] inline double k_ball_euclid(const CovarianceModel& model, std::int64_t r) {
  if (r < 0) throw std::invalid_argument("k_ball_euclid: negative radius");
  const std::size_t d = model.dim();
  const std::int64_t r2 = r * r;
  CompensatedSum acc;
  if (model.finite_range()) {
    model.for_each_entry([&](const MultiIndex& m, double v) {
      if (squared_norm(m) <= r2) acc += v;
    });
    return static_cast<double>(acc.value());
  }
  for_each_point(Box(MultiIndex::filled(d, -1), MultiIndex::filled(d, r)), [&](const MultiIndex& m) {
    const auto s2 = squared_norm(m);
    if (s2 > r2) return;
    long double w = model.radial_value(static_cast<double>(s2));
    for (auto v : m) {
      if (v != 0) w *= 2.0L;
    }
    acc += w;
  });
  return static_cast<double>(acc.value());
}

/// R_X(r) = sum of R(j) over the sup-norm ball |j| <= r, i.e. K_X(r * 1).
[[nodiscard]] inline double k_ball_sup(const CovarianceModel& model, std::int64_t r) {
  if (r < 0) throw std::invalid_argument("k_ball_sup: negative radius");
  return k_rect(model, MultiIndex::filled(model.dim(), r));
}

struct Susceptibility {
  bool diverged = false;
  double value = std::numeric_limits<double>::infinity();
  /// Bound on |value - sigma^2|; zero for finite-range models.
  double abs_error = 0.0;
};

/// sigma^2 = sum over Z^d of R(j). Radial power profiles are summable iff alpha > d.
[[nodiscard]] inline Susceptibility susceptibility(const CovarianceModel& model) {
  if (model.finite_range()) {
    CompensatedSum acc;
    model.for_each_entry([&](const MultiIndex&, double v) { acc += v; });
    return {false, static_cast<double>(acc.value()), 0.0};
  }
  const auto d = static_cast<double>(model.dim());
  if (model.alpha() <= d) return {true, std::numeric_limits<double>::infinity(), 0.0};
  if (model.dim() == 1) {
    // sum_{m >= 1} (1 + m)^(-alpha) = zeta(alpha) - 1
    const double tail = boost::math::zeta(model.alpha()) - 1.0;
    return {false, model.scale() * (1.0 + 2.0 * tail), 1e-14 * model.scale()};
  }
  // Exact lattice sum inside a Euclidean ball plus the radial integral beyond it.
  const std::int64_t radius = model.dim() == 2 ? 2048 : (model.dim() == 3 ? 160 : 48);
  const double inside = k_ball_euclid(model, radius);
  const double surface = 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
  CompensatedSum tail;
  const double rho0 = static_cast<double>(radius) + 0.5;
  // substitute rho = rho0 / u on (0, 1] and integrate with the midpoint rule
  const int steps = 200000;
  for (int i = 0; i < steps; ++i) {
    const double u = (i + 0.5) / steps;
    const double rho = rho0 / u;
    tail += surface * std::pow(rho, d - 1.0) * model.radial_value(rho * rho) * rho0 / (u * u) / steps;
  }
  const double t = static_cast<double>(tail.value());
  return {false, inside + t, std::abs(t)};
}

/// cov(S(A), S(B)) for two boxes, summed over lag vectors with interval-overlap weights.
[[nodiscard]] inline double box_covariance(const CovarianceModel& model, const Box& a, const Box& b) {
  require_same_dim(a.lower(), b.lower());
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t d = model.dim();
  // overlap(k, m) = #{(x, y) : x in A_k, y in B_k, x - y = m}
  auto overlap = [&](std::size_t k, std::int64_t m) -> std::int64_t {
    const auto lo = std::max(a.lower()[k], b.lower()[k] + m);
    const auto hi = std::min(a.upper()[k], b.upper()[k] + m);
    return hi > lo ? hi - lo : 0;
  };
  std::vector<std::int64_t> mlo(d), mhi(d);
  for (std::size_t k = 0; k < d; ++k) {
    mlo[k] = a.lower()[k] + 1 - b.upper()[k];
    mhi[k] = a.upper()[k] - b.lower()[k] - 1;
  }
  CompensatedSum acc;
  if (model.finite_range()) {
    model.for_each_entry([&](const MultiIndex& m, double v) {
      long double w = v;
      for (std::size_t k = 0; k < d; ++k) {
        if (m[k] < mlo[k] || m[k] > mhi[k]) return;
        w *= static_cast<long double>(overlap(k, m[k]));
      }
      acc += w;
    });
    return static_cast<double>(acc.value());
  }
  std::vector<MultiIndex::value_type> lo(d), hi(d);
  for (std::size_t k = 0; k < d; ++k) {
    lo[k] = mlo[k] - 1;
    hi[k] = mhi[k];
  }
  for_each_point(Box(MultiIndex(lo), MultiIndex(hi)), [&](const MultiIndex& m) {
    long double w = model.radial_value(static_cast<double>(squared_norm(m)));
    for (std::size_t k = 0; k < d; ++k) w *= static_cast<long double>(overlap(k, m[k]));
    acc += w;
  });
  return static_cast<double>(acc.value());
}

/// var S(U_n) = sum over -(n-1) <= m <= n-1 of prod_k (n_k - |m_k|) R(m).
[[nodiscard]] inline double variance_exact(const CovarianceModel& model, const MultiIndex& n) {
  (void)product(n);  // validates n >= 1
  return static_cast<double>(detail::symmetric_weighted_sum(
      model, n - MultiIndex::ones(n.dim()),
      [&](std::size_t k, std::int64_t a) { return static_cast<long double>(n[k] - a); }));
}

inline constexpr std::int64_t kBruteforceLimit = 10'000;

/// Variance of the sum over an explicit point set by the double sum over pairs.
[[nodiscard]] inline double set_variance_bruteforce(const CovarianceModel& model, std::span<const MultiIndex> points) {
  if (static_cast<std::int64_t>(points.size()) > kBruteforceLimit) {
    throw std::invalid_argument("brute-force variance limited to " + std::to_string(kBruteforceLimit) + " points");
  }
  CompensatedSum acc;
  for (const auto& i : points) {
    for (const auto& j : points) acc += model(i - j);
  }
  return static_cast<double>(acc.value());
}

/// Oracle for variance_exact: sum of cov(X_i, X_j) over all pairs in U_n.
[[nodiscard]] inline double variance_bruteforce(const CovarianceModel& model, const MultiIndex& n) {
  if (product(n) > kBruteforceLimit) {
    throw std::invalid_argument("variance_bruteforce: <n> exceeds " + std::to_string(kBruteforceLimit));
  }
  const auto pts = enumerate_box(Box::from_extent(n));
  return set_variance_bruteforce(model, pts);
}

struct SandwichResult {
  double lower = 0.0;           ///< (1-c)^d <n> K_X([cn])
  double exact = 0.0;           ///< var S(U_n)
  double upper = 0.0;           ///< <n> K_X(n)
  double k_rect = 0.0;          ///< K_X(n)
  double converse_upper = 0.0;  ///< (q/(q-1))^d var S(U_qn) / <qn>
  bool lower_holds = false;
  bool upper_holds = false;
  bool converse_holds = false;

  [[nodiscard]] bool all_hold() const noexcept { return lower_holds && upper_holds && converse_holds; }
};

/// Two-sided bounds on var S(U_n) by K_X and the converse bound on K_X(n).
[[nodiscard]] inline SandwichResult lemma2_sandwich(const CovarianceModel& model, const MultiIndex& n, double c,
                                                    std::int64_t q, double rel_tol = 1e-12) {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("lemma2_sandwich: c must lie in (0, 1)");
  if (q <= 1) throw std::invalid_argument("lemma2_sandwich: q must be > 1");
  require_same_dim(n, MultiIndex::zeros(model.dim()));
  for (auto v : n) {
    if (static_cast<double>(v) * (1.0 - c) < 1.0) {
      throw std::invalid_argument("lemma2_sandwich: need n >= 1/(1-c) in every coordinate, got " + to_string(n));
    }
  }
  const std::size_t d = n.dim();
  const auto size = static_cast<double>(product(n));
  std::vector<MultiIndex::value_type> cn(d);
  for (std::size_t k = 0; k < d; ++k) cn[k] = static_cast<std::int64_t>(std::floor(c * static_cast<double>(n[k])));

  SandwichResult out;
  out.k_rect = k_rect(model, n);
  out.lower = std::pow(1.0 - c, static_cast<double>(d)) * size * k_rect(model, MultiIndex(cn));
  out.exact = variance_exact(model, n);
  out.upper = size * out.k_rect;
  const MultiIndex qn = q * n;
  out.converse_upper = std::pow(static_cast<double>(q) / static_cast<double>(q - 1), static_cast<double>(d)) *
                       variance_exact(model, qn) / static_cast<double>(product(qn));
  out.lower_holds = out.lower <= out.exact * (1.0 + rel_tol);
  out.upper_holds = out.exact <= out.upper * (1.0 + rel_tol);
  out.converse_holds = out.k_rect <= out.converse_upper * (1.0 + rel_tol);
  return out;
}

}  // namespace assoc_clt
