#pragma once

// Finite-scale probes for slow variation of functions on N^d or R^d_+, and
// the floor extension of a monotone lattice function to the continuum.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "assoc_clt/covariance.hpp"
#include "assoc_clt/lattice.hpp"

namespace assoc_clt {

enum class Domain { lattice, continuum };

/// A function L : N^d -> R\{0} (lattice) or R^d_+ -> R\{0} (continuum).
///
/// Lattice-tagged functions are only ever evaluated at integer points.
class SlowVaryFn {
 public:
  using LatticeFn = std::function<double(const MultiIndex&)>;
  using ContinuumFn = std::function<double(std::span<const double>)>;

  static SlowVaryFn lattice(std::size_t d, LatticeFn f) {
    SlowVaryFn out(d, Domain::lattice);
    out.lattice_ = std::move(f);
    return out;
  }

  static SlowVaryFn continuum(std::size_t d, ContinuumFn f) {
    SlowVaryFn out(d, Domain::continuum);
    out.continuum_ = std::move(f);
    return out;
  }

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] Domain domain() const noexcept { return domain_; }

  [[nodiscard]] double operator()(const MultiIndex& n) const {
    require_same_dim(n, MultiIndex::zeros(dim_));
    if (domain_ == Domain::lattice) return lattice_(n);
    const auto x = to_real(n);
    return continuum_(x);
  }

  [[nodiscard]] double operator()(std::span<const double> x) const {
    if (x.size() != dim_) throw std::invalid_argument("slowly varying function evaluated at wrong dimension");
    if (domain_ == Domain::continuum) return continuum_(x);
    for (double v : x) {
      if (v != std::floor(v)) throw std::invalid_argument("lattice function evaluated off the lattice");
    }
    return lattice_(floor_index(x));
  }

 private:
  SlowVaryFn(std::size_t d, Domain tag) : dim_(d), domain_(tag) {
    if (d == 0) throw std::invalid_argument("slowly varying function: dimension must be >= 1");
  }

  std::size_t dim_;
  Domain domain_;
  LatticeFn lattice_;
  ContinuumFn continuum_;
};

/// prod_k log(x_k v 1).
[[nodiscard]] inline SlowVaryFn log_product_fn(std::size_t d) {
  return SlowVaryFn::continuum(d, [](std::span<const double> x) {
    double v = 1.0;
    for (double xk : x) v *= std::log(std::max(xk, 1.0));
    return v;
  });
}

/// n -> K_X(n) of a covariance model (lattice-tagged, coordinate-wise nondecreasing).
[[nodiscard]] inline SlowVaryFn k_rect_fn(CovarianceModel model) {
  const auto d = model.dim();
  return SlowVaryFn::lattice(d, [m = std::move(model)](const MultiIndex& n) { return k_rect(m, n); });
}

/// Ratios L(a * x) / L(x) along a schedule of lattice points.
[[nodiscard]] inline std::vector<double> sv_ratio_probe(const SlowVaryFn& L, const MultiIndex& a,
                                                        std::span<const MultiIndex> schedule) {
  require_same_dim(a, MultiIndex::zeros(L.dim()));
  if (!leq(MultiIndex::ones(L.dim()), a)) throw std::invalid_argument("sv_ratio_probe: scaling vector must be >= 1");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!less(schedule[i - 1], schedule[i])) {
      throw std::invalid_argument("sv_ratio_probe: schedule must increase strictly in every coordinate");
    }
  }
  std::vector<double> ratios;
  ratios.reserve(schedule.size());
  for (const auto& x : schedule) {
    std::vector<MultiIndex::value_type> ax(x.dim());
    for (std::size_t k = 0; k < x.dim(); ++k) {
      if (__builtin_mul_overflow(a[k], x[k], &ax[k])) throw std::overflow_error("sv_ratio_probe: a*x overflows");
    }
    const double den = L(x);
    const double num = L(MultiIndex(std::move(ax)));
    if (den == 0.0 || num == 0.0) {
      throw std::domain_error("slowly varying function returned 0 at " + to_string(x));
    }
    ratios.push_back(num / den);
  }
  return ratios;
}

/// x = 2^j * 1 for j = from .. to.
[[nodiscard]] inline std::vector<MultiIndex> dyadic_schedule(std::size_t d, int from_log2 = 8, int to_log2 = 20) {
  if (from_log2 < 0 || to_log2 > 62 || from_log2 > to_log2) throw std::invalid_argument("dyadic_schedule: bad range");
  std::vector<MultiIndex> out;
  for (int j = from_log2; j <= to_log2; ++j) out.push_back(MultiIndex::filled(d, std::int64_t{1} << j));
  return out;
}

struct MonotoneViolation {
  MultiIndex at;
  MultiIndex next;
  double value_at = 0.0;
  double value_next = 0.0;
};

/// First pair (n, n + e_k) with L(n) > L(n + e_k) over the grid 1 <= n <= grid_max, if any.
[[nodiscard]] inline std::optional<MonotoneViolation> find_monotone_violation(const SlowVaryFn& L,
                                                                             const MultiIndex& grid_max) {
  require_same_dim(grid_max, MultiIndex::zeros(L.dim()));
  if (!leq(MultiIndex::ones(L.dim()), grid_max)) throw std::invalid_argument("monotone_grid_check: grid_max >= 1");
  std::optional<MonotoneViolation> found;
  for_each_point(Box::from_extent(grid_max), [&](const MultiIndex& n) {
    if (found) return;
    const double here = L(n);
    for (std::size_t k = 0; k < n.dim() && !found; ++k) {
      const MultiIndex next = n + MultiIndex::unit(n.dim(), k);
      const double there = L(next);
      if (here > there) found = MonotoneViolation{n, next, here, there};
    }
  });
  return found;
}

[[nodiscard]] inline bool monotone_grid_check(const SlowVaryFn& L, const MultiIndex& grid_max) {
  return !find_monotone_violation(L, grid_max).has_value();
}

/// H(x) = L([x v 1]) for a coordinate-wise nondecreasing lattice function L.
///
/// Monotonicity is the hypothesis of the extension; it is spot-checked on the
/// grid 1 <= n <= check_grid and the call fails naming the first violating pair.
[[nodiscard]] inline SlowVaryFn extend_to_continuum(const SlowVaryFn& L, bool assume_monotone,
                                                   std::optional<MultiIndex> check_grid = std::nullopt) {
  if (L.domain() != Domain::lattice) throw std::invalid_argument("extend_to_continuum: L must be lattice-tagged");
  if (!assume_monotone) {
    throw std::invalid_argument("extend_to_continuum: no extension is defined for non-monotone L");
  }
  const auto grid = check_grid.value_or(MultiIndex::filled(L.dim(), L.dim() == 1 ? 256 : (L.dim() == 2 ? 24 : 8)));
  if (auto v = find_monotone_violation(L, grid)) {
    throw std::domain_error("extend_to_continuum: L is not nondecreasing: L" + to_string(v->at) + " = " +
                            std::to_string(v->value_at) + " > L" + to_string(v->next) + " = " +
                            std::to_string(v->value_next));
  }
  return SlowVaryFn::continuum(L.dim(), [L](std::span<const double> x) {
    std::vector<double> clamped(x.begin(), x.end());
    for (auto& v : clamped) v = std::max(v, 1.0);
    return L(floor_index(clamped));
  });
}

}  // namespace assoc_clt
