#pragma once

// Bernstein blocking of the index box U_n: the slowly growing corridor width
// q_n built from a monotone slowly varying L, the block side p_n, and the
// partition of U_n into large blocks separated by corridors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "assoc_clt/covariance.hpp"
#include "assoc_clt/lattice.hpp"
#include "assoc_clt/slowvar.hpp"

namespace assoc_clt {

struct ScheduleOptions {
  /// The N_0 search covers dyadic n up to 2^cap_log2 in every coordinate.
  int cap_log2 = 24;
  /// Grid for the monotonicity spot-check of L; a dimension-dependent default when unset.
  std::optional<MultiIndex> monotone_grid;
};

/// The corridor-width schedule n -> q_n and its companion n -> p_n.
///
/// eps^(k)_j = 1 / R^(k)(r) on M_0^(k)(r) <= j < M_0^(k)(r+1), and
/// q_n = ([n_k eps^(k)_{n_k}])_k v ([log n_k])_k v 1.
class BlockingSchedule {
 public:
  BlockingSchedule(std::vector<MultiIndex> r_seq, std::vector<MultiIndex> n0_seq, std::vector<MultiIndex> m0_seq,
                   std::optional<std::size_t> stopped_at, double stop_ratio)
      : r_seq_(std::move(r_seq)),
        n0_seq_(std::move(n0_seq)),
        m0_seq_(std::move(m0_seq)),
        stopped_at_(stopped_at),
        stop_ratio_(stop_ratio) {
    if (r_seq_.empty() || r_seq_.size() != m0_seq_.size() || r_seq_.size() != n0_seq_.size()) {
      throw std::invalid_argument("BlockingSchedule: inconsistent sequence lengths");
    }
  }

  [[nodiscard]] std::size_t dim() const noexcept { return r_seq_.front().dim(); }
  /// R(1), R(2), ... actually used (a prefix of the requested sequence).
  [[nodiscard]] const std::vector<MultiIndex>& r_seq() const noexcept { return r_seq_; }
  [[nodiscard]] const std::vector<MultiIndex>& n0_seq() const noexcept { return n0_seq_; }
  [[nodiscard]] const std::vector<MultiIndex>& m0_seq() const noexcept { return m0_seq_; }
  /// Index (0-based) of the first R(r) whose N_0 lies beyond the search cap, if the
  /// requested sequence was cut there; on the searched range the cut changes nothing
  /// because M_0(r) would exceed the cap.
  [[nodiscard]] std::optional<std::size_t> stopped_at() const noexcept { return stopped_at_; }
  [[nodiscard]] double stop_ratio() const noexcept { return stop_ratio_; }

  /// Index r (0-based) of the eps piece containing j on axis k.
  [[nodiscard]] std::size_t piece(std::size_t k, std::int64_t j) const {
    std::size_t r = 0;
    for (std::size_t i = 0; i < m0_seq_.size(); ++i) {
      if (m0_seq_[i][k] <= j) r = i;
      else break;
    }
    return r;
  }

  /// eps^(k)_j as the denominator R^(k)(r), so that [j eps] is an exact integer division.
  [[nodiscard]] std::int64_t eps_denominator(std::size_t k, std::int64_t j) const { return r_seq_[piece(k, j)][k]; }
  [[nodiscard]] double eps(std::size_t k, std::int64_t j) const {
    return 1.0 / static_cast<double>(eps_denominator(k, j));
  }

  [[nodiscard]] MultiIndex q_of(const MultiIndex& n) const {
    require_same_dim(n, MultiIndex::zeros(dim()));
    std::vector<MultiIndex::value_type> q(n.dim());
    for (std::size_t k = 0; k < n.dim(); ++k) {
      if (n[k] < 1) throw std::invalid_argument("q_of: n must be >= 1");
      const auto scaled = n[k] / eps_denominator(k, n[k]);
      const auto logn = static_cast<std::int64_t>(std::floor(std::log(static_cast<double>(n[k]))));
      q[k] = std::max({scaled, logn, std::int64_t{1}});
    }
    return MultiIndex(std::move(q));
  }

  [[nodiscard]] MultiIndex p_of(const MultiIndex& n) const;

 private:
  std::vector<MultiIndex> r_seq_;
  std::vector<MultiIndex> n0_seq_;
  std::vector<MultiIndex> m0_seq_;
  std::optional<std::size_t> stopped_at_;
  double stop_ratio_ = 0.0;
};

/// R(r) = 2^r * 1 for r = 1 .. 62.
[[nodiscard]] inline std::vector<MultiIndex> default_r_seq(std::size_t d) {
  std::vector<MultiIndex> out;
  for (int r = 1; r <= 62; ++r) out.push_back(MultiIndex::filled(d, std::int64_t{1} << r));
  return out;
}

namespace detail {

class MemoFn {
 public:
  explicit MemoFn(const SlowVaryFn& L) : L_(L) {}
  /// H(x) = L([x v 1]) evaluated at x = n / R.
  double at(const MultiIndex& n) {
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    const double v = L_(n);
    if (v == 0.0 || !std::isfinite(v)) throw std::domain_error("L returned 0 or a non-finite value at " + to_string(n));
    cache_.emplace(n, v);
    return v;
  }
  double at_scaled(const MultiIndex& n, const MultiIndex& r) {
    std::vector<MultiIndex::value_type> m(n.dim());
    for (std::size_t k = 0; k < n.dim(); ++k) m[k] = std::max<std::int64_t>(n[k] / r[k], 1);
    return at(MultiIndex(std::move(m)));
  }

 private:
  const SlowVaryFn& L_;
  std::map<MultiIndex, double> cache_;
};

/// Calls f(exponents) for every j in {0..cap}^d.
template <class F>
void for_each_exponent(std::size_t d, int cap, F&& f) {
  for_each_point(Box(MultiIndex::filled(d, -1), MultiIndex::filled(d, cap)), f);
}

inline MultiIndex dyadic_point(const MultiIndex& exps) {
  std::vector<MultiIndex::value_type> n(exps.dim());
  for (std::size_t k = 0; k < exps.dim(); ++k) n[k] = std::int64_t{1} << exps[k];
  return MultiIndex(std::move(n));
}

struct N0Search {
  std::optional<MultiIndex> n0;
  double top_ratio = 0.0;  ///< L(n)/L(n/R) - 1 at the largest grid point
};

/// Smallest diagonal N = 2^j * 1 such that L(n)/L(n/R) - 1 <= 1/<R> for every dyadic grid n >= N.
inline N0Search search_n0(MemoFn& L, const MultiIndex& R, int cap) {
  const std::size_t d = R.dim();
  const double tol = 1.0 / static_cast<double>(product(R));
  std::vector<char> ok_at_min(static_cast<std::size_t>(cap) + 1, 1);
  N0Search out;
  for_each_exponent(d, cap, [&](const MultiIndex& e) {
    const auto n = dyadic_point(e);
    const double excess = L.at(n) / L.at_scaled(n, R) - 1.0;
    if (*std::min_element(e.begin(), e.end()) == cap) out.top_ratio = excess;
    if (excess > tol) ok_at_min[static_cast<std::size_t>(*std::min_element(e.begin(), e.end()))] = 0;
  });
  int first = cap + 1;
  for (int j = cap; j >= 0; --j) {
    if (!ok_at_min[static_cast<std::size_t>(j)]) break;
    first = j;
  }
  if (first <= cap) out.n0 = MultiIndex::filled(d, std::int64_t{1} << first);
  return out;
}

inline std::int64_t isqrt_floor(std::int64_t a, std::int64_t b) {
  const auto prod = static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
  auto r = static_cast<unsigned __int128>(std::sqrt(static_cast<long double>(prod)));
  while (r * r > prod) --r;
  while ((r + 1) * (r + 1) <= prod) ++r;
  return static_cast<std::int64_t>(r);
}

}  // namespace detail

/// Builds the corridor-width schedule from a monotone slowly varying L.
///
/// N_0(R) is searched on the dyadic grid up to 2^cap_log2. If N_0(R(1)) is not
/// found the call fails; if a later N_0(R(r)) is not found the sequence is cut
/// before r, which leaves q_n unchanged for every n inside the searched range.
[[nodiscard]] inline BlockingSchedule build_schedule(const SlowVaryFn& L, std::span<const MultiIndex> r_seq,
                                                     const ScheduleOptions& opts = {}) {
  const std::size_t d = L.dim();
  if (r_seq.empty()) throw std::invalid_argument("build_schedule: empty R sequence");
  if (opts.cap_log2 < 1 || opts.cap_log2 > 62) throw std::invalid_argument("build_schedule: cap_log2 out of range");
  for (std::size_t i = 0; i < r_seq.size(); ++i) {
    require_same_dim(r_seq[i], MultiIndex::zeros(d));
    if (!leq(MultiIndex::ones(d), r_seq[i])) throw std::invalid_argument("build_schedule: R(r) must be >= 1");
    if (i > 0 && !less(r_seq[i - 1], r_seq[i])) {
      throw std::invalid_argument("build_schedule: R sequence must increase strictly in every coordinate");
    }
  }
  const auto grid = opts.monotone_grid.value_or(MultiIndex::filled(d, d == 1 ? 256 : (d == 2 ? 24 : 8)));
  if (auto v = find_monotone_violation(L, grid)) {
    throw std::domain_error("build_schedule: L is not nondecreasing between " + to_string(v->at) + " and " +
                            to_string(v->next));
  }
  detail::MemoFn memo(L);
  // monotone along the dyadic grid as well
  detail::for_each_exponent(d, opts.cap_log2 - 1, [&](const MultiIndex& e) {
    for (std::size_t k = 0; k < d; ++k) {
      auto up = e;
      ++up[k];
      if (memo.at(detail::dyadic_point(e)) > memo.at(detail::dyadic_point(up))) {
        throw std::domain_error("build_schedule: L is not nondecreasing between " +
                                to_string(detail::dyadic_point(e)) + " and " + to_string(detail::dyadic_point(up)));
      }
    }
  });

  std::vector<MultiIndex> used_r, n0s, m0s;
  std::optional<std::size_t> stopped;
  double stop_ratio = 0.0;
  for (std::size_t r = 0; r < r_seq.size(); ++r) {
    const auto found = detail::search_n0(memo, r_seq[r], opts.cap_log2);
    if (!found.n0) {
      if (r == 0) {
        throw std::runtime_error("build_schedule: no N_0(R(1)) up to 2^" + std::to_string(opts.cap_log2) +
                                 "; largest verified ratio L(n)/L(n/R) - 1 = " + std::to_string(found.top_ratio) +
                                 " exceeds 1/<R> = " + std::to_string(1.0 / static_cast<double>(product(r_seq[0]))));
      }
      stopped = r;
      stop_ratio = found.top_ratio;
      break;
    }
    MultiIndex m0 = r == 0 ? *found.n0 : join(m0s.back(), *found.n0) + MultiIndex::ones(d);
    used_r.push_back(r_seq[r]);
    n0s.push_back(*found.n0);
    m0s.push_back(std::move(m0));
  }
  return BlockingSchedule(std::move(used_r), std::move(n0s), std::move(m0s), stopped, stop_ratio);
}

[[nodiscard]] inline BlockingSchedule build_schedule(const SlowVaryFn& L, const ScheduleOptions& opts = {}) {
  const auto seq = default_r_seq(L.dim());
  return build_schedule(L, seq, opts);
}

/// p^(k) = clamp([sqrt(q^(k) n_k)], q^(k), n_k).
[[nodiscard]] inline MultiIndex choose_p(const MultiIndex& n, const MultiIndex& q) {
  require_same_dim(n, q);
  if (!leq(MultiIndex::ones(n.dim()), q) || !leq(q, n)) {
    throw std::invalid_argument("choose_p: need 1 <= q <= n, got q=" + to_string(q) + " n=" + to_string(n));
  }
  std::vector<MultiIndex::value_type> p(n.dim());
  for (std::size_t k = 0; k < n.dim(); ++k) p[k] = std::clamp(detail::isqrt_floor(q[k], n[k]), q[k], n[k]);
  return MultiIndex(std::move(p));
}

inline MultiIndex BlockingSchedule::p_of(const MultiIndex& n) const { return choose_p(n, q_of(n)); }

struct BlockingPlan {
  MultiIndex n;
  MultiIndex p;
  MultiIndex q;
  std::vector<Box> blocks;     ///< U_n^(j), in the order of j_set
  std::vector<MultiIndex> j_set;
  std::int64_t corridor_cardinality = 0;
  MultiIndex m_counts;         ///< [n_k / (p_k + q_k)]
  std::int64_t block_count = 0;
  MultiIndex j_extent;         ///< J_n = {1 .. j_extent} (product set)

  [[nodiscard]] std::size_t dim() const noexcept { return n.dim(); }
  [[nodiscard]] Box box() const { return Box::from_extent(n); }

  /// prod_k m_k and prod_k (m_k + 1).
  [[nodiscard]] std::int64_t m_lower() const {
    std::int64_t v = 1;
    for (auto m : m_counts) v *= m;
    return v;
  }
  [[nodiscard]] std::int64_t m_upper() const {
    std::int64_t v = 1;
    for (auto m : m_counts) v *= m + 1;
    return v;
  }

  /// sum_k (m_k q_k + p_k + q_k) prod_{l != k} n_l, an upper bound on card G_n.
  [[nodiscard]] std::int64_t corridor_cardinality_bound() const {
    std::int64_t total = 0;
    for (std::size_t k = 0; k < dim(); ++k) {
      std::int64_t term = m_counts[k] * q[k] + p[k] + q[k];
      for (std::size_t l = 0; l < dim(); ++l) {
        if (l != k) term *= n[l];
      }
      total += term;
    }
    return total;
  }

  [[nodiscard]] bool in_blocks(const MultiIndex& u) const {
    for (std::size_t k = 0; k < dim(); ++k) {
      const auto period = p[k] + q[k];
      const auto jk = (u[k] - 1) / period;  // 0-based block index along k
      if (jk >= j_extent[k]) return false;
      if (u[k] - jk * period > p[k]) return false;
    }
    return true;
  }
};

/// Partition of U_n into blocks {(j-1)(p+q) < u <= jp + (j-1)q} contained in U_n and the corridor G_n.
[[nodiscard]] inline BlockingPlan partition(const MultiIndex& n, const MultiIndex& p, const MultiIndex& q) {
  require_same_dim(n, p);
  require_same_dim(n, q);
  const std::size_t d = n.dim();
  if (!leq(MultiIndex::ones(d), q) || !leq(q, p) || !leq(p, n)) {
    throw std::invalid_argument("partition: need 1 <= q <= p <= n, got n=" + to_string(n) + " p=" + to_string(p) +
                                " q=" + to_string(q));
  }
  BlockingPlan plan{n, p, q, {}, {}, 0, MultiIndex::zeros(d), 0, MultiIndex::zeros(d)};
  for (std::size_t k = 0; k < d; ++k) {
    plan.m_counts[k] = n[k] / (p[k] + q[k]);
    plan.j_extent[k] = (n[k] + q[k]) / (p[k] + q[k]);  // largest j with jp + (j-1)q <= n
  }
  plan.block_count = product(plan.j_extent);
  for_each_point(Box::from_extent(plan.j_extent), [&](const MultiIndex& j) {
    std::vector<MultiIndex::value_type> lo(d), hi(d);
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = (j[k] - 1) * (p[k] + q[k]);
      hi[k] = lo[k] + p[k];
    }
    plan.j_set.push_back(j);
    plan.blocks.emplace_back(MultiIndex(std::move(lo)), MultiIndex(std::move(hi)));
  });
  plan.corridor_cardinality = product(n) - plan.block_count * product(p);
  return plan;
}

/// Points of G_n in lexicographic order.
[[nodiscard]] inline std::vector<MultiIndex> corridor_points(const BlockingPlan& plan) {
  std::vector<MultiIndex> out;
  for_each_point(plan.box(), [&](const MultiIndex& u) {
    if (!plan.in_blocks(u)) out.push_back(u);
  });
  return out;
}

struct CorridorBound {
  double bound = 0.0;           ///< card G_n * K_X(n)
  double exact = 0.0;           ///< var S(G_n)
  double ratio_to_total = 0.0;  ///< bound / (<n> K_X(n))
  bool bruteforce = false;
  bool holds = false;
};

/// var S(G_n) = var S(U_n) - 2 sum_j cov(S(U_n), S(B_j)) + sum_{j,j'} cov(S(B_j), S(B_j')).
[[nodiscard]] inline double corridor_variance_structured(const BlockingPlan& plan, const CovarianceModel& model) {
  if (plan.corridor_cardinality == 0) return 0.0;
  const Box whole = plan.box();
  const std::size_t d = plan.dim();
  CompensatedSum acc;
  acc += variance_exact(model, plan.n);
  for (const auto& b : plan.blocks) acc += -2.0L * box_covariance(model, whole, b);
  if (plan.block_count > 0) {
    // equal blocks on a lattice of offsets: cov depends only on j - j'
    const Box first = plan.blocks.front();
    std::vector<MultiIndex::value_type> lo(d), hi(d);
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = -plan.j_extent[k];
      hi[k] = plan.j_extent[k] - 1;
    }
    const auto range = model.range();
    for_each_point(Box(MultiIndex(lo), MultiIndex(hi)), [&](const MultiIndex& delta) {
      long double count = 1.0L;
      std::vector<MultiIndex::value_type> shift_lo(d), shift_hi(d);
      for (std::size_t k = 0; k < d; ++k) {
        count *= static_cast<long double>(plan.j_extent[k] - (delta[k] < 0 ? -delta[k] : delta[k]));
        const auto off = delta[k] * (plan.p[k] + plan.q[k]);
        shift_lo[k] = first.lower()[k] + off;
        shift_hi[k] = first.upper()[k] + off;
        if (range) {
          const auto gap = (delta[k] < 0 ? -off : off) - plan.p[k] + 1;
          if (gap > *range) count = 0.0L;
        }
      }
      if (count == 0.0L) return;
      acc += count * box_covariance(model, first, Box(MultiIndex(shift_lo), MultiIndex(shift_hi)));
    });
  }
  return static_cast<double>(acc.value());
}

[[nodiscard]] inline CorridorBound corridor_variance_bound(const BlockingPlan& plan, const CovarianceModel& model) {
  require_same_dim(plan.n, MultiIndex::zeros(model.dim()));
  const double kx = k_rect(model, plan.n);
  const auto size = static_cast<double>(product(plan.n));
  CorridorBound out;
  out.bound = static_cast<double>(plan.corridor_cardinality) * kx;
  out.ratio_to_total = out.bound / (size * kx);
  if (plan.corridor_cardinality == 0) {
    out.exact = 0.0;
    out.bruteforce = true;
  } else if (product(plan.n) <= kBruteforceLimit) {
    const auto pts = corridor_points(plan);
    out.exact = set_variance_bruteforce(model, pts);
    out.bruteforce = true;
  } else {
    out.exact = corridor_variance_structured(plan, model);
  }
  out.holds = out.exact <= out.bound * (1.0 + 1e-12);
  return out;
}

}  // namespace assoc_clt
