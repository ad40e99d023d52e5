#pragma once

// Monte Carlo harness for the central limit theorem of positively associated
// stationary fields: normalized partial sums, distances to the normal law,
// the uniform-integrability tail table, and the three-term certificate that
// follows the blocking argument (corridor term, covariance tail, Lindeberg sum).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "assoc_clt/blocking.hpp"
#include "assoc_clt/covariance.hpp"
#include "assoc_clt/fields.hpp"
#include "assoc_clt/lattice.hpp"
#include "assoc_clt/parallel.hpp"
#include "assoc_clt/summation.hpp"

namespace assoc_clt {

enum class NormalizationMode {
  exact_variance,  ///< v_n = sqrt(var S(U_n))
  k_rect,          ///< v_n = sqrt(<n> K_X(n))
  k_ball,          ///< cubes n = r 1: v_n = sqrt(r^d K(r)), Euclidean ball sum
};

[[nodiscard]] inline const char* to_string(NormalizationMode m) {
  switch (m) {
    case NormalizationMode::exact_variance: return "exact-variance";
    case NormalizationMode::k_rect: return "k-normalization";
    case NormalizationMode::k_ball: return "cube-k-normalization";
  }
  return "?";
}

/// Normalizing constants v_n, computed from the exact covariance model and cached per n.
class NormalizationSpec {
 public:
  explicit NormalizationSpec(NormalizationMode mode) : mode_(mode) {}

  [[nodiscard]] NormalizationMode mode() const noexcept { return mode_; }

  [[nodiscard]] double value(const CovarianceModel& model, const MultiIndex& n) {
    if (auto it = cache_.find(n); it != cache_.end()) return it->second;
    const double v = compute(model, n);
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("normalization v_n is not positive at " + to_string(n));
    cache_.emplace(n, v);
    return v;
  }

  /// v_n^2 under `mode` for the given model.
  [[nodiscard]] static double squared(const CovarianceModel& model, const MultiIndex& n, NormalizationMode mode) {
    const auto size = static_cast<double>(product(n));
    switch (mode) {
      case NormalizationMode::exact_variance: return variance_exact(model, n);
      case NormalizationMode::k_rect: return size * k_rect(model, n);
      case NormalizationMode::k_ball: {
        for (auto v : n) {
          if (v != n[0]) throw std::invalid_argument("cube normalization needs n = r * 1, got " + to_string(n));
        }
        return size * k_ball_euclid(model, n[0]);
      }
    }
    return 0.0;
  }

 private:
  [[nodiscard]] double compute(const CovarianceModel& model, const MultiIndex& n) const {
    return std::sqrt(squared(model, n, mode_));
  }

  NormalizationMode mode_;
  std::map<MultiIndex, double> cache_;
};

struct RunOptions {
  std::int64_t replicates = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// S(U_n) - <n> E X_0 for independent realizations; replicate r uses stream (seed, r, 0).
[[nodiscard]] inline std::vector<double> centered_sums(const FieldSampler& sampler, const MultiIndex& n,
                                                       const RunOptions& run) {
  if (run.replicates < 1) throw std::invalid_argument("centered_sums: replicates must be >= 1");
  const Box box = Box::from_extent(n);
  const double center = static_cast<double>(product(n)) * sampler.mean();
  std::vector<double> out(static_cast<std::size_t>(run.replicates));
  parallel_for(run.replicates, run.threads, [&](std::int64_t r) {
    const auto real = sampler.sample(box, StreamId{run.seed, static_cast<std::uint64_t>(r), 0});
    out[static_cast<std::size_t>(r)] = total_sum(real) - center;
  });
  return out;
}

/// (S_n - E S_n) / v_n for `replicates` independent realizations.
[[nodiscard]] inline std::vector<double> normalized_sums(const FieldSampler& sampler, const MultiIndex& n,
                                                         NormalizationSpec& spec, const RunOptions& run) {
  const double v = spec.value(sampler.model(), n);
  auto out = centered_sums(sampler, n, run);
  for (auto& x : out) x /= v;
  return out;
}

[[nodiscard]] inline double normal_cdf(double x, double variance = 1.0) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

/// sup_x |F_N(x) - Phi(x / sqrt(target_variance))|.
[[nodiscard]] inline double ks_normal(std::span<const double> samples, double target_variance = 1.0) {
  if (samples.size() < 2) throw std::invalid_argument("ks_normal: need at least 2 samples");
  if (!(target_variance > 0.0)) throw std::invalid_argument("ks_normal: target variance must be > 0");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i], target_variance);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

/// max over t of |mean(exp(i t X)) - exp(-target_variance t^2 / 2)|.
[[nodiscard]] inline double cf_distance(std::span<const double> samples, std::span<const double> t_grid,
                                        double target_variance = 1.0) {
  if (t_grid.empty()) throw std::invalid_argument("cf_distance: empty t grid");
  if (samples.empty()) throw std::invalid_argument("cf_distance: no samples");
  double worst = 0.0;
  for (double t : t_grid) {
    CompensatedSum re, im;
    for (double x : samples) {
      re += std::cos(t * x);
      im += std::sin(t * x);
    }
    const auto n = static_cast<long double>(samples.size());
    const std::complex<double> ecf(static_cast<double>(re.value() / n), static_cast<double>(im.value() / n));
    worst = std::max(worst, std::abs(ecf - std::exp(-0.5 * target_variance * t * t)));
  }
  return worst;
}

struct UiTailRow {
  std::vector<double> tails;       ///< E[Y^2 1{Y^2 > c}] per c
  std::vector<double> std_errors;  ///< Monte Carlo standard error of each tail
};

/// E[Y^2 1{Y^2 > c}] for each c, estimated by the sample mean, with standard errors.
[[nodiscard]] inline UiTailRow ui_tail_estimate(std::span<const double> samples, std::span<const double> c_grid) {
  for (std::size_t i = 0; i < c_grid.size(); ++i) {
    if (c_grid[i] < 0.0 || (i > 0 && c_grid[i] <= c_grid[i - 1])) {
      throw std::invalid_argument("ui tail: c grid must be nonnegative and strictly increasing");
    }
  }
  if (samples.empty()) throw std::invalid_argument("ui tail: no samples");
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = samples[i] * samples[i];
  std::sort(sq.begin(), sq.end());
  // tails over a sorted array: each larger c drops a prefix, so the row is nonincreasing exactly
  std::vector<long double> suffix(sq.size() + 1, 0.0L), suffix2(sq.size() + 1, 0.0L);
  for (std::size_t i = sq.size(); i > 0; --i) {
    suffix[i - 1] = suffix[i] + sq[i - 1];
    suffix2[i - 1] = suffix2[i] + static_cast<long double>(sq[i - 1]) * sq[i - 1];
  }
  const auto count = static_cast<long double>(sq.size());
  UiTailRow out{std::vector<double>(c_grid.size()), std::vector<double>(c_grid.size())};
  for (std::size_t j = 0; j < c_grid.size(); ++j) {
    const auto first = static_cast<std::size_t>(std::upper_bound(sq.begin(), sq.end(), c_grid[j]) - sq.begin());
    const long double mean = suffix[first] / count;
    const long double var = std::max(0.0L, suffix2[first] / count - mean * mean);
    out.tails[j] = static_cast<double>(mean);
    out.std_errors[j] = static_cast<double>(std::sqrt(var / count));
  }
  return out;
}

[[nodiscard]] inline std::vector<double> ui_tail_row(std::span<const double> samples, std::span<const double> c_grid) {
  return ui_tail_estimate(samples, c_grid).tails;
}

struct UiTable {
  std::vector<MultiIndex> n_grid;
  std::vector<double> c_grid;
  std::vector<std::vector<double>> tails;       ///< tails[i][j] at n_grid[i], c_grid[j]
  std::vector<std::vector<double>> std_errors;  ///< same shape as tails
  std::vector<double> sup_over_n;               ///< per c

  [[nodiscard]] bool empty() const noexcept { return tails.empty() || c_grid.empty(); }

  void add_row(MultiIndex n, UiTailRow row) {
    if (sup_over_n.empty()) sup_over_n.assign(row.tails.size(), 0.0);
    for (std::size_t j = 0; j < row.tails.size(); ++j) sup_over_n[j] = std::max(sup_over_n[j], row.tails[j]);
    n_grid.push_back(std::move(n));
    tails.push_back(std::move(row.tails));
    std_errors.push_back(std::move(row.std_errors));
  }
};

/// Tail second moments of (S_n - E S_n)/v_n over an n grid, v_n from a K normalization.
[[nodiscard]] inline UiTable ui_diagnostic(const FieldSampler& sampler, std::span<const MultiIndex> n_grid,
                                           NormalizationSpec& spec, std::span<const double> c_grid,
                                           const RunOptions& run) {
  if (spec.mode() == NormalizationMode::exact_variance) {
    throw std::invalid_argument("ui_diagnostic: the family is normalized by <n> K, not by the exact variance");
  }
  UiTable table;
  table.c_grid.assign(c_grid.begin(), c_grid.end());
  for (const auto& n : n_grid) {
    const auto samples = normalized_sums(sampler, n, spec, run);
    table.add_row(n, ui_tail_estimate(samples, c_grid));
  }
  return table;
}

struct Certificate {
  MultiIndex n;
  MultiIndex p;
  MultiIndex q;
  double t = 0.0;
  double q1_bound = 0.0;        ///< |t| sqrt(card G_n K_X(n) / (<n> K_X(n)))
  double q2_bound = 0.0;        ///< 4 t^2 (K_X(n) - K_X(q_n)) / K_X(n)
  double lindeberg_sum = 0.0;   ///< sum_s E Z^2 1{|Z| > eps}, Monte Carlo
  double lindeberg_std_error = 0.0;
  double block_variance_sum = 0.0;  ///< M_n var S(U_p) / (<n> K_X(n)), exact
  double epsilon = 0.1;
  std::int64_t block_count = 0;
  std::int64_t corridor_cardinality = 0;
  std::int64_t replicates = 0;
};

struct CertificateOptions {
  double epsilon = 0.1;
  RunOptions run;
};

/// The three terms bounding |E exp(i t S_n / v_n) - exp(-t^2/2)| along a blocking plan.
///
/// The Lindeberg sum is estimated on independent copies of one block sum:
/// replicate r samples U_p on stream (seed, r, 1).
[[nodiscard]] inline Certificate q_certificate(const FieldSampler& sampler, const BlockingPlan& plan,
                                               const NormalizationSpec& spec, double t,
                                               const CertificateOptions& opts = {}) {
  if (spec.mode() != NormalizationMode::k_rect) {
    throw std::invalid_argument("q_certificate: requires the K_X normalization v_n = sqrt(<n> K_X(n))");
  }
  if (!std::isfinite(t)) throw std::invalid_argument("q_certificate: t must be finite");
  if (!(opts.epsilon > 0.0)) throw std::invalid_argument("q_certificate: epsilon must be > 0");
  require_same_dim(plan.n, MultiIndex::zeros(sampler.dim()));
  const auto& model = sampler.model();
  const double kn = k_rect(model, plan.n);
  const double kq = k_rect(model, plan.q);
  if (kq > kn) throw std::logic_error("q_certificate: K_X(q_n) > K_X(n) contradicts monotonicity");
  const auto size = static_cast<double>(product(plan.n));
  const double total = size * kn;

  Certificate c{plan.n, plan.p, plan.q};
  c.t = t;
  c.epsilon = opts.epsilon;
  c.block_count = plan.block_count;
  c.corridor_cardinality = plan.corridor_cardinality;
  c.q1_bound = std::abs(t) * std::sqrt(static_cast<double>(plan.corridor_cardinality) * kn / total);
  c.q2_bound = 4.0 * t * t * (kn - kq) / kn;
  c.block_variance_sum = static_cast<double>(plan.block_count) * variance_exact(model, plan.p) / total;

  if (plan.block_count > 0) {
    const Box block = Box::from_extent(plan.p);
    const double center = static_cast<double>(product(plan.p)) * sampler.mean();
    const double level = opts.epsilon * opts.epsilon * total;
    std::vector<double> truncated(static_cast<std::size_t>(opts.run.replicates));
    parallel_for(opts.run.replicates, opts.run.threads, [&](std::int64_t r) {
      const auto real = sampler.sample(block, StreamId{opts.run.seed, static_cast<std::uint64_t>(r), 1});
      const double y = total_sum(real) - center;
      truncated[static_cast<std::size_t>(r)] = y * y > level ? y * y : 0.0;
    });
    CompensatedSum s, s2;
    for (double v : truncated) {
      s += v;
      s2 += static_cast<long double>(v) * v;
    }
    const auto reps = static_cast<double>(opts.run.replicates);
    const double mean = static_cast<double>(s.value()) / reps;
    const double var = std::max(0.0, static_cast<double>(s2.value()) / reps - mean * mean);
    const double factor = static_cast<double>(plan.block_count) / total;
    c.lindeberg_sum = factor * mean;
    c.lindeberg_std_error = factor * std::sqrt(var / reps);
    c.replicates = opts.run.replicates;
  }
  return c;
}

struct NormalityRow {
  MultiIndex n;
  double v_n = 0.0;
  double target_variance = 1.0;  ///< variance of the limit law of the normalized sums
  double sample_variance = 0.0;
  double ks = 0.0;
  double cf = 0.0;
  double ks_threshold = 0.0;
  double cf_threshold = 0.0;
  bool ks_pass = false;
  bool cf_pass = false;
};

struct VerdictThresholds {
  double ks_coeff = 1.63;  ///< KS threshold = ks_coeff / sqrt(N) + ks_slack
  double ks_slack = 0.01;
  double cf_max = 0.05;
  double ui_tail_max = 0.05;  ///< sup over n of the tail at the largest c
  double ui_flat_tol = 0.05;  ///< allowed spread over n of the tail at each c, beyond 3 standard errors

  [[nodiscard]] double ks_threshold(std::int64_t replicates) const {
    return ks_coeff / std::sqrt(static_cast<double>(replicates)) + ks_slack;
  }
};

struct CltReport {
  std::string sampler_id;
  NormalizationMode mode = NormalizationMode::exact_variance;
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<double> t_grid;
  std::vector<NormalityRow> rows;  ///< one per n, in grid order
  UiTable ui;
  std::vector<Certificate> certificates;
  std::optional<std::string> certificate_note;
  MultiIndex n;                             ///< largest n of the grid
  std::vector<double> normalized_samples;   ///< at the largest n
};

enum class Outcome { consistent_with_clt, inconsistent, inconclusive };

[[nodiscard]] inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::consistent_with_clt: return "consistent-with-CLT";
    case Outcome::inconsistent: return "inconsistent";
    case Outcome::inconclusive: return "inconclusive";
  }
  return "?";
}

struct Verdict {
  Outcome outcome = Outcome::inconclusive;
  std::string text;
  std::vector<std::string> reasons;
};

/// Three-valued reading of a report.
///
/// inconsistent: a normality distance fails at the largest n.
/// consistent: every n passes both distances and the tail table is flat in n and
/// small at the largest c. Anything else is inconclusive.
[[nodiscard]] inline Verdict theorem_verdict(const CltReport& report, const VerdictThresholds& th = {}) {
  Verdict v;
  const std::string caveat =
      " This is finite-sample evidence on a finite grid of n; the limit theorem and its uniform-integrability "
      "criterion are asymptotic statements that no finite run can decide.";
  if (report.rows.empty()) {
    v.reasons.emplace_back("no normality rows");
    v.text = "inconclusive: the report carries no normality evidence." + caveat;
    return v;
  }
  const auto& last = report.rows.back();
  if (!last.ks_pass || !last.cf_pass) {
    v.outcome = Outcome::inconsistent;
    if (!last.ks_pass) v.reasons.push_back("KS " + std::to_string(last.ks) + " > " + std::to_string(last.ks_threshold) + " at the largest n");
    if (!last.cf_pass) v.reasons.push_back("CF " + std::to_string(last.cf) + " > " + std::to_string(last.cf_threshold) + " at the largest n");
    v.text = "inconsistent: the normalized sums at the largest n are far from the normal law." + caveat;
    return v;
  }
  bool all_pass = true;
  for (const auto& r : report.rows) all_pass = all_pass && r.ks_pass && r.cf_pass;
  if (!all_pass) v.reasons.emplace_back("a smaller n fails a normality distance");
  if (report.ui.empty()) {
    v.reasons.emplace_back("empty uniform-integrability table");
    v.text = "inconclusive: no uniform-integrability evidence." + caveat;
    return v;
  }
  const double top_tail = report.ui.sup_over_n.back();
  const bool vanishing = top_tail <= th.ui_tail_max;
  if (!vanishing) v.reasons.push_back("tail at largest c " + std::to_string(top_tail) + " > " + std::to_string(th.ui_tail_max));
  // flat: every pair of rows agrees within the tolerance plus 3 combined standard errors
  bool flat = true;
  const auto& tails = report.ui.tails;
  const auto& se = report.ui.std_errors;
  for (std::size_t j = 0; j < report.ui.c_grid.size(); ++j) {
    for (std::size_t a = 0; a < tails.size(); ++a) {
      for (std::size_t b = a + 1; b < tails.size(); ++b) {
        const double noise = se.size() == tails.size() ? std::hypot(se[a][j], se[b][j]) : 0.0;
        if (std::abs(tails[a][j] - tails[b][j]) > th.ui_flat_tol + 3.0 * noise) flat = false;
      }
    }
  }
  if (!flat) v.reasons.emplace_back("tail table varies across n by more than the flatness tolerance");
  if (all_pass && vanishing && flat) {
    v.outcome = Outcome::consistent_with_clt;
    v.text = "consistent-with-CLT: normality distances and the uniform-integrability table are within thresholds." + caveat;
  } else {
    v.text = "inconclusive: the largest n passes but the remaining evidence is mixed." + caveat;
  }
  return v;
}

struct CltOptions {
  NormalizationMode mode = NormalizationMode::exact_variance;
  RunOptions run;
  std::vector<double> t_grid{0.5, 1.0, 2.0};
  std::vector<double> c_grid{2.0, 4.0, 8.0, 16.0};
  VerdictThresholds thresholds;
  /// Certificate at every n along this schedule (K_X normalization, cube-free grids only).
  const BlockingSchedule* schedule = nullptr;
  double certificate_t = 1.0;
  double lindeberg_epsilon = 0.1;
};

/// Sample, normalize, measure distances, tabulate tails, and certify along an n grid.
///
/// For each n the centered sums are drawn once; the normality row uses the chosen
/// normalization, and the tail table uses the K normalization (K_X for boxes, the
/// Euclidean K for cubes) applied to the same sums.
[[nodiscard]] inline CltReport run_clt(const FieldSampler& sampler, std::span<const MultiIndex> n_grid,
                                       const CltOptions& opts) {
  if (n_grid.empty()) throw std::invalid_argument("run_clt: empty n grid");
  CltReport rep;
  rep.sampler_id = sampler.id();
  rep.mode = opts.mode;
  rep.replicates = opts.run.replicates;
  rep.seed = opts.run.seed;
  rep.t_grid = opts.t_grid;
  rep.ui.c_grid = opts.c_grid;
  const auto& model = sampler.model();
  const NormalizationMode k_mode =
      opts.mode == NormalizationMode::k_ball ? NormalizationMode::k_ball : NormalizationMode::k_rect;
  NormalizationSpec spec(opts.mode), kspec(k_mode);
  for (const auto& n : n_grid) {
    const auto sums = centered_sums(sampler, n, opts.run);
    NormalityRow row;
    row.n = n;
    row.v_n = spec.value(model, n);
    row.target_variance = opts.mode == NormalizationMode::exact_variance
                              ? 1.0
                              : variance_exact(model, n) / (row.v_n * row.v_n);
    std::vector<double> y(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) y[i] = sums[i] / row.v_n;
    CompensatedSum s2;
    for (double x : y) s2 += static_cast<long double>(x) * x;
    row.sample_variance = static_cast<double>(s2.value()) / static_cast<double>(y.size());
    row.ks = ks_normal(y, row.target_variance);
    row.cf = cf_distance(y, opts.t_grid, row.target_variance);
    row.ks_threshold = opts.thresholds.ks_threshold(opts.run.replicates);
    row.cf_threshold = opts.thresholds.cf_max;
    row.ks_pass = row.ks < row.ks_threshold;
    row.cf_pass = row.cf < row.cf_threshold;
    rep.rows.push_back(row);

    if (!opts.c_grid.empty()) {
      const double vk = kspec.value(model, n);
      std::vector<double> yk(sums.size());
      for (std::size_t i = 0; i < sums.size(); ++i) yk[i] = sums[i] / vk;
      rep.ui.add_row(n, ui_tail_estimate(yk, opts.c_grid));
    }
    if (opts.schedule != nullptr) {
      const auto q = opts.schedule->q_of(n);
      const auto plan = partition(n, choose_p(n, q), q);
      CertificateOptions co{opts.lindeberg_epsilon, opts.run};
      rep.certificates.push_back(
          q_certificate(sampler, plan, NormalizationSpec(NormalizationMode::k_rect), opts.certificate_t, co));
    }
    rep.n = n;
    rep.normalized_samples = std::move(y);
  }
  return rep;
}

}  // namespace assoc_clt
