#pragma once

// Seeded generators of strictly stationary positively associated fields on
// finite boxes. Association holds by construction: independent families,
// moving averages with nonnegative weights of independent noise, and Gaussian
// fields with nonnegative covariance. Each sampler carries its exact
// covariance model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "assoc_clt/covariance.hpp"
#include "assoc_clt/fft.hpp"
#include "assoc_clt/lattice.hpp"
#include "assoc_clt/rng.hpp"
#include "assoc_clt/summation.hpp"

namespace assoc_clt {

/// Raised when a Gaussian field cannot be synthesized for the requested covariance.
class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SamplerKind { iid, moving_average, gaussian, constant };
enum class MarginalLaw { normal, bounded_uniform };

[[nodiscard]] inline const char* to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::iid: return "iid";
    case SamplerKind::moving_average: return "ma";
    case SamplerKind::gaussian: return "gaussian";
    case SamplerKind::constant: return "constant";
  }
  return "?";
}

[[nodiscard]] inline const char* to_string(MarginalLaw l) {
  return l == MarginalLaw::normal ? "normal" : "bounded-uniform";
}

/// One realization on a box; values follow the lexicographic order of enumerate_box.
struct Realization {
  Box box;
  std::vector<double> values;
  StreamId seed;
  std::string sampler_id;

  [[nodiscard]] double at(const MultiIndex& t) const {
    if (!box.contains(t)) throw std::out_of_range("realization has no value at " + to_string(t));
    return values[static_cast<std::size_t>(box.linear_index(t))];
  }
};

using KernelEntry = std::pair<MultiIndex, double>;

class FieldSampler {
 public:
  [[nodiscard]] SamplerKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t dim() const noexcept { return model_->dim(); }
  [[nodiscard]] const CovarianceModel& model() const noexcept { return *model_; }
  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  /// Almost-sure bound on |X_t - mean| for bounded laws.
  [[nodiscard]] std::optional<double> bound() const noexcept { return bound_; }
  /// Torus extents of a Gaussian sampler.
  [[nodiscard]] const std::vector<int>& torus() const noexcept { return torus_; }
  /// Number of slightly negative embedding eigenvalues that were set to 0.
  [[nodiscard]] std::size_t clipped_eigenvalues() const noexcept { return clipped_; }

  /// Largest box side that a Gaussian sampler reproduces exactly along axis k.
  [[nodiscard]] std::int64_t max_side(std::size_t k) const {
    if (kind_ != SamplerKind::gaussian) return std::numeric_limits<std::int64_t>::max();
    return torus_[k] / 2;
  }

  /// Deterministic in (sampler, box, stream).
  [[nodiscard]] Realization sample(const Box& box, StreamId stream) const {
    require_same_dim(box.lower(), MultiIndex::zeros(dim()));
    Realization out{box, {}, stream, id_};
    if (box.empty()) return out;
    out.values.resize(static_cast<std::size_t>(box.cardinality()));
    RandomStream rng(stream);
    switch (kind_) {
      case SamplerKind::iid:
        for (auto& v : out.values) v = mean_ + draw(rng, law_, noise_scale_);
        break;
      case SamplerKind::constant: {
        const double xi = mean_ + noise_scale_ * rng.next_sign();
        std::fill(out.values.begin(), out.values.end(), xi);
        break;
      }
      case SamplerKind::moving_average:
        sample_moving_average(box, rng, out.values);
        break;
      case SamplerKind::gaussian:
        sample_gaussian(box, rng, out.values);
        break;
    }
    return out;
  }

  [[nodiscard]] Realization sample(const Box& box, std::uint64_t seed) const { return sample(box, StreamId{seed, 0, 0}); }

  friend FieldSampler make_iid(std::size_t, double, MarginalLaw);
  friend FieldSampler make_moving_average(std::size_t, std::span<const KernelEntry>, double, MarginalLaw);
  friend FieldSampler make_gaussian(const CovarianceModel&, const MultiIndex&, double);
  friend FieldSampler make_constant_field(std::size_t, double);

 private:
  FieldSampler(SamplerKind kind, CovarianceModel model)
      : kind_(kind), model_(std::make_shared<const CovarianceModel>(std::move(model))) {}

  static double draw(RandomStream& rng, MarginalLaw law, double scale) {
    if (law == MarginalLaw::normal) return scale * rng.next_normal();
    return rng.next_uniform(-scale, scale);
  }

  void sample_moving_average(const Box& box, RandomStream& rng, std::vector<double>& values) const {
    const std::size_t d = dim();
    // X_t = sum_j c_j eps_{t-j}; noise needed on (lower - jmax, upper - jmin]
    std::vector<MultiIndex::value_type> nlo(d), nhi(d);
    for (std::size_t k = 0; k < d; ++k) {
      nlo[k] = box.lower()[k] - kernel_hi_[k];
      nhi[k] = box.upper()[k] - kernel_lo_[k];
    }
    const Box noise_box{MultiIndex(nlo), MultiIndex(nhi)};
    std::vector<double> noise(static_cast<std::size_t>(noise_box.cardinality()));
    for (auto& e : noise) e = draw(rng, law_, noise_scale_);
    // flat offsets of -j inside the noise box
    std::vector<std::int64_t> strides(d, 1);
    for (std::size_t k = d - 1; k > 0; --k) strides[k - 1] = strides[k] * noise_box.side(k);
    std::vector<std::pair<std::int64_t, double>> taps;
    for (const auto& [j, c] : kernel_) {
      std::int64_t off = 0;
      for (std::size_t k = 0; k < d; ++k) off -= j[k] * strides[k];
      taps.emplace_back(off, c);
    }
    std::size_t i = 0;
    for_each_point(box, [&](const MultiIndex& t) {
      const auto base = noise_box.linear_index(t);
      double acc = 0.0;
      for (const auto& [off, c] : taps) acc += c * noise[static_cast<std::size_t>(base + off)];
      values[i++] = mean_ + acc;
    });
  }

  void sample_gaussian(const Box& box, RandomStream& rng, std::vector<double>& values) const {
    const std::size_t d = dim();
    for (std::size_t k = 0; k < d; ++k) {
      if (box.side(k) > max_side(k)) {
        throw std::invalid_argument("gaussian sampler: box side " + std::to_string(box.side(k)) + " on axis " +
                                    std::to_string(k) + " exceeds half the torus (" + std::to_string(torus_[k]) + ")");
      }
    }
    const auto& root = *sqrt_eigen_;
    FftBuffer buf(root.size());
    for (std::size_t i = 0; i < root.size(); ++i) {
      const double re = rng.next_normal();
      const double im = rng.next_normal();
      buf.re(i) = root[i] * re;
      buf.im(i) = root[i] * im;
    }
    plan_->forward(buf);
    std::size_t i = 0;
    for_each_point(box, [&](const MultiIndex& t) {
      std::size_t idx = 0;
      for (std::size_t k = 0; k < d; ++k) {
        idx = idx * static_cast<std::size_t>(torus_[k]) + static_cast<std::size_t>(t[k] - box.lower()[k] - 1);
      }
      values[i++] = mean_ + buf.re(idx);
    });
  }

  SamplerKind kind_;
  std::shared_ptr<const CovarianceModel> model_;
  double mean_ = 0.0;
  std::string id_;
  MarginalLaw law_ = MarginalLaw::normal;
  double noise_scale_ = 1.0;
  std::optional<double> bound_;
  std::vector<KernelEntry> kernel_;
  std::vector<std::int64_t> kernel_lo_, kernel_hi_;
  std::vector<int> torus_;
  std::shared_ptr<const std::vector<double>> sqrt_eigen_;
  std::shared_ptr<const FftPlan> plan_;
  std::size_t clipped_ = 0;
};

namespace detail {
inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Scale s with Var = variance: s = sd for normal, half-width sqrt(3 var) for uniform.
inline double law_scale(MarginalLaw law, double variance) {
  return law == MarginalLaw::normal ? std::sqrt(variance) : std::sqrt(3.0 * variance);
}
}  // namespace detail

/// Independent identically distributed field with R(m) = variance * 1{m = 0}, mean 0.
[[nodiscard]] inline FieldSampler make_iid(std::size_t d, double variance, MarginalLaw law = MarginalLaw::normal) {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw std::invalid_argument("make_iid: variance must be > 0");
  FieldSampler s(SamplerKind::iid, CovarianceModel::iid(d, variance));
  s.law_ = law;
  s.noise_scale_ = detail::law_scale(law, variance);
  if (law == MarginalLaw::bounded_uniform) s.bound_ = s.noise_scale_;
  s.id_ = "iid(d=" + std::to_string(d) + "," + to_string(law) + ",var=" + detail::format_double(variance) + ")";
  return s;
}

/// X_t = sum_j c_j eps_{t-j} with c_j >= 0 of finite support and iid noise.
/// The attached covariance R(m) = noise_variance * sum_j c_j c_{j+m} is exact for the given kernel.
[[nodiscard]] inline FieldSampler make_moving_average(std::size_t d, std::span<const KernelEntry> kernel,
                                                      double noise_variance,
                                                      MarginalLaw law = MarginalLaw::normal) {
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw std::invalid_argument("make_moving_average: noise variance must be > 0");
  }
  std::map<MultiIndex, double> coeffs;
  for (const auto& [j, c] : kernel) {
    if (j.dim() != d) throw std::invalid_argument("make_moving_average: kernel offset " + to_string(j) + " has wrong dimension");
    if (!std::isfinite(c)) throw std::invalid_argument("make_moving_average: non-finite kernel entry");
    if (c < 0.0) throw std::domain_error("make_moving_average: negative kernel entry at " + to_string(j));
    if (c > 0.0) coeffs[j] += c;
  }
  if (coeffs.empty()) throw std::invalid_argument("make_moving_average: kernel is identically zero");

  std::map<MultiIndex, long double> autocorr;
  for (const auto& [i, ci] : coeffs) {
    for (const auto& [j, cj] : coeffs) autocorr[j - i] += static_cast<long double>(ci) * cj;
  }
  std::vector<CovarianceModel::Entry> entries;
  for (const auto& [m, v] : autocorr) entries.emplace_back(m, static_cast<double>(noise_variance * v));
  FieldSampler s(SamplerKind::moving_average, CovarianceModel::finite(d, entries));
  s.law_ = law;
  s.noise_scale_ = detail::law_scale(law, noise_variance);
  s.kernel_.assign(coeffs.begin(), coeffs.end());
  s.kernel_lo_.assign(d, std::numeric_limits<std::int64_t>::max());
  s.kernel_hi_.assign(d, std::numeric_limits<std::int64_t>::min());
  double csum = 0.0;
  for (const auto& [j, c] : s.kernel_) {
    csum += c;
    for (std::size_t k = 0; k < d; ++k) {
      s.kernel_lo_[k] = std::min(s.kernel_lo_[k], j[k]);
      s.kernel_hi_[k] = std::max(s.kernel_hi_[k], j[k]);
    }
  }
  if (law == MarginalLaw::bounded_uniform) s.bound_ = s.noise_scale_ * csum;
  s.id_ = "ma(d=" + std::to_string(d) + ",taps=" + std::to_string(s.kernel_.size()) + "," + to_string(law) +
          ",noise_var=" + detail::format_double(noise_variance) + ")";
  return s;
}

[[nodiscard]] inline FieldSampler make_moving_average(std::size_t d, std::initializer_list<KernelEntry> kernel,
                                                      double noise_variance,
                                                      MarginalLaw law = MarginalLaw::normal) {
  return make_moving_average(d, std::span<const KernelEntry>(kernel.begin(), kernel.size()), noise_variance, law);
}

/// Stationary Gaussian field by circulant embedding on a torus.
///
/// Boxes with side at most torus/2 along every axis are reproduced exactly.
/// Throws SynthesisError when the embedding has an eigenvalue below
/// -1e-9 * max; smaller negative eigenvalues are set to 0 with a warning.
[[nodiscard]] inline FieldSampler make_gaussian(const CovarianceModel& model, const MultiIndex& torus_size,
                                                double mean = 0.0) {
  const std::size_t d = model.dim();
  require_same_dim(torus_size, MultiIndex::zeros(d));
  std::vector<int> dims(d);
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (torus_size[k] < 2 || torus_size[k] > (1 << 26)) {
      throw std::invalid_argument("make_gaussian: torus extent must lie in [2, 2^26]");
    }
    dims[k] = static_cast<int>(torus_size[k]);
    total *= static_cast<std::size_t>(dims[k]);
  }
  if (total > (std::size_t{1} << 28)) throw std::invalid_argument("make_gaussian: torus too large");

  FieldSampler s(SamplerKind::gaussian, model);
  s.mean_ = mean;
  s.torus_ = dims;
  auto plan = std::make_shared<const FftPlan>(dims);

  // first row of the block-circulant covariance, symmetrized
  FftBuffer row(total);
  const Box torus_box(MultiIndex::filled(d, -1), torus_size - MultiIndex::ones(d));
  std::size_t i = 0;
  for_each_point(torus_box, [&](const MultiIndex& k) {
    std::vector<MultiIndex::value_type> w(d), wneg(d);
    for (std::size_t a = 0; a < d; ++a) {
      const auto M = torus_size[a];
      w[a] = k[a] <= M / 2 ? k[a] : k[a] - M;
      const auto kn = (M - k[a]) % M;
      wneg[a] = kn <= M / 2 ? kn : kn - M;
    }
    row.re(i) = 0.5 * (model(MultiIndex(std::move(w))) + model(MultiIndex(std::move(wneg))));
    row.im(i) = 0.0;
    ++i;
  });
  plan->forward(row);

  double max_eig = 0.0, min_eig = 0.0;
  for (std::size_t j = 0; j < total; ++j) {
    max_eig = std::max(max_eig, row.re(j));
    min_eig = std::min(min_eig, row.re(j));
  }
  if (min_eig < -1e-9 * max_eig) {
    throw SynthesisError("not embeddable at this torus size; increase torus (min eigenvalue " +
                         detail::format_double(min_eig) + ", max " + detail::format_double(max_eig) + ")");
  }
  auto root = std::make_shared<std::vector<double>>(total);
  const auto norm = static_cast<double>(total);
  for (std::size_t j = 0; j < total; ++j) {
    double lam = row.re(j);
    if (lam < 0.0) {
      ++s.clipped_;
      lam = 0.0;
    }
    (*root)[j] = std::sqrt(lam / norm);
  }
  if (s.clipped_ > 0) {
    std::clog << "warning: make_gaussian clipped " << s.clipped_ << " slightly negative eigenvalue(s) to 0\n";
  }
  s.sqrt_eigen_ = std::move(root);
  s.plan_ = std::move(plan);
  std::string torus = "(";
  for (std::size_t k = 0; k < d; ++k) torus += (k ? "," : "") + std::to_string(dims[k]);
  s.id_ = "gaussian(d=" + std::to_string(d) + ",torus=" + torus + "))";
  return s;
}

/// Test double outside the generator set: X_t = xi for all t, xi = +-sqrt(variance)
/// with probability 1/2 each. The attached covariance is the constant R = variance.
[[nodiscard]] inline FieldSampler make_constant_field(std::size_t d, double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw std::invalid_argument("make_constant_field: variance must be > 0");
  FieldSampler s(SamplerKind::constant, CovarianceModel::radial_power(d, 0.0, variance));
  s.noise_scale_ = std::sqrt(variance);
  s.bound_ = s.noise_scale_;
  s.id_ = "constant(d=" + std::to_string(d) + ",var=" + detail::format_double(variance) + ")";
  return s;
}

/// S(sub) = sum of X_t over sub; sub must lie in the realization box.
[[nodiscard]] inline double partial_sum(const Realization& real, const Box& sub) {
  require_same_dim(sub.lower(), real.box.lower());
  if (sub.empty()) return 0.0;
  if (!real.box.contains(sub)) throw std::invalid_argument("partial_sum: sub-box not contained in realization box");
  CompensatedSum acc;
  for_each_point(sub, [&](const MultiIndex& t) { acc += real.values[static_cast<std::size_t>(real.box.linear_index(t))]; });
  return static_cast<double>(acc.value());
}

[[nodiscard]] inline double total_sum(const Realization& real) {
  CompensatedSum acc;
  for (double v : real.values) acc += v;
  return static_cast<double>(acc.value());
}

/// Bounded, coordinate-wise nondecreasing, Lipschitz test functions R^m -> R:
/// a monotone aggregate (mean, min or max) passed through a monotone saturation.
struct TestFunction {
  enum class Shape { clipped_identity, tanh, smooth_indicator };
  enum class Aggregate { mean, min, max };

  Shape shape = Shape::clipped_identity;
  Aggregate aggregate = Aggregate::mean;
  double level = 1.0;  ///< clip level, or threshold of the smooth indicator
  double scale = 1.0;  ///< width of tanh / logistic transition

  [[nodiscard]] double operator()(std::span<const double> x) const {
    double a = 0.0;
    switch (aggregate) {
      case Aggregate::mean:
        for (double v : x) a += v;
        a /= static_cast<double>(x.size());
        break;
      case Aggregate::min: a = *std::min_element(x.begin(), x.end()); break;
      case Aggregate::max: a = *std::max_element(x.begin(), x.end()); break;
    }
    switch (shape) {
      case Shape::clipped_identity: return std::clamp(a, -level, level);
      case Shape::tanh: return std::tanh(a / scale);
      case Shape::smooth_indicator: return 1.0 / (1.0 + std::exp(-(a - level) / scale));
    }
    return 0.0;
  }
};

struct PaDiagnostic {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t replicates = 0;
  bool consistent = false;  ///< estimate >= -3 * std_error
};

/// Monte Carlo estimate of cov(f(X_s : s in S), g(X_t : t in T)) for disjoint S, T.
[[nodiscard]] inline PaDiagnostic pa_diagnostic(const FieldSampler& sampler, std::span<const MultiIndex> s_set,
                                                std::span<const MultiIndex> t_set, const TestFunction& f,
                                                const TestFunction& g, std::int64_t replicates, std::uint64_t seed) {
  if (s_set.empty() || t_set.empty()) throw std::invalid_argument("pa_diagnostic: index sets must be nonempty");
  if (replicates < 2) throw std::invalid_argument("pa_diagnostic: need at least 2 replicates");
  for (const auto& s : s_set) {
    for (const auto& t : t_set) {
      if (s == t) throw std::invalid_argument("pa_diagnostic: index sets overlap at " + to_string(s));
    }
  }
  const std::size_t d = sampler.dim();
  MultiIndex lo = s_set.front(), hi = s_set.front();
  for (auto set : {s_set, t_set}) {
    for (const auto& p : set) {
      require_same_dim(p, lo);
      lo = meet(lo, p);
      hi = join(hi, p);
    }
  }
  const Box box(lo - MultiIndex::ones(d), hi);
  std::vector<double> fv(static_cast<std::size_t>(replicates)), gv(fv.size());
  std::vector<double> xs(s_set.size()), xt(t_set.size());
  for (std::int64_t r = 0; r < replicates; ++r) {
    const auto real = sampler.sample(box, StreamId{seed, static_cast<std::uint64_t>(r), 0});
    for (std::size_t i = 0; i < s_set.size(); ++i) xs[i] = real.at(s_set[i]);
    for (std::size_t i = 0; i < t_set.size(); ++i) xt[i] = real.at(t_set[i]);
    fv[static_cast<std::size_t>(r)] = f(xs);
    gv[static_cast<std::size_t>(r)] = g(xt);
  }
  const auto n = static_cast<double>(replicates);
  CompensatedSum sf, sg;
  for (std::size_t i = 0; i < fv.size(); ++i) {
    sf += fv[i];
    sg += gv[i];
  }
  const double mf = static_cast<double>(sf.value()) / n, mg = static_cast<double>(sg.value()) / n;
  CompensatedSum sp, sp2;
  for (std::size_t i = 0; i < fv.size(); ++i) {
    const double prod = (fv[i] - mf) * (gv[i] - mg);
    sp += prod;
    sp2 += static_cast<long double>(prod) * prod;
  }
  PaDiagnostic out;
  out.replicates = replicates;
  const double mean_prod = static_cast<double>(sp.value()) / n;
  out.estimate = mean_prod * n / (n - 1.0);
  const double var_prod = std::max(0.0, static_cast<double>(sp2.value()) / n - mean_prod * mean_prod);
  out.std_error = std::sqrt(var_prod / n);
  out.consistent = out.estimate >= -3.0 * out.std_error;
  return out;
}

}  // namespace assoc_clt
