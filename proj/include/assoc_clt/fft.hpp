#pragma once

// Thin RAII layer over FFTW's complex multi-dimensional transform.
//
// The planner is not thread-safe, so plan creation and destruction go through
// one mutex. Execution uses fftw_execute_dft on caller buffers allocated with
// fftw_malloc (same alignment as the planning buffer), which is thread-safe.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <new>
#include <span>
#include <stdexcept>
#include <vector>

namespace assoc_clt {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
}  // namespace detail

/// fftw_malloc'd complex buffer.
class FftBuffer {
 public:
  explicit FftBuffer(std::size_t n) : size_(n), data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data_) throw std::bad_alloc();
  }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] fftw_complex* data() noexcept { return data_.get(); }
  [[nodiscard]] const fftw_complex* data() const noexcept { return data_.get(); }
  double& re(std::size_t i) noexcept { return data_.get()[i][0]; }
  double& im(std::size_t i) noexcept { return data_.get()[i][1]; }
  [[nodiscard]] double re(std::size_t i) const noexcept { return data_.get()[i][0]; }
  [[nodiscard]] double im(std::size_t i) const noexcept { return data_.get()[i][1]; }

 private:
  std::size_t size_;
  std::unique_ptr<fftw_complex, detail::FftwFree> data_;
};

/// Unnormalized forward DFT on a row-major d-dimensional grid.
class FftPlan {
 public:
  explicit FftPlan(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("FftPlan: empty shape");
    size_ = 1;
    for (int v : dims_) {
      if (v <= 0) throw std::invalid_argument("FftPlan: nonpositive extent");
      size_ *= static_cast<std::size_t>(v);
    }
    FftBuffer scratch(size_);
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_plan p = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), scratch.data(), scratch.data(),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    if (!p) throw std::runtime_error("FftPlan: FFTW planning failed");
    plan_ = std::shared_ptr<fftw_plan_s>(p, [](fftw_plan q) {
      std::lock_guard inner(detail::fftw_planner_mutex());
      fftw_destroy_plan(q);
    });
  }

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] const std::vector<int>& dims() const noexcept { return dims_; }

  /// In-place forward transform.
  void forward(FftBuffer& buf) const {
    if (buf.size() != size_) throw std::invalid_argument("FftPlan: buffer size mismatch");
    fftw_execute_dft(plan_.get(), buf.data(), buf.data());
  }

 private:
  std::vector<int> dims_;
  std::size_t size_ = 0;
  std::shared_ptr<fftw_plan_s> plan_;
};

}  // namespace assoc_clt
