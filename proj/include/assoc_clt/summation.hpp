#pragma once

#include <cmath>

namespace assoc_clt {

/// Neumaier-compensated accumulator in extended precision.
class CompensatedSum {
 public:
  void add(long double x) noexcept {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(long double x) noexcept {
    add(x);
    return *this;
  }

  [[nodiscard]] long double value() const noexcept { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

}  // namespace assoc_clt
