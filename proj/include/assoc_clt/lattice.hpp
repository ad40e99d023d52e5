#pragma once

// Multi-indices on Z^d and axis-aligned integer boxes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace assoc_clt {

/// A point of Z^d. Binary operations require equal dimension.
class MultiIndex {
 public:
  using value_type = std::int64_t;

  MultiIndex() = default;
  MultiIndex(std::initializer_list<value_type> coords) : coords_(coords) {}
  explicit MultiIndex(std::vector<value_type> coords) : coords_(std::move(coords)) {}

  static MultiIndex filled(std::size_t d, value_type v) {
    return MultiIndex(std::vector<value_type>(d, v));
  }
  static MultiIndex ones(std::size_t d) { return filled(d, 1); }
  static MultiIndex zeros(std::size_t d) { return filled(d, 0); }
  static MultiIndex unit(std::size_t d, std::size_t k) {
    auto e = zeros(d);
    e.coords_.at(k) = 1;
    return e;
  }

  [[nodiscard]] std::size_t dim() const noexcept { return coords_.size(); }
  [[nodiscard]] value_type operator[](std::size_t k) const { return coords_[k]; }
  [[nodiscard]] value_type& operator[](std::size_t k) { return coords_[k]; }
  [[nodiscard]] std::span<const value_type> coords() const noexcept { return coords_; }

  [[nodiscard]] auto begin() const noexcept { return coords_.begin(); }
  [[nodiscard]] auto end() const noexcept { return coords_.end(); }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<value_type> coords_;
};

inline void require_same_dim(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("multi-index dimension mismatch: " + std::to_string(a.dim()) +
                                " vs " + std::to_string(b.dim()));
  }
}

/// Coordinate-wise order a <= b.
[[nodiscard]] inline bool leq(const MultiIndex& a, const MultiIndex& b) {
  require_same_dim(a, b);
  for (std::size_t k = 0; k < a.dim(); ++k) {
    if (a[k] > b[k]) return false;
  }
  return true;
}

/// Strict order a < b in every coordinate.
[[nodiscard]] inline bool less(const MultiIndex& a, const MultiIndex& b) {
  require_same_dim(a, b);
  for (std::size_t k = 0; k < a.dim(); ++k) {
    if (a[k] >= b[k]) return false;
  }
  return true;
}

namespace detail {
template <class Op>
MultiIndex zip(const MultiIndex& a, const MultiIndex& b, Op op) {
  require_same_dim(a, b);
  std::vector<MultiIndex::value_type> out(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) out[k] = op(a[k], b[k]);
  return MultiIndex(std::move(out));
}
}  // namespace detail

/// Coordinate-wise maximum a ∨ b.
[[nodiscard]] inline MultiIndex join(const MultiIndex& a, const MultiIndex& b) {
  return detail::zip(a, b, [](auto x, auto y) { return std::max(x, y); });
}

[[nodiscard]] inline MultiIndex meet(const MultiIndex& a, const MultiIndex& b) {
  return detail::zip(a, b, [](auto x, auto y) { return std::min(x, y); });
}

[[nodiscard]] inline MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  return detail::zip(a, b, [](auto x, auto y) { return x + y; });
}

[[nodiscard]] inline MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
  return detail::zip(a, b, [](auto x, auto y) { return x - y; });
}

[[nodiscard]] inline MultiIndex operator-(const MultiIndex& a) {
  std::vector<MultiIndex::value_type> out(a.begin(), a.end());
  for (auto& v : out) v = -v;
  return MultiIndex(std::move(out));
}

[[nodiscard]] inline MultiIndex operator*(MultiIndex::value_type s, const MultiIndex& a) {
  std::vector<MultiIndex::value_type> out(a.begin(), a.end());
  for (auto& v : out) v *= s;
  return MultiIndex(std::move(out));
}

/// Integer part [x] of a real vector (floor, coordinate-wise).
[[nodiscard]] inline MultiIndex floor_index(std::span<const double> x) {
  std::vector<MultiIndex::value_type> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!std::isfinite(x[k])) throw std::invalid_argument("floor_index: non-finite coordinate");
    out[k] = static_cast<MultiIndex::value_type>(std::floor(x[k]));
  }
  return MultiIndex(std::move(out));
}

[[nodiscard]] inline std::vector<double> to_real(const MultiIndex& a) {
  return {a.begin(), a.end()};
}

/// <n> = n_1 ... n_d for n >= 1. Throws on overflow or nonpositive coordinates.
[[nodiscard]] inline std::int64_t product(const MultiIndex& n) {
  std::int64_t acc = 1;
  for (auto v : n) {
    if (v <= 0) throw std::invalid_argument("product: nonpositive coordinate " + std::to_string(v));
    if (__builtin_mul_overflow(acc, v, &acc)) throw std::overflow_error("product: int64 overflow");
  }
  return acc;
}

/// Sup-norm |m| = max_k |m_k|.
[[nodiscard]] inline std::int64_t sup_norm(const MultiIndex& m) {
  std::int64_t r = 0;
  for (auto v : m) r = std::max<std::int64_t>(r, v < 0 ? -v : v);
  return r;
}

[[nodiscard]] inline std::int64_t squared_norm(const MultiIndex& m) {
  std::int64_t r = 0;
  for (auto v : m) r += v * v;
  return r;
}

inline std::ostream& operator<<(std::ostream& os, const MultiIndex& m) {
  os << '(';
  for (std::size_t k = 0; k < m.dim(); ++k) os << (k ? "," : "") << m[k];
  return os << ')';
}

inline std::string to_string(const MultiIndex& m) {
  std::string s = "(";
  for (std::size_t k = 0; k < m.dim(); ++k) s += (k ? "," : "") + std::to_string(m[k]);
  return s + ")";
}

/// Integer box {j : lower < j <= upper}. Empty when some upper_k <= lower_k.
class Box {
 public:
  Box(MultiIndex lower, MultiIndex upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    require_same_dim(lower_, upper_);
    if (lower_.dim() == 0) throw std::invalid_argument("Box: dimension must be >= 1");
  }

  /// U_n = {j : 1 <= j <= n}.
  static Box from_extent(const MultiIndex& n) { return Box(MultiIndex::zeros(n.dim()), n); }
  /// C_r = (0, r]^d.
  static Box cube(std::size_t d, std::int64_t r) { return Box(MultiIndex::zeros(d), MultiIndex::filled(d, r)); }

  [[nodiscard]] const MultiIndex& lower() const noexcept { return lower_; }
  [[nodiscard]] const MultiIndex& upper() const noexcept { return upper_; }
  [[nodiscard]] std::size_t dim() const noexcept { return lower_.dim(); }

  [[nodiscard]] bool empty() const noexcept {
    for (std::size_t k = 0; k < dim(); ++k) {
      if (upper_[k] <= lower_[k]) return true;
    }
    return false;
  }

  [[nodiscard]] std::int64_t side(std::size_t k) const noexcept {
    return std::max<std::int64_t>(0, upper_[k] - lower_[k]);
  }

  [[nodiscard]] MultiIndex extent() const {
    std::vector<MultiIndex::value_type> e(dim());
    for (std::size_t k = 0; k < dim(); ++k) e[k] = side(k);
    return MultiIndex(std::move(e));
  }

  [[nodiscard]] std::int64_t cardinality() const {
    if (empty()) return 0;
    return product(extent());
  }

  [[nodiscard]] bool contains(const MultiIndex& j) const {
    require_same_dim(j, lower_);
    for (std::size_t k = 0; k < dim(); ++k) {
      if (j[k] <= lower_[k] || j[k] > upper_[k]) return false;
    }
    return true;
  }

  /// Every empty box is contained in any box of the same dimension.
  [[nodiscard]] bool contains(const Box& other) const {
    require_same_dim(other.lower_, lower_);
    if (other.empty()) return true;
    return leq(lower_, other.lower_) && leq(other.upper_, upper_);
  }

  /// Row-major offset of j in the lexicographic enumeration order.
  [[nodiscard]] std::int64_t linear_index(const MultiIndex& j) const {
    std::int64_t idx = 0;
    for (std::size_t k = 0; k < dim(); ++k) idx = idx * side(k) + (j[k] - lower_[k] - 1);
    return idx;
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  MultiIndex lower_;
  MultiIndex upper_;
};

[[nodiscard]] inline bool disjoint(const Box& a, const Box& b) {
  if (a.empty() || b.empty()) return true;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    if (a.upper()[k] <= b.lower()[k] || b.upper()[k] <= a.lower()[k]) return true;
  }
  return false;
}

/// Visits every point of the box once, lexicographically (last coordinate fastest).
template <class F>
void for_each_point(const Box& box, F&& f) {
  if (box.empty()) return;
  const std::size_t d = box.dim();
  MultiIndex j = box.lower() + MultiIndex::ones(d);
  for (;;) {
    f(static_cast<const MultiIndex&>(j));
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (j[k] < box.upper()[k]) {
        ++j[k];
        break;
      }
      j[k] = box.lower()[k] + 1;
      if (k == 0) return;
    }
  }
}

[[nodiscard]] inline std::vector<MultiIndex> enumerate_box(const Box& box) {
  std::vector<MultiIndex> out;
  if (!box.empty()) out.reserve(static_cast<std::size_t>(box.cardinality()));
  for_each_point(box, [&](const MultiIndex& j) { out.push_back(j); });
  return out;
}

/// Symmetric box [-n, n] written in the half-open convention.
[[nodiscard]] inline Box symmetric_box(const MultiIndex& n) {
  return Box(-n - MultiIndex::ones(n.dim()), n);
}

}  // namespace assoc_clt
