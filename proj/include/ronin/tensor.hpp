#ifndef RONIN_TENSOR_HPP
#define RONIN_TENSOR_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <vector>

#include "ronin/common.hpp"

namespace ronin {

// Dense row-major 4D tensor (b, c, h, w). Lower-rank data uses size-1 axes,
// e.g. a b x d matrix is stored as (b, d, 1, 1). Kept deliberately small:
// the network code below indexes it directly in tight loops.
template <class T>
class Tensor {
 public:
  Tensor() : dims_{0, 0, 0, 0} {}
  Tensor(int b, int c, int h, int w) : dims_{b, c, h, w} {
    check_arg(b >= 0 && c >= 0 && h >= 0 && w >= 0, "tensor dims must be >= 0");
    data_.assign(static_cast<std::size_t>(b) * c * h * w, T(0));
  }
  static Tensor matrix(int rows, int cols) { return Tensor(rows, cols, 1, 1); }

  int b() const { return dims_[0]; }
  int c() const { return dims_[1]; }
  int h() const { return dims_[2]; }
  int w() const { return dims_[3]; }
  const std::array<int, 4>& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }
  bool same_shape(const Tensor& o) const { return dims_ == o.dims_; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(int bi, int ci, int hi, int wi) { return data_[index(bi, ci, hi, wi)]; }
  const T& at(int bi, int ci, int hi, int wi) const {
    return data_[index(bi, ci, hi, wi)];
  }

  std::size_t index(int bi, int ci, int hi, int wi) const {
    return ((static_cast<std::size_t>(bi) * dims_[1] + ci) * dims_[2] + hi) *
               dims_[3] +
           wi;
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  void zero() { fill(T(0)); }

  bool is_finite() const {
    for (const T& v : data_) {
      if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
  }

  Tensor& operator+=(const Tensor& o) {
    check_arg(same_shape(o), "tensor shape mismatch in +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  template <class U>
  Tensor<U> cast() const {
    Tensor<U> out(dims_[0], dims_[1], dims_[2], dims_[3]);
    for (std::size_t i = 0; i < data_.size(); ++i)
      out[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  std::array<int, 4> dims_;
  std::vector<T> data_;
};

}  // namespace ronin

#endif  // RONIN_TENSOR_HPP
