// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace elaspoof {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);

/// Dense n-dimensional array of doubles with explicit shape, flat row-major
/// storage. The invariant data().size() == product(shape()) holds after every
/// public operation. There is no broadcasting: all shape mismatches are
/// errors, and callers insert explicit expansion where they need it.
///
/// Tensors are plain values: copy/move behave like std::vector, and nothing
/// mutates through a const reference, so read-only sharing across threads is
/// safe.
class Tensor {
 public:
  /// Empty placeholder (rank 0, no elements). Real tensors come from the
  /// factories below, which reject empty shapes and zero dimensions.
  Tensor() = default;

  /// Tensor of `shape` with every element set to `fill`.
  static Tensor filled(const Shape& shape, double fill);

  static Tensor zeros(const Shape& shape) { return filled(shape, 0.0); }

  /// Adopts `data` as the flat row-major contents; data.size() must equal
  /// product(shape).
  static Tensor from_data(const Shape& shape, std::vector<double> data);

  /// Square identity matrix of side n.
  static Tensor identity(std::size_t n);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  /// Multi-index access with bounds checking (tests and cold paths).
  double& at(std::initializer_list<std::size_t> index);
  double at(std::initializer_list<std::size_t> index) const;

  /// Same flat data under a new shape; product(new_shape) must match size().
  /// Element order is preserved.
  Tensor reshaped(const Shape& new_shape) const;

  void fill(double value);

  /// True when shapes and every element are bitwise equal.
  bool equals(const Tensor& other) const;

 private:
  Tensor(Shape shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {}

  std::size_t flat_index(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<double> data_;
};

/// Validated product of shape entries; throws InvalidShapeError on an empty
/// shape, a zero dimension, or overflow.
std::size_t checked_element_count(const Shape& shape);

/// Standard matrix product of rank-2 tensors [m,k] x [k,n] -> [m,n].
/// Per output element the k-summation runs in ascending order, so results are
/// independent of any outer scheduling.
Tensor matmul(const Tensor& a, const Tensor& b);

/// Element-wise application of f; shape preserved.
template <typename F>
Tensor map(const Tensor& t, F&& f) {
  Tensor out = t;
  for (double& v : out.values()) v = f(v);
  return out;
}

/// Element-wise combination of identically shaped tensors.
Tensor zip(const Tensor& a, const Tensor& b, double (*f)(double, double));

namespace detail {

// Raw GEMM kernels used by the layers. All of them fix the reduction order
// per output element (ascending k), which keeps full-network training
// bit-deterministic.

// c[m,n] = a[m,k] * b[k,n] (c preallocated, overwritten)
void gemm(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
          std::size_t n);

// c[m,n] += a[k,m]^T * b[k,n]
void gemm_tn_acc(const double* a, const double* b, double* c, std::size_t k, std::size_t m,
                 std::size_t n);

// c[m,n] = a[m,k] * b[n,k]^T
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n);

}  // namespace detail

}  // namespace elaspoof
