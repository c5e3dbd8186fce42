// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include "elaspoof/tensor.hpp"

#include <cstring>
#include <sstream>

#include "elaspoof/errors.hpp"

namespace elaspoof {

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t checked_element_count(const Shape& shape) {
  if (shape.empty()) throw InvalidShapeError("shape must have at least one dimension");
  std::size_t count = 1;
  for (std::size_t d : shape) {
    if (d == 0) throw InvalidShapeError("zero dimension in shape " + shape_to_string(shape));
    if (__builtin_mul_overflow(count, d, &count))
      throw InvalidShapeError("element count overflow for shape " + shape_to_string(shape));
  }
  return count;
}

Tensor Tensor::filled(const Shape& shape, double fill) {
  const std::size_t count = checked_element_count(shape);
  return Tensor(shape, std::vector<double>(count, fill));
}

Tensor Tensor::from_data(const Shape& shape, std::vector<double> data) {
  const std::size_t count = checked_element_count(shape);
  if (data.size() != count)
    throw ShapeMismatchError("data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_to_string(shape));
  return Tensor(shape, std::move(data));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t = zeros({n, n});
  for (std::size_t i = 0; i < n; ++i) t.data_[i * n + i] = 1.0;
  return t;
}

std::size_t Tensor::flat_index(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size())
    throw InvalidArgumentError("index rank " + std::to_string(index.size()) +
                               " does not match tensor rank " + std::to_string(shape_.size()));
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (std::size_t i : index) {
    if (i >= shape_[axis])
      throw InvalidArgumentError("index out of range on axis " + std::to_string(axis));
    flat = flat * shape_[axis] + i;
    ++axis;
  }
  return flat;
}

double& Tensor::at(std::initializer_list<std::size_t> index) { return data_[flat_index(index)]; }

double Tensor::at(std::initializer_list<std::size_t> index) const {
  return data_[flat_index(index)];
}

Tensor Tensor::reshaped(const Shape& new_shape) const {
  const std::size_t count = checked_element_count(new_shape);
  if (count != data_.size())
    throw ShapeMismatchError("cannot reshape " + shape_to_string(shape_) + " (" +
                             std::to_string(data_.size()) + " elements) to " +
                             shape_to_string(new_shape));
  return Tensor(new_shape, data_);
}

void Tensor::fill(double value) {
  for (double& v : data_) v = value;
}

bool Tensor::equals(const Tensor& other) const {
  if (shape_ != other.shape_) return false;
  return std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(double)) == 0;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw ShapeMismatchError("matmul requires rank-2 tensors, got " + shape_to_string(a.shape()) +
                             " and " + shape_to_string(b.shape()));
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k)
    throw ShapeMismatchError("matmul inner dimensions disagree: " + shape_to_string(a.shape()) +
                             " vs " + shape_to_string(b.shape()));
  Tensor c = Tensor::zeros({m, n});
  detail::gemm(a.data(), b.data(), c.data(), m, k, n);
  return c;
}

Tensor zip(const Tensor& a, const Tensor& b, double (*f)(double, double)) {
  if (a.shape() != b.shape())
    throw ShapeMismatchError("zip requires identical shapes, got " + shape_to_string(a.shape()) +
                             " and " + shape_to_string(b.shape()));
  Tensor out = a;
  const double* bp = b.data();
  double* op = out.data();
  const std::size_t count = out.size();
  for (std::size_t i = 0; i < count; ++i) op[i] = f(op[i], bp[i]);
  return out;
}

namespace detail {

// i-k-j order: the inner loop streams a row of b into a row of c, which the
// compiler vectorizes. k ascends for every c[i][j].
void gemm(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
          std::size_t n) {
  std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t i = 0; i < m; ++i) {
    double* cr = c + i * n;
    const double* ar = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ar[p];
      const double* br = b + p * n;
      for (std::size_t j = 0; j < n; ++j) cr[j] += av * br[j];
    }
  }
}

void gemm_tn_acc(const double* a, const double* b, double* c, std::size_t k, std::size_t m,
                 std::size_t n) {
  // c[i][j] += sum_p a[p][i] * b[p][j]; p ascends in the middle loop.
  for (std::size_t i = 0; i < m; ++i) {
    double* cr = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[p * m + i];
      const double* br = b + p * n;
      for (std::size_t j = 0; j < n; ++j) cr[j] += av * br[j];
    }
  }
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  // c[i][j] = dot(a row i, b row j); the dot runs over k in order.
  for (std::size_t i = 0; i < m; ++i) {
    const double* ar = a + i * k;
    double* cr = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* br = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += ar[p] * br[p];
      cr[j] = acc;
    }
  }
}

}  // namespace detail

}  // namespace elaspoof
