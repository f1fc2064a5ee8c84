#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mmt {

class RngState;

// Dense row-major matrix of doubles. The whole library works in 64-bit
// floats; finite-difference gradient checks at 1e-4 steps do not survive
// single precision.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols entries, row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  bool operator==(const Matrix&) const = default;

  static Matrix identity(std::size_t n);
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_trans_a(const Matrix& a, const Matrix& b);  // a^T * b
Matrix matmul_trans_b(const Matrix& a, const Matrix& b);  // a * b^T
Matrix transpose(const Matrix& m);

// Row-wise softmax, stabilized by per-row max subtraction. Total on finite
// input: every output row sums to 1 and entries lie in (0, 1).
Matrix row_softmax(const Matrix& m);
Matrix row_log_softmax(const Matrix& m);

// Given s = row_softmax(z) and an upstream gradient ds, returns the
// gradient with respect to z.
Matrix row_softmax_backward(const Matrix& s, const Matrix& ds);

void add_in_place(Matrix& a, const Matrix& b);
void add_scaled_in_place(Matrix& a, const Matrix& b, double scale);
void scale_in_place(Matrix& a, double s);
Matrix add(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix col_sums(const Matrix& m);                     // 1 x cols
void add_broadcast_row(Matrix& m, const Matrix& row); // row is 1 x cols

bool all_finite(const Matrix& m);

// Uniform Glorot initialization in +-sqrt(6 / (rows + cols)), deterministic
// in the generator state. Entries are drawn in row-major order.
Matrix xavier_init(std::size_t rows, std::size_t cols, RngState& rng);

}  // namespace mmt
