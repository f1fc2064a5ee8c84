#include "core/matrix.hpp"

#include <cmath>
#include <sstream>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace mmt {

namespace {

std::string shape_str(const Matrix& m) {
  std::ostringstream os;
  os << m.rows << "x" << m.cols;
  return os.str();
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b))
    throw_usage(std::string(op) + ": shape mismatch, " + shape_str(a) + " vs " + shape_str(b));
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw_usage("matmul: inner dimensions differ, lhs is " + shape_str(a) +
                ", rhs is " + shape_str(b));
  Matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Matrix matmul_trans_a(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows)
    throw_usage("matmul_trans_a: outer dimensions differ, lhs is " + shape_str(a) +
                ", rhs is " + shape_str(b));
  Matrix out(a.cols, b.cols);
  for (std::size_t k = 0; k < a.rows; ++k)
    for (std::size_t i = 0; i < a.cols; ++i) {
      const double aki = a(k, i);
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += aki * b(k, j);
    }
  return out;
}

Matrix matmul_trans_b(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols)
    throw_usage("matmul_trans_b: inner dimensions differ, lhs is " + shape_str(a) +
                ", rhs is " + shape_str(b));
  Matrix out(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.rows; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) acc += a(i, k) * b(j, k);
      out(i, j) = acc;
    }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out(j, i) = m(i, j);
  return out;
}

Matrix row_softmax(const Matrix& m) {
  Matrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double mx = -HUGE_VAL;
    for (std::size_t j = 0; j < m.cols; ++j) mx = std::max(mx, m(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) {
      out(i, j) = std::exp(m(i, j) - mx);
      sum += out(i, j);
    }
    for (std::size_t j = 0; j < m.cols; ++j) out(i, j) /= sum;
  }
  return out;
}

Matrix row_log_softmax(const Matrix& m) {
  Matrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double mx = -HUGE_VAL;
    for (std::size_t j = 0; j < m.cols; ++j) mx = std::max(mx, m(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) sum += std::exp(m(i, j) - mx);
    const double lse = mx + std::log(sum);
    for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(i, j) - lse;
  }
  return out;
}

Matrix row_softmax_backward(const Matrix& s, const Matrix& ds) {
  require_same_shape(s, ds, "row_softmax_backward");
  Matrix out(s.rows, s.cols);
  for (std::size_t i = 0; i < s.rows; ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < s.cols; ++j) dot += s(i, j) * ds(i, j);
    for (std::size_t j = 0; j < s.cols; ++j) out(i, j) = s(i, j) * (ds(i, j) - dot);
  }
  return out;
}

void add_in_place(Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

void add_scaled_in_place(Matrix& a, const Matrix& b, double scale) {
  require_same_shape(a, b, "add_scaled");
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += scale * b.data[i];
}

void scale_in_place(Matrix& a, double s) {
  for (double& v : a.data) v *= s;
}

Matrix add(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  add_in_place(out, b);
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] * b.data[i];
  return out;
}

Matrix col_sums(const Matrix& m) {
  Matrix out(1, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out(0, j) += m(i, j);
  return out;
}

void add_broadcast_row(Matrix& m, const Matrix& row) {
  if (row.rows != 1 || row.cols != m.cols)
    throw_usage("add_broadcast_row: row is " + shape_str(row) + ", target is " + shape_str(m));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) m(i, j) += row(0, j);
}

bool all_finite(const Matrix& m) {
  for (double v : m.data)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix xavier_init(std::size_t rows, std::size_t cols, RngState& rng) {
  if (rows < 1 || cols < 1) throw_usage("xavier_init: dimensions must be >= 1");
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix out(rows, cols);
  for (double& v : out.data) v = rng.uniform(-bound, bound);
  return out;
}

}  // namespace mmt
