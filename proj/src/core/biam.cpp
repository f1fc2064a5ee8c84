#include "core/biam.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace mmt {

BiamOutput biam_forward(const Matrix& x, const Matrix& y) {
  if (x.cols != y.cols)
    throw_usage("biam_forward: embedding dims differ, x has " + std::to_string(x.cols) +
                ", y has " + std::to_string(y.cols));
  if (x.rows == 0 || y.rows == 0)
    throw_data("biam_forward: empty sequence (softmax over zero entries is undefined)");
  BiamOutput out;
  out.a = matmul_trans_b(x, y);
  out.w12 = row_softmax(out.a);
  out.w21 = row_softmax(transpose(out.a));
  out.x_aligned = matmul(out.w21, x);
  out.y_aligned = matmul(out.w12, y);
  return out;
}

BiamGrads biam_backward(const Matrix& x, const Matrix& y, const BiamOutput& out,
                        const Matrix& grad_x_aligned, const Matrix& grad_y_aligned) {
  if (!grad_x_aligned.same_shape(out.x_aligned) || !grad_y_aligned.same_shape(out.y_aligned))
    throw_usage("biam_backward: upstream gradient shapes do not match the aligned outputs");

  // value paths of Eqs. x_aligned = w21 x and y_aligned = w12 y
  Matrix gx = matmul_trans_a(out.w21, grad_x_aligned);
  Matrix gy = matmul_trans_a(out.w12, grad_y_aligned);

  // attention-weight paths through both softmaxes into the shared scores
  Matrix gw21 = matmul_trans_b(grad_x_aligned, x);
  Matrix gw12 = matmul_trans_b(grad_y_aligned, y);
  Matrix ga = row_softmax_backward(out.w12, gw12);
  add_in_place(ga, transpose(row_softmax_backward(out.w21, gw21)));

  add_in_place(gx, matmul(ga, y));
  add_in_place(gy, matmul_trans_a(ga, x));
  return {std::move(gx), std::move(gy)};
}

double monotonicity_score(const Matrix& w12, double band) {
  if (!(band > 0.0 && band < 1.0)) throw_usage("monotonicity_score: band must lie in (0, 1)");
  if (w12.rows == 0 || w12.cols == 0)
    throw_usage("monotonicity_score: empty alignment matrix");
  const double n1 = static_cast<double>(w12.rows);
  const double n2 = static_cast<double>(w12.cols);
  double acc = 0.0;
  for (std::size_t i = 0; i < w12.rows; ++i)
    for (std::size_t j = 0; j < w12.cols; ++j) {
      // cell centers as relative positions; an edge convention would deny
      // short sequences any in-band column at all
      const double pos_i = (static_cast<double>(i) + 0.5) / n1;
      const double pos_j = (static_cast<double>(j) + 0.5) / n2;
      if (std::abs(pos_j - pos_i) <= band) acc += w12(i, j);
    }
  return acc / n1;
}

}  // namespace mmt
