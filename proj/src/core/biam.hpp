#pragma once

#include "core/matrix.hpp"

namespace mmt {

// Bidirectional attention between a speech sequence x (n1 x d) and a text
// sequence y (n2 x d). One shared score matrix, row-softmaxed both ways,
// resamples each sequence into the other one's length. There are no
// key/value projections: the embeddings themselves are the compatibility
// inputs.
struct BiamOutput {
  Matrix a;          // n1 x n2 shared scores, x . y^T
  Matrix w12;        // n1 x n2, each speech frame as a distribution over graphemes
  Matrix w21;        // n2 x n1, each grapheme as a distribution over frames
  Matrix x_aligned;  // n2 x d = w21 . x
  Matrix y_aligned;  // n1 x d = w12 . y
};

BiamOutput biam_forward(const Matrix& x, const Matrix& y);

struct BiamGrads {
  Matrix x;  // n1 x d
  Matrix y;  // n2 x d
};

// Exact reverse-mode gradients of (x_aligned, y_aligned) with respect to
// both inputs. Each input receives gradient twice: as the value matrix of
// one transform and as a logits source of the shared score matrix.
BiamGrads biam_backward(const Matrix& x, const Matrix& y, const BiamOutput& out,
                        const Matrix& grad_x_aligned, const Matrix& grad_y_aligned);

// Mean attention mass inside the relative diagonal band
// |j/n2 - i/n1| <= band, in [0, 1]. Quantifies how monotone an alignment
// matrix is: 1.0 for a diagonal permutation, about 2*band for uniform rows.
double monotonicity_score(const Matrix& w12, double band);

}  // namespace mmt
