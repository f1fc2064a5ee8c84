#pragma once

#include <vector>

#include "core/matrix.hpp"

namespace mmt {

// Target token ids run 1..V; id 0 is the reserved blank. Logits are
// T x (V+1) with column 0 = blank.

// Minimum frame count that can emit `target`: its length plus one
// separating blank per adjacent repeated label.
std::size_t ctc_min_frames(const std::vector<int>& target);

struct CtcResult {
  double loss = 0.0;
  Matrix grad_logits;
};

// -log P(target | softmax(logits)) summed over all collapsing paths, via
// the forward recursion over the blank-interleaved label sequence in log
// space; the gradient comes from the forward-backward occupancies.
// Unreachable targets (T too short) raise a data error rather than
// returning an infinite loss.
CtcResult ctc_loss(const Matrix& logits, const std::vector<int>& target);

// Enumeration oracle: sums the probability of every frame-label path that
// collapses (merge repeats, then drop blanks) to `target`. Only feasible
// while (V+1)^T <= 1e6.
double ctc_bruteforce(const Matrix& logits, const std::vector<int>& target);

// Per-frame argmax, collapse repeats, drop blanks.
std::vector<int> ctc_greedy_decode(const Matrix& logits);

}  // namespace mmt
