#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mmt {

using ScalarFn = std::function<double(const std::vector<double>&)>;

// Central finite differences: (f(p + h e_i) - f(p - h e_i)) / 2h per
// coordinate. This is the oracle every analytic gradient in the repository
// is checked against.
std::vector<double> finite_diff_grad(const ScalarFn& f, std::vector<double> p, double step);

struct GradCompare {
  double max_rel_err = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Elementwise |a - b| scaled by max(|a_i|, |b_i|, floor) where the floor is
// 1e-3 of the largest gradient magnitude (at least 1e-3). Near-zero
// components therefore compare absolutely instead of blowing up.
GradCompare compare_gradients(const std::vector<double>& analytic,
                              const std::vector<double>& numeric);

}  // namespace mmt
