#include "core/grad.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace mmt {

std::vector<double> finite_diff_grad(const ScalarFn& f, std::vector<double> p, double step) {
  if (!(step > 0.0)) throw_usage("finite_diff_grad: step must be positive");
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + step;
    const double up = f(p);
    p[i] = saved - step;
    const double down = f(p);
    p[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw_numeric("finite_diff_grad: objective non-finite at coordinate " + std::to_string(i));
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

GradCompare compare_gradients(const std::vector<double>& analytic,
                              const std::vector<double>& numeric) {
  if (analytic.size() != numeric.size())
    throw_usage("compare_gradients: size mismatch, " + std::to_string(analytic.size()) +
                " vs " + std::to_string(numeric.size()));
  double linf = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i)
    linf = std::max({linf, std::abs(analytic[i]), std::abs(numeric[i])});
  const double floor = 1e-3 * std::max(1.0, linf);

  GradCompare cmp;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    const double rel = std::abs(analytic[i] - numeric[i]) / denom;
    if (rel > cmp.max_rel_err) {
      cmp.max_rel_err = rel;
      cmp.worst_index = i;
      cmp.analytic = analytic[i];
      cmp.numeric = numeric[i];
    }
  }
  return cmp;
}

}  // namespace mmt
