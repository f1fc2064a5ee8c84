#include "core/ctc.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace mmt {

namespace {

constexpr double kLogZero = -HUGE_VAL;

double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

void validate_inputs(const Matrix& logits, const std::vector<int>& target) {
  if (logits.rows < 1) throw_usage("ctc: need at least one frame of logits");
  if (logits.cols < 2) throw_usage("ctc: logits need a blank column plus at least one label");
  if (!all_finite(logits)) throw_numeric("ctc: non-finite logits");
  const int vocab = static_cast<int>(logits.cols) - 1;
  for (int tok : target)
    if (tok < 1 || tok > vocab)
      throw_data("ctc: target token " + std::to_string(tok) + " outside [1, " +
                 std::to_string(vocab) + "]");
}

std::vector<int> collapse_path(const std::vector<int>& path) {
  std::vector<int> out;
  int prev = -1;
  for (int lab : path) {
    if (lab != prev && lab != 0) out.push_back(lab);
    prev = lab;
  }
  return out;
}

}  // namespace

std::size_t ctc_min_frames(const std::vector<int>& target) {
  std::size_t repeats = 0;
  for (std::size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++repeats;
  return target.size() + repeats;
}

CtcResult ctc_loss(const Matrix& logits, const std::vector<int>& target) {
  validate_inputs(logits, target);
  const std::size_t T = logits.rows;
  if (T < ctc_min_frames(target))
    throw_data("ctc: target of length " + std::to_string(target.size()) +
               " needs at least " + std::to_string(ctc_min_frames(target)) +
               " frames, got " + std::to_string(T));

  const std::size_t S = 2 * target.size() + 1;
  std::vector<int> labels(S, 0);
  for (std::size_t i = 0; i < target.size(); ++i) labels[2 * i + 1] = target[i];

  const Matrix lp = row_log_softmax(logits);
  auto emit = [&](std::size_t t, std::size_t s) {
    return lp(t, static_cast<std::size_t>(labels[s]));
  };
  auto skip_allowed = [&](std::size_t s) {
    // the s-2 -> s transition exists only between distinct non-blank labels
    return labels[s] != 0 && s >= 2 && labels[s] != labels[s - 2];
  };

  Matrix alpha(T, S, kLogZero);
  alpha(0, 0) = emit(0, 0);
  if (S > 1) alpha(0, 1) = emit(0, 1);
  for (std::size_t t = 1; t < T; ++t)
    for (std::size_t s = 0; s < S; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = log_add(acc, alpha(t - 1, s - 1));
      if (skip_allowed(s)) acc = log_add(acc, alpha(t - 1, s - 2));
      alpha(t, s) = (acc == kLogZero) ? kLogZero : acc + emit(t, s);
    }

  double log_p = alpha(T - 1, S - 1);
  if (S > 1) log_p = log_add(log_p, alpha(T - 1, S - 2));
  if (log_p == kLogZero)
    throw_data("ctc: target has zero probability (no reachable path)");

  Matrix beta(T, S, kLogZero);
  beta(T - 1, S - 1) = emit(T - 1, S - 1);
  if (S > 1) beta(T - 1, S - 2) = emit(T - 1, S - 2);
  for (std::size_t t = T - 1; t-- > 0;)
    for (std::size_t s = 0; s < S; ++s) {
      double acc = beta(t + 1, s);
      if (s + 1 < S) acc = log_add(acc, beta(t + 1, s + 1));
      if (s + 2 < S && skip_allowed(s + 2)) acc = log_add(acc, beta(t + 1, s + 2));
      beta(t, s) = (acc == kLogZero) ? kLogZero : acc + emit(t, s);
    }

  // grad = softmax - state occupancy, both in the probability domain
  CtcResult res;
  res.loss = -log_p;
  res.grad_logits = Matrix(T, logits.cols);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < logits.cols; ++k) res.grad_logits(t, k) = std::exp(lp(t, k));
    for (std::size_t s = 0; s < S; ++s) {
      if (alpha(t, s) == kLogZero || beta(t, s) == kLogZero) continue;
      const double occupancy = std::exp(alpha(t, s) + beta(t, s) - emit(t, s) - log_p);
      res.grad_logits(t, static_cast<std::size_t>(labels[s])) -= occupancy;
    }
  }
  return res;
}

double ctc_bruteforce(const Matrix& logits, const std::vector<int>& target) {
  validate_inputs(logits, target);
  const std::size_t T = logits.rows;
  const std::size_t symbols = logits.cols;
  double path_count = std::pow(static_cast<double>(symbols), static_cast<double>(T));
  if (path_count > 1e6)
    throw_usage("ctc_bruteforce: instance too large, (V+1)^T = " + std::to_string(path_count));

  const Matrix lp = row_log_softmax(logits);
  std::vector<int> path(T, 0);
  double total = kLogZero;
  while (true) {
    if (collapse_path(path) == target) {
      double lp_path = 0.0;
      for (std::size_t t = 0; t < T; ++t) lp_path += lp(t, static_cast<std::size_t>(path[t]));
      total = log_add(total, lp_path);
    }
    std::size_t pos = 0;
    while (pos < T && path[pos] == static_cast<int>(symbols) - 1) path[pos++] = 0;
    if (pos == T) break;
    ++path[pos];
  }
  if (total == kLogZero)
    throw_data("ctc: target has zero probability (no reachable path)");
  return -total;
}

std::vector<int> ctc_greedy_decode(const Matrix& logits) {
  std::vector<int> best(logits.rows, 0);
  for (std::size_t t = 0; t < logits.rows; ++t) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < logits.cols; ++k)
      if (logits(t, k) > logits(t, arg)) arg = k;
    best[t] = static_cast<int>(arg);
  }
  return collapse_path(best);
}

}  // namespace mmt
