#include "core/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "core/error.hpp"

namespace mmt {

void LossWeights::validate() const {
  if (!(alpha >= 0.0)) throw_usage("loss weights: alpha must be >= 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw_usage("loss weights: lambda must lie in [0, 1]");
}

LossBreakdown total_loss(double asr_ctc, double asr_attention, double cd, double mlm,
                         double gctc, const LossWeights& w, bool cd_enabled) {
  w.validate();
  const struct {
    const char* name;
    double value;
  } comps[] = {{"asr_ctc", asr_ctc}, {"asr_attention", asr_attention}, {"cd", cd},
               {"mlm", mlm},         {"gctc", gctc}};
  for (const auto& c : comps)
    if (!std::isfinite(c.value))
      throw_numeric(std::string("total_loss: non-finite component '") + c.name + "'");
  LossBreakdown b;
  b.asr_ctc = asr_ctc;
  b.asr_attention = asr_attention;
  b.cd = cd;
  b.mlm = mlm;
  b.gctc = gctc;
  b.total = w.lambda * asr_ctc + (1.0 - w.lambda) * asr_attention +
            w.alpha * ((cd_enabled ? cd : 0.0) + mlm + gctc);
  return b;
}

double cosine_distance_loss(const Matrix& y_aligned, const Matrix& x, CosineGrads* grads) {
  if (!y_aligned.same_shape(x))
    throw_usage("cosine_distance_loss: shapes differ, " + std::to_string(y_aligned.rows) + "x" +
                std::to_string(y_aligned.cols) + " vs " + std::to_string(x.rows) + "x" +
                std::to_string(x.cols));
  if (y_aligned.rows == 0) throw_data("cosine_distance_loss: empty input");
  const std::size_t n = y_aligned.rows;
  const std::size_t d = y_aligned.cols;
  if (grads) {
    grads->y_aligned = Matrix(n, d);
    grads->x = Matrix(n, d);
  }
  double loss = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double uu = 0.0, vv = 0.0, uv = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double u = y_aligned(t, j), v = x(t, j);
      uu += u * u;
      vv += v * v;
      uv += u * v;
    }
    const double nu = std::sqrt(uu), nv = std::sqrt(vv);
    if (nu == 0.0)
      throw_numeric("cosine_distance_loss: zero-norm row " + std::to_string(t) + " in y_aligned");
    if (nv == 0.0)
      throw_numeric("cosine_distance_loss: zero-norm row " + std::to_string(t) + " in x");
    const double c = uv / (nu * nv);
    loss += 1.0 - c;
    if (grads) {
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t j = 0; j < d; ++j) {
        const double u = y_aligned(t, j), v = x(t, j);
        grads->y_aligned(t, j) = -inv_n * (v / (nu * nv) - c * u / uu);
        grads->x(t, j) = -inv_n * (u / (nu * nv) - c * v / vv);
      }
    }
  }
  return loss / static_cast<double>(n);
}

MaskPlan make_mask_plan(std::size_t len, double rate, RngState& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw_usage("make_mask_plan: rate must lie in [0, 1]");
  MaskPlan plan;
  if (len == 0) return plan;
  std::size_t count = static_cast<std::size_t>(std::llround(rate * static_cast<double>(len)));
  count = std::clamp<std::size_t>(count, 1, len);
  std::vector<std::size_t> idx(len);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(len) - 1));
    std::swap(idx[i], idx[j]);
  }
  plan.positions.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(plan.positions.begin(), plan.positions.end());
  return plan;
}

std::vector<int> apply_mask(const std::vector<int>& graphemes, const MaskPlan& plan) {
  std::vector<int> tokens = graphemes;
  for (std::size_t p : plan.positions) {
    if (p >= tokens.size())
      throw_usage("apply_mask: position " + std::to_string(p) + " beyond sequence length " +
                  std::to_string(tokens.size()));
    tokens[p] = ModelConfig::mask_id;
  }
  return tokens;
}

MlmResult mlm_loss(const Matrix& x_aligned, const std::vector<int>& graphemes,
                   const MaskPlan& plan, const Affine& head) {
  const std::size_t n = x_aligned.rows;
  const std::size_t vocab = head.w.cols;
  if (graphemes.size() != n)
    throw_usage("mlm_loss: grapheme count " + std::to_string(graphemes.size()) +
                " does not match aligned rows " + std::to_string(n));
  if (head.w.rows != x_aligned.cols) throw_usage("mlm_loss: head input dim mismatch");
  if (plan.positions.empty()) {
    if (n > 0) throw_data("mlm_loss: empty mask plan for a nonempty sequence");
    return {};
  }
  MlmResult res;
  res.grad_x_aligned = Matrix(n, x_aligned.cols);
  res.grad_head.w = Matrix(head.w.rows, head.w.cols);
  res.grad_head.b = Matrix(1, head.w.cols);
  const double inv_m = 1.0 / static_cast<double>(plan.positions.size());

  for (std::size_t p : plan.positions) {
    if (p >= n)
      throw_usage("mlm_loss: masked position " + std::to_string(p) + " out of range");
    const int g = graphemes[p];
    if (g < 1 || g > static_cast<int>(vocab))
      throw_data("mlm_loss: grapheme id " + std::to_string(g) + " outside [1, " +
                 std::to_string(vocab) + "]");
    const std::size_t cls = static_cast<std::size_t>(g) - 1;

    Matrix logits(1, vocab);
    for (std::size_t k = 0; k < vocab; ++k) {
      double acc = head.b(0, k);
      for (std::size_t j = 0; j < x_aligned.cols; ++j) acc += x_aligned(p, j) * head.w(j, k);
      logits(0, k) = acc;
    }
    const Matrix logp = row_log_softmax(logits);
    res.loss -= logp(0, cls);

    for (std::size_t k = 0; k < vocab; ++k) {
      const double dlogit = (std::exp(logp(0, k)) - (k == cls ? 1.0 : 0.0)) * inv_m;
      res.grad_head.b(0, k) += dlogit;
      for (std::size_t j = 0; j < x_aligned.cols; ++j) {
        res.grad_head.w(j, k) += x_aligned(p, j) * dlogit;
        res.grad_x_aligned(p, j) += head.w(j, k) * dlogit;
      }
    }
  }
  res.loss *= inv_m;
  return res;
}

bool sampler_pick(RngState& rng, double speech_prob) {
  return rng.next_unit() < speech_prob;
}

const Matrix& sampler(const Matrix& x, const Matrix& y_aligned, RngState& rng,
                      bool* picked_speech, double speech_prob) {
  if (!x.same_shape(y_aligned))
    throw_usage("sampler: inputs must share a shape, got " + std::to_string(x.rows) + "x" +
                std::to_string(x.cols) + " vs " + std::to_string(y_aligned.rows) + "x" +
                std::to_string(y_aligned.cols));
  const bool pick = sampler_pick(rng, speech_prob);
  if (picked_speech) *picked_speech = pick;
  return pick ? x : y_aligned;
}

GctcResult gctc_loss(const Matrix& selected, const std::vector<int>& graphemes,
                     const Affine& head) {
  if (head.w.rows != selected.cols) throw_usage("gctc_loss: head input dim mismatch");
  Matrix logits = matmul(selected, head.w);
  add_broadcast_row(logits, head.b);
  CtcResult ctc = ctc_loss(logits, graphemes);
  GctcResult res;
  res.loss = ctc.loss;
  res.grad_input = matmul_trans_b(ctc.grad_logits, head.w);
  res.grad_head.w = matmul_trans_a(selected, ctc.grad_logits);
  res.grad_head.b = col_sums(ctc.grad_logits);
  return res;
}

}  // namespace mmt
