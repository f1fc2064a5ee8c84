#pragma once

#include <vector>

#include "core/ctc.hpp"
#include "core/matrix.hpp"
#include "core/params.hpp"
#include "core/rng.hpp"

namespace mmt {

struct LossWeights {
  double alpha = 0.1;   // weight of the alignment losses
  double lambda = 0.3;  // CTC share inside the ASR mixture
  void validate() const;
};

struct LossBreakdown {
  double asr_ctc = 0.0;
  double asr_attention = 0.0;
  double cd = 0.0;
  double mlm = 0.0;
  double gctc = 0.0;
  double total = 0.0;
};

// total = lambda*asr_ctc + (1-lambda)*asr_attention
//       + alpha*(cd*cd_enabled + mlm + gctc).
// Non-finite components are an error naming the component.
LossBreakdown total_loss(double asr_ctc, double asr_attention, double cd, double mlm,
                         double gctc, const LossWeights& w, bool cd_enabled);

struct CosineGrads {
  Matrix y_aligned;
  Matrix x;
};

// Mean over rows of (1 - cos(y_aligned_t, x_t)), in [0, 2]. Zero-norm rows
// are an error identifying the row.
double cosine_distance_loss(const Matrix& y_aligned, const Matrix& x, CosineGrads* grads);

struct MaskPlan {
  std::vector<std::size_t> positions;  // unique, sorted
};

// Draws round(rate * len) unique positions, at least one for a nonempty
// sequence.
MaskPlan make_mask_plan(std::size_t len, double rate, RngState& rng);

// Replaces the planned positions with the MASK token (id 0) before the
// text encoder sees the sequence.
std::vector<int> apply_mask(const std::vector<int>& graphemes, const MaskPlan& plan);

struct MlmResult {
  double loss = 0.0;
  Matrix grad_x_aligned;
  Affine grad_head;
};

// Cross-entropy of head(x_aligned[p]) against grapheme[p], averaged over
// the masked positions only.
MlmResult mlm_loss(const Matrix& x_aligned, const std::vector<int>& graphemes,
                   const MaskPlan& plan, const Affine& head);

// The sampler's coin; the training loop draws it ahead of the forward pass
// so each step stays a pure function of its context.
bool sampler_pick(RngState& rng, double speech_prob);

// Per-utterance fair coin between the speech embeddings and the aligned
// text embeddings; returns the chosen matrix whole and records the choice.
const Matrix& sampler(const Matrix& x, const Matrix& y_aligned, RngState& rng,
                      bool* picked_speech, double speech_prob = 0.5);

struct GctcResult {
  double loss = 0.0;
  Matrix grad_input;
  Affine grad_head;
};

// ctc_loss(head(selected), graphemes) with gradients flowing into both the
// selected embeddings and the head.
GctcResult gctc_loss(const Matrix& selected, const std::vector<int>& graphemes,
                     const Affine& head);

}  // namespace mmt
