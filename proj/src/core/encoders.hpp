#pragma once

#include <span>
#include <vector>

#include "core/params.hpp"
#include "core/rng.hpp"

namespace mmt {

// Standard sinusoidal positional encoding, len x dim.
Matrix sinusoidal_positions(std::size_t len, std::size_t dim);

// Shared residual tanh stack: per layer h <- h + dropout(tanh(h W + b)).
// The cache keeps what the backward pass needs; dropout is inverted and
// only active when a generator is supplied.
struct StackCache {
  std::vector<Matrix> layer_in;
  std::vector<Matrix> tanh_out;
  std::vector<Matrix> drop_mask;  // empty when dropout is off
};

Matrix stack_forward(const Matrix& input, std::span<const Affine> layers, double dropout,
                     RngState* rng, StackCache* cache);
// Returns the gradient with respect to the stack input and accumulates the
// per-layer parameter gradients.
Matrix stack_backward(const Matrix& grad_out, std::span<const Affine> layers,
                      const StackCache& cache, std::span<Affine> grad_layers);

struct LowerCache {
  Matrix features;
  StackCache stack;
};

// features (n1 x feat_dim) -> X (n1 x d): input projection, positional
// encoding, then the lower residual stack.
Matrix encode_speech_lower(const Matrix& features, const ModelParams& p, bool training,
                           RngState* rng, LowerCache* cache);
void encode_speech_lower_backward(const Matrix& grad_x, const ModelParams& p,
                                  const LowerCache& cache, ModelParams& grads);

struct UpperCache {
  StackCache stack;
};

// X (n x d) -> U (n x d): the upper residual stack, no projection and no
// positional re-addition.
Matrix encode_speech_upper(const Matrix& x, const ModelParams& p, bool training, RngState* rng,
                           UpperCache* cache);
Matrix encode_speech_upper_backward(const Matrix& grad_u, const ModelParams& p,
                                    const UpperCache& cache, ModelParams& grads);

struct TextCache {
  std::vector<int> tokens;
  StackCache stack;
};

// tokens (0 = MASK, 1..vocab graphemes) -> Y (n2 x d): table lookup,
// positional encoding, residual stack.
Matrix encode_text(const std::vector<int>& tokens, const ModelParams& p, bool training,
                   RngState* rng, TextCache* cache);
void encode_text_backward(const Matrix& grad_y, const ModelParams& p, const TextCache& cache,
                          ModelParams& grads);

struct DecoderCache {
  Matrix enc;
  std::vector<int> inputs;   // BOS then the target prefix
  std::vector<int> classes;  // targets then EOS
  Matrix embedded;
  Matrix queries;
  Matrix attn;
  Matrix ctx;
  Matrix hidden;          // tanh output before dropout
  Matrix hidden_dropped;  // what actually feeds the projection
  Matrix drop_mask;
  Matrix probs;
};

// Teacher-forced cross-attention decoder. Position t queries with the
// embedding of the previous token (BOS at t=0), attends over enc by dot
// product, and predicts targets[t] (EOS at the final step). Returns the
// mean cross-entropy.
double decode_teacher_forced(const Matrix& enc, const std::vector<int>& targets,
                             const ModelParams& p, bool training, RngState* rng,
                             DecoderCache* cache, Matrix* logits_out = nullptr);
// Backpropagates `upstream` times the loss gradient; returns the gradient
// with respect to enc.
Matrix decode_teacher_forced_backward(double upstream, const ModelParams& p,
                                      const DecoderCache& cache, ModelParams& grads);

}  // namespace mmt
