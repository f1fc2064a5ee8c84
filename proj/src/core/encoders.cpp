#include "core/encoders.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace mmt {

Matrix sinusoidal_positions(std::size_t len, std::size_t dim) {
  Matrix pe(len, dim);
  for (std::size_t t = 0; t < len; ++t)
    for (std::size_t j = 0; j < dim; ++j) {
      const double exponent = static_cast<double>(2 * (j / 2)) / static_cast<double>(dim);
      const double angle = static_cast<double>(t) / std::pow(10000.0, exponent);
      pe(t, j) = (j % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  return pe;
}

namespace {

Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate, RngState& rng) {
  Matrix mask(rows, cols);
  const double keep = 1.0 - rate;
  for (double& v : mask.data) v = (rng.next_unit() < rate) ? 0.0 : 1.0 / keep;
  return mask;
}

Matrix tanh_elem(const Matrix& m) {
  Matrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) out.data[i] = std::tanh(m.data[i]);
  return out;
}

}  // namespace

Matrix stack_forward(const Matrix& input, std::span<const Affine> layers, double dropout,
                     RngState* rng, StackCache* cache) {
  const bool use_dropout = dropout > 0.0 && rng != nullptr;
  Matrix h = input;
  for (const Affine& layer : layers) {
    Matrix z = matmul(h, layer.w);
    add_broadcast_row(z, layer.b);
    Matrix t = tanh_elem(z);
    Matrix branch = t;
    Matrix mask;
    if (use_dropout) {
      mask = dropout_mask(t.rows, t.cols, dropout, *rng);
      branch = hadamard(t, mask);
    }
    if (cache) {
      cache->layer_in.push_back(h);
      cache->tanh_out.push_back(std::move(t));
      if (use_dropout) cache->drop_mask.push_back(std::move(mask));
    }
    add_in_place(h, branch);
  }
  return h;
}

Matrix stack_backward(const Matrix& grad_out, std::span<const Affine> layers,
                      const StackCache& cache, std::span<Affine> grad_layers) {
  if (cache.layer_in.size() != layers.size())
    throw_usage("stack_backward: cache depth does not match layer count");
  Matrix g = grad_out;
  for (std::size_t i = layers.size(); i-- > 0;) {
    Matrix gb = g;
    if (!cache.drop_mask.empty()) gb = hadamard(gb, cache.drop_mask[i]);
    const Matrix& t = cache.tanh_out[i];
    Matrix gz(t.rows, t.cols);
    for (std::size_t k = 0; k < t.data.size(); ++k)
      gz.data[k] = gb.data[k] * (1.0 - t.data[k] * t.data[k]);
    add_in_place(grad_layers[i].w, matmul_trans_a(cache.layer_in[i], gz));
    add_in_place(grad_layers[i].b, col_sums(gz));
    add_in_place(g, matmul_trans_b(gz, layers[i].w));  // residual path keeps g
  }
  return g;
}

Matrix encode_speech_lower(const Matrix& features, const ModelParams& p, bool training,
                           RngState* rng, LowerCache* cache) {
  if (features.cols != p.cfg.feat_dim)
    throw_usage("encode_speech_lower: feature dim " + std::to_string(features.cols) +
                " does not match input projection " + std::to_string(p.cfg.feat_dim));
  Matrix h = matmul(features, p.speech_in.w);
  add_broadcast_row(h, p.speech_in.b);
  if (p.cfg.positional_speech) add_in_place(h, sinusoidal_positions(h.rows, h.cols));
  if (cache) cache->features = features;
  const double rate = training ? p.cfg.dropout : 0.0;
  return stack_forward(h, p.lower, rate, training ? rng : nullptr,
                       cache ? &cache->stack : nullptr);
}

void encode_speech_lower_backward(const Matrix& grad_x, const ModelParams& p,
                                  const LowerCache& cache, ModelParams& grads) {
  Matrix gh = stack_backward(grad_x, p.lower, cache.stack, grads.lower);
  add_in_place(grads.speech_in.w, matmul_trans_a(cache.features, gh));
  add_in_place(grads.speech_in.b, col_sums(gh));
}

Matrix encode_speech_upper(const Matrix& x, const ModelParams& p, bool training, RngState* rng,
                           UpperCache* cache) {
  if (x.cols != p.cfg.dim)
    throw_usage("encode_speech_upper: input dim " + std::to_string(x.cols) +
                " does not match model dim " + std::to_string(p.cfg.dim));
  const double rate = training ? p.cfg.dropout : 0.0;
  return stack_forward(x, p.upper, rate, training ? rng : nullptr,
                       cache ? &cache->stack : nullptr);
}

Matrix encode_speech_upper_backward(const Matrix& grad_u, const ModelParams& p,
                                    const UpperCache& cache, ModelParams& grads) {
  return stack_backward(grad_u, p.upper, cache.stack, grads.upper);
}

Matrix encode_text(const std::vector<int>& tokens, const ModelParams& p, bool training,
                   RngState* rng, TextCache* cache) {
  Matrix h(tokens.size(), p.cfg.dim);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const int tok = tokens[i];
    if (tok < 0 || tok > static_cast<int>(p.cfg.vocab))
      throw_data("encode_text: token id " + std::to_string(tok) + " at position " +
                 std::to_string(i) + " outside vocabulary [0, " + std::to_string(p.cfg.vocab) +
                 "]");
    for (std::size_t j = 0; j < p.cfg.dim; ++j)
      h(i, j) = p.text_embed(static_cast<std::size_t>(tok), j);
  }
  if (p.cfg.positional_text && h.rows > 0) add_in_place(h, sinusoidal_positions(h.rows, h.cols));
  if (cache) cache->tokens = tokens;
  const double rate = training ? p.cfg.dropout : 0.0;
  return stack_forward(h, p.text, rate, training ? rng : nullptr,
                       cache ? &cache->stack : nullptr);
}

void encode_text_backward(const Matrix& grad_y, const ModelParams& p, const TextCache& cache,
                          ModelParams& grads) {
  Matrix gh = stack_backward(grad_y, p.text, cache.stack, grads.text);
  for (std::size_t i = 0; i < cache.tokens.size(); ++i) {
    const auto row = static_cast<std::size_t>(cache.tokens[i]);
    for (std::size_t j = 0; j < gh.cols; ++j) grads.text_embed(row, j) += gh(i, j);
  }
}

double decode_teacher_forced(const Matrix& enc, const std::vector<int>& targets,
                             const ModelParams& p, bool training, RngState* rng,
                             DecoderCache* cache, Matrix* logits_out) {
  if (enc.rows == 0) throw_data("decode_teacher_forced: empty encoder output");
  if (targets.empty()) throw_data("decode_teacher_forced: empty target sequence");
  if (enc.cols != p.cfg.dim)
    throw_usage("decode_teacher_forced: encoder dim " + std::to_string(enc.cols) +
                " does not match model dim " + std::to_string(p.cfg.dim));
  const std::size_t steps = targets.size() + 1;
  const std::size_t d = p.cfg.dim;

  std::vector<int> inputs(steps), classes(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    inputs[s] = (s == 0) ? p.cfg.bos_id() : targets[s - 1];
    classes[s] = (s < targets.size()) ? targets[s] : static_cast<int>(ModelConfig::eos_class);
  }
  for (int t : targets)
    if (t < 1 || t > static_cast<int>(p.cfg.vocab))
      throw_data("decode_teacher_forced: target id " + std::to_string(t) +
                 " outside vocabulary [1, " + std::to_string(p.cfg.vocab) + "]");

  Matrix embedded(steps, d);
  for (std::size_t s = 0; s < steps; ++s)
    for (std::size_t j = 0; j < d; ++j)
      embedded(s, j) = p.dec_embed(static_cast<std::size_t>(inputs[s]), j);

  Matrix queries = matmul(embedded, p.dec_query.w);
  add_broadcast_row(queries, p.dec_query.b);
  Matrix attn = row_softmax(matmul_trans_b(queries, enc));
  Matrix ctx = matmul(attn, enc);
  Matrix pre = matmul(ctx, p.dec_ctx.w);
  add_broadcast_row(pre, p.dec_ctx.b);
  Matrix hidden(pre.rows, pre.cols);
  for (std::size_t i = 0; i < pre.data.size(); ++i) hidden.data[i] = std::tanh(pre.data[i]);

  Matrix mask;
  Matrix hidden_dropped = hidden;
  if (training && p.cfg.dropout > 0.0 && rng) {
    const double keep = 1.0 - p.cfg.dropout;
    mask = Matrix(hidden.rows, hidden.cols);
    for (std::size_t i = 0; i < mask.data.size(); ++i)
      mask.data[i] = (rng->next_unit() < p.cfg.dropout) ? 0.0 : 1.0 / keep;
    hidden_dropped = hadamard(hidden, mask);
  }

  Matrix logits = matmul(hidden_dropped, p.dec_proj.w);
  add_broadcast_row(logits, p.dec_proj.b);
  Matrix logp = row_log_softmax(logits);
  double loss = 0.0;
  for (std::size_t s = 0; s < steps; ++s) loss -= logp(s, static_cast<std::size_t>(classes[s]));
  loss /= static_cast<double>(steps);

  if (cache) {
    cache->enc = enc;
    cache->inputs = std::move(inputs);
    cache->classes = std::move(classes);
    cache->embedded = std::move(embedded);
    cache->queries = std::move(queries);
    cache->attn = std::move(attn);
    cache->ctx = std::move(ctx);
    cache->hidden = std::move(hidden);
    cache->hidden_dropped = std::move(hidden_dropped);
    cache->drop_mask = std::move(mask);
    cache->probs = row_softmax(logits);
  }
  if (logits_out) *logits_out = std::move(logits);
  return loss;
}

Matrix decode_teacher_forced_backward(double upstream, const ModelParams& p,
                                      const DecoderCache& cache, ModelParams& grads) {
  const std::size_t steps = cache.classes.size();
  Matrix dlogits = cache.probs;
  for (std::size_t s = 0; s < steps; ++s)
    dlogits(s, static_cast<std::size_t>(cache.classes[s])) -= 1.0;
  scale_in_place(dlogits, upstream / static_cast<double>(steps));

  add_in_place(grads.dec_proj.w, matmul_trans_a(cache.hidden_dropped, dlogits));
  add_in_place(grads.dec_proj.b, col_sums(dlogits));
  Matrix dhidden = matmul_trans_b(dlogits, p.dec_proj.w);
  if (cache.drop_mask.data.size() > 0) dhidden = hadamard(dhidden, cache.drop_mask);

  Matrix dpre(dhidden.rows, dhidden.cols);
  for (std::size_t i = 0; i < dpre.data.size(); ++i)
    dpre.data[i] =
        dhidden.data[i] * (1.0 - cache.hidden.data[i] * cache.hidden.data[i]);

  add_in_place(grads.dec_ctx.w, matmul_trans_a(cache.ctx, dpre));
  add_in_place(grads.dec_ctx.b, col_sums(dpre));
  Matrix dctx = matmul_trans_b(dpre, p.dec_ctx.w);

  Matrix grad_enc = matmul_trans_a(cache.attn, dctx);
  Matrix dattn = matmul_trans_b(dctx, cache.enc);
  Matrix dscores = row_softmax_backward(cache.attn, dattn);
  Matrix dqueries = matmul(dscores, cache.enc);
  add_in_place(grad_enc, matmul_trans_a(dscores, cache.queries));

  add_in_place(grads.dec_query.w, matmul_trans_a(cache.embedded, dqueries));
  add_in_place(grads.dec_query.b, col_sums(dqueries));
  Matrix dembedded = matmul_trans_b(dqueries, p.dec_query.w);
  for (std::size_t s = 0; s < steps; ++s) {
    const auto row = static_cast<std::size_t>(cache.inputs[s]);
    for (std::size_t j = 0; j < dembedded.cols; ++j)
      grads.dec_embed(row, j) += dembedded(s, j);
  }
  return grad_enc;
}

}  // namespace mmt
