#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace mmt {

class RngState;

// Dimensions and switches of the toy model. Token conventions:
//   - grapheme ids run 1..vocab; id 0 is the CTC blank,
//   - row 0 of the text embedding table is the MASK token,
//   - decoder inputs add a BOS row (id vocab + 1), decoder outputs reserve
//     class 0 for EOS so class v is grapheme v.
struct ModelConfig {
  std::size_t feat_dim = 8;  // input feature dimension
  std::size_t dim = 16;      // shared embedding dimension d
  std::size_t vocab = 10;    // graphemes 1..vocab
  std::size_t lower_layers = 2;
  std::size_t upper_layers = 2;
  std::size_t text_layers = 2;
  double dropout = 0.1;
  bool positional_speech = true;  // sinusoidal positions on the speech path
  bool positional_text = true;    // and on the text path
  // Gain on the text embedding table and speech input projection at init.
  double init_gain = 1.0;

  static constexpr int blank_id = 0;
  static constexpr int mask_id = 0;
  static constexpr std::size_t eos_class = 0;
  int bos_id() const { return static_cast<int>(vocab) + 1; }

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct Affine {
  Matrix w;
  Matrix b;  // 1 x out
  bool operator==(const Affine&) const = default;
};

// Every trainable array of the model in a fixed registry order. The same
// struct doubles as the gradient accumulator, which is what gives every
// module the uniform gradient contract checked by the finite-difference
// oracle.
struct ModelParams {
  ModelConfig cfg;
  Affine speech_in;            // feat_dim x d projection of raw features
  std::vector<Affine> lower;   // d x d residual tanh layers
  std::vector<Affine> upper;
  Matrix text_embed;           // (vocab+1) x d, row 0 = MASK
  std::vector<Affine> text;
  Affine asr_head;             // d x (vocab+1), column 0 = blank
  Matrix dec_embed;            // (vocab+2) x d, row vocab+1 = BOS
  Affine dec_query;            // d x d
  Affine dec_ctx;              // d x d
  Affine dec_proj;             // d x (vocab+1), class 0 = EOS
  Affine mlm_head;             // d x vocab, class v-1 = grapheme v
  Affine gctc_head;            // d x (vocab+1)

  // Zero-valued arrays of the right shapes.
  static ModelParams zeros(const ModelConfig& cfg);
  static ModelParams zeros_like(const ModelParams& other);
  // Xavier weights, zero biases; draws in registry order.
  static ModelParams init(const ModelConfig& cfg, RngState& rng);

  // Visits every array with its registry name ("dec.query.w", "lower.0.b",
  // ...). Decoder arrays all carry the "dec." prefix; the unpaired-text
  // stage relies on that to freeze everything else.
  template <class Fn>
  void visit(Fn&& fn) {
    visit_impl(*this, fn);
  }
  template <class Fn>
  void visit(Fn&& fn) const {
    visit_impl(*this, fn);
  }

  std::size_t scalar_count() const;
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& flat);

  // p += scale * g for every array whose name passes `filter` (all arrays
  // when the filter is empty).
  void add_scaled(const ModelParams& g, double scale,
                  const std::function<bool(const std::string&)>& filter = {});

  bool operator==(const ModelParams&) const = default;

 private:
  template <class Self, class Fn>
  static void visit_impl(Self& self, Fn& fn) {
    fn("speech_in.w", self.speech_in.w);
    fn("speech_in.b", self.speech_in.b);
    for (std::size_t i = 0; i < self.lower.size(); ++i) {
      const std::string base = "lower." + std::to_string(i);
      fn(base + ".w", self.lower[i].w);
      fn(base + ".b", self.lower[i].b);
    }
    for (std::size_t i = 0; i < self.upper.size(); ++i) {
      const std::string base = "upper." + std::to_string(i);
      fn(base + ".w", self.upper[i].w);
      fn(base + ".b", self.upper[i].b);
    }
    fn("text.embed", self.text_embed);
    for (std::size_t i = 0; i < self.text.size(); ++i) {
      const std::string base = "text." + std::to_string(i);
      fn(base + ".w", self.text[i].w);
      fn(base + ".b", self.text[i].b);
    }
    fn("asr_head.w", self.asr_head.w);
    fn("asr_head.b", self.asr_head.b);
    fn("dec.embed", self.dec_embed);
    fn("dec.query.w", self.dec_query.w);
    fn("dec.query.b", self.dec_query.b);
    fn("dec.ctx.w", self.dec_ctx.w);
    fn("dec.ctx.b", self.dec_ctx.b);
    fn("dec.proj.w", self.dec_proj.w);
    fn("dec.proj.b", self.dec_proj.b);
    fn("mlm_head.w", self.mlm_head.w);
    fn("mlm_head.b", self.mlm_head.b);
    fn("gctc_head.w", self.gctc_head.w);
    fn("gctc_head.b", self.gctc_head.b);
  }
};

}  // namespace mmt
