#include "core/params.hpp"

#include <cstring>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace mmt {

void ModelConfig::validate() const {
  if (!(init_gain > 0.0)) throw_usage("model: init_gain must be > 0");
  if (feat_dim < 1) throw_usage("model: feat_dim must be >= 1");
  if (dim < 1) throw_usage("model: dim must be >= 1");
  if (vocab < 2) throw_usage("model: vocab must be >= 2");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw_usage("model: dropout must lie in [0, 1)");
}

namespace {

Affine zero_affine(std::size_t in, std::size_t out) {
  return Affine{Matrix(in, out), Matrix(1, out)};
}

}  // namespace

ModelParams ModelParams::zeros(const ModelConfig& cfg) {
  cfg.validate();
  ModelParams p;
  p.cfg = cfg;
  const std::size_t d = cfg.dim;
  p.speech_in = zero_affine(cfg.feat_dim, d);
  for (std::size_t i = 0; i < cfg.lower_layers; ++i) p.lower.push_back(zero_affine(d, d));
  for (std::size_t i = 0; i < cfg.upper_layers; ++i) p.upper.push_back(zero_affine(d, d));
  p.text_embed = Matrix(cfg.vocab + 1, d);
  for (std::size_t i = 0; i < cfg.text_layers; ++i) p.text.push_back(zero_affine(d, d));
  p.asr_head = zero_affine(d, cfg.vocab + 1);
  p.dec_embed = Matrix(cfg.vocab + 2, d);
  p.dec_query = zero_affine(d, d);
  p.dec_ctx = zero_affine(d, d);
  p.dec_proj = zero_affine(d, cfg.vocab + 1);
  p.mlm_head = zero_affine(d, cfg.vocab);
  p.gctc_head = zero_affine(d, cfg.vocab + 1);
  return p;
}

ModelParams ModelParams::init(const ModelConfig& cfg, RngState& rng) {
  ModelParams p = zeros(cfg);
  p.visit([&](const std::string& name, Matrix& m) {
    if (name.size() >= 2 && name.compare(name.size() - 2, 2, ".b") == 0) return;
    m = xavier_init(m.rows, m.cols, rng);
    if (name == "text.embed" || name == "speech_in.w") scale_in_place(m, cfg.init_gain);
  });
  return p;
}

ModelParams ModelParams::zeros_like(const ModelParams& other) {
  ModelParams p = other;
  p.visit([](const std::string&, Matrix& m) { std::fill(m.data.begin(), m.data.end(), 0.0); });
  return p;
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, const Matrix& m) { n += m.data.size(); });
  return n;
}

std::vector<double> ModelParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(scalar_count());
  visit([&](const std::string&, const Matrix& m) {
    flat.insert(flat.end(), m.data.begin(), m.data.end());
  });
  return flat;
}

void ModelParams::unflatten(const std::vector<double>& flat) {
  if (flat.size() != scalar_count())
    throw_usage("unflatten: expected " + std::to_string(scalar_count()) + " scalars, got " +
                std::to_string(flat.size()));
  std::size_t off = 0;
  visit([&](const std::string&, Matrix& m) {
    std::copy(flat.begin() + off, flat.begin() + off + m.data.size(), m.data.begin());
    off += m.data.size();
  });
}

void ModelParams::add_scaled(const ModelParams& g, double scale,
                             const std::function<bool(const std::string&)>& filter) {
  std::vector<const Matrix*> src;
  g.visit([&](const std::string&, const Matrix& m) { src.push_back(&m); });
  std::size_t i = 0;
  visit([&](const std::string& name, Matrix& m) {
    const Matrix& s = *src[i++];
    if (!m.same_shape(s)) throw_usage("add_scaled: shape mismatch at " + name);
    if (filter && !filter(name)) return;
    for (std::size_t k = 0; k < m.data.size(); ++k) m.data[k] += scale * s.data[k];
  });
}

}  // namespace mmt
