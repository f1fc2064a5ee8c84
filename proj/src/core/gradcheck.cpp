#include "core/gradcheck.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "core/biam.hpp"
#include "core/ctc.hpp"
#include "core/encoders.hpp"
#include "core/error.hpp"
#include "core/grad.hpp"
#include "core/losses.hpp"
#include "core/rng.hpp"
#include "core/train.hpp"

namespace mmt {

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, RngState& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data) v = scale * rng.gaussian();
  return m;
}

double weighted_sum(const Matrix& m, const Matrix& weights) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.data.size(); ++i) acc += m.data[i] * weights.data[i];
  return acc;
}

std::vector<double> concat(const std::vector<std::vector<double>>& parts) {
  std::vector<double> flat;
  for (const auto& p : parts) flat.insert(flat.end(), p.begin(), p.end());
  return flat;
}

// Small instance shared by the model-level checks: d <= 8, n <= 8.
ModelConfig check_model() {
  ModelConfig cfg;
  cfg.feat_dim = 3;
  cfg.dim = 4;
  cfg.vocab = 4;
  cfg.lower_layers = 1;
  cfg.upper_layers = 1;
  cfg.text_layers = 1;
  cfg.dropout = 0.0;  // gradients are checked on the deterministic path
  return cfg;
}

GradCheckEntry finish(const std::string& op, const std::vector<double>& at,
                      const ScalarFn& f, std::vector<double> analytic, bool corrupt) {
  if (corrupt && !analytic.empty())
    analytic[0] += 0.01 * (1.0 + std::abs(analytic[0]));
  const std::vector<double> numeric = finite_diff_grad(f, at, kGradCheckStep);
  const GradCompare cmp = compare_gradients(analytic, numeric);
  GradCheckEntry entry;
  entry.op = op;
  entry.checked = at.size();
  entry.max_rel_err = cmp.max_rel_err;
  entry.worst_index = cmp.worst_index;
  entry.analytic = cmp.analytic;
  entry.numeric = cmp.numeric;
  entry.pass = cmp.max_rel_err <= kGradCheckTolerance;
  return entry;
}

using CheckFn = std::function<GradCheckEntry(std::uint64_t seed, bool corrupt)>;

GradCheckEntry check_ctc_loss(std::uint64_t seed, bool corrupt) {
  RngState rng(derive_seed(seed, 0xC1));
  const Matrix logits = random_matrix(4, 4, rng);  // T=4, V=3
  const std::vector<int> target{2, 2};             // repeated label path
  auto f = [&](const std::vector<double>& v) {
    Matrix l = logits;
    l.data = v;
    return ctc_loss(l, target).loss;
  };
  return finish("ctc.loss", logits.data, f, ctc_loss(logits, target).grad_logits.data, corrupt);
}

GradCheckEntry check_biam_backward(std::uint64_t seed, bool corrupt) {
  RngState rng(derive_seed(seed, 0xB1));
  const Matrix x = random_matrix(4, 3, rng);
  const Matrix y = random_matrix(2, 3, rng);
  const Matrix cx = random_matrix(2, 3, rng);  // functional over x_aligned
  const Matrix cy = random_matrix(4, 3, rng);  // functional over y_aligned
  auto rebuild = [&](const std::vector<double>& v) {
    Matrix xv = x, yv = y;
    std::copy(v.begin(), v.begin() + 12, xv.data.begin());
    std::copy(v.begin() + 12, v.end(), yv.data.begin());
    return std::pair{xv, yv};
  };
  auto f = [&](const std::vector<double>& v) {
    const auto [xv, yv] = rebuild(v);
    const BiamOutput out = biam_forward(xv, yv);
    return weighted_sum(out.x_aligned, cx) + weighted_sum(out.y_aligned, cy);
  };
  const BiamOutput out = biam_forward(x, y);
  const BiamGrads g = biam_backward(x, y, out, cx, cy);
  return finish("biam.backward", concat({x.data, y.data}), f, concat({g.x.data, g.y.data}),
                corrupt);
}

GradCheckEntry check_cosine(std::uint64_t seed, bool corrupt) {
  RngState rng(derive_seed(seed, 0xCD));
  const Matrix ya = random_matrix(3, 4, rng);
  const Matrix x = random_matrix(3, 4, rng);
  auto f = [&](const std::vector<double>& v) {
    Matrix a = ya, b = x;
    std::copy(v.begin(), v.begin() + 12, a.data.begin());
    std::copy(v.begin() + 12, v.end(), b.data.begin());
    return cosine_distance_loss(a, b, nullptr);
  };
  CosineGrads grads;
  cosine_distance_loss(ya, x, &grads);
  return finish("losses.cd", concat({ya.data, x.data}), f,
                concat({grads.y_aligned.data, grads.x.data}), corrupt);
}

GradCheckEntry check_mlm(std::uint64_t seed, bool corrupt) {
  RngState rng(derive_seed(seed, 0x31));
  const Matrix xa = random_matrix(4, 4, rng);
  const Affine head{random_matrix(4, 5, rng), random_matrix(1, 5, rng, 0.1)};
  const std::vector<int> graphemes{1, 3, 2, 5};
  const MaskPlan plan{{0, 2}};
  auto f = [&](const std::vector<double>& v) {
    Matrix a = xa;
    Affine h = head;
    std::copy(v.begin(), v.begin() + 16, a.data.begin());
    std::copy(v.begin() + 16, v.begin() + 36, h.w.data.begin());
    std::copy(v.begin() + 36, v.end(), h.b.data.begin());
    return mlm_loss(a, graphemes, plan, h).loss;
  };
  const MlmResult res = mlm_loss(xa, graphemes, plan, head);
  return finish("losses.mlm", concat({xa.data, head.w.data, head.b.data}), f,
                concat({res.grad_x_aligned.data, res.grad_head.w.data, res.grad_head.b.data}),
                corrupt);
}

GradCheckEntry check_gctc(std::uint64_t seed, bool corrupt) {
  RngState rng(derive_seed(seed, 0x6C));
  const Matrix selected = random_matrix(5, 4, rng);
  const Affine head{random_matrix(4, 5, rng), random_matrix(1, 5, rng, 0.1)};
  const std::vector<int> graphemes{2, 1};
  auto f = [&](const std::vector<double>& v) {
    Matrix s = selected;
    Affine h = head;
    std::copy(v.begin(), v.begin() + 20, s.data.begin());
    std::copy(v.begin() + 20, v.begin() + 40, h.w.data.begin());
    std::copy(v.begin() + 40, v.end(), h.b.data.begin());
    return gctc_loss(s, graphemes, h).loss;
  };
  const GctcResult res = gctc_loss(selected, graphemes, head);
  return finish("losses.gctc", concat({selected.data, head.w.data, head.b.data}), f,
                concat({res.grad_input.data, res.grad_head.w.data, res.grad_head.b.data}),
                corrupt);
}

GradCheckEntry check_lower(std::uint64_t seed, bool corrupt) {
  RngState rng(derive_seed(seed, 0xE1));
  const ModelConfig cfg = check_model();
  const ModelParams params = ModelParams::init(cfg, rng);
  const Matrix features = random_matrix(5, cfg.feat_dim, rng);
  const Matrix weights = random_matrix(5, cfg.dim, rng);
  auto f = [&](const std::vector<double>& v) {
    ModelParams p = params;
    p.unflatten(v);
    return weighted_sum(encode_speech_lower(features, p, false, nullptr, nullptr), weights);
  };
  LowerCache cache;
  encode_speech_lower(features, params, false, nullptr, &cache);
  ModelParams grads = ModelParams::zeros_like(params);
  encode_speech_lower_backward(weights, params, cache, grads);
  return finish("encoders.lower", params.flatten(), f, grads.flatten(), corrupt);
}

GradCheckEntry check_upper(std::uint64_t seed, bool corrupt) {
  RngState rng(derive_seed(seed, 0xE2));
  const ModelConfig cfg = check_model();
  const ModelParams params = ModelParams::init(cfg, rng);
  const Matrix x = random_matrix(5, cfg.dim, rng);
  const Matrix weights = random_matrix(5, cfg.dim, rng);
  const std::size_t nx = x.data.size();
  auto f = [&](const std::vector<double>& v) {
    Matrix xv = x;
    std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(nx), xv.data.begin());
    ModelParams p = params;
    p.unflatten({v.begin() + static_cast<std::ptrdiff_t>(nx), v.end()});
    return weighted_sum(encode_speech_upper(xv, p, false, nullptr, nullptr), weights);
  };
  UpperCache cache;
  encode_speech_upper(x, params, false, nullptr, &cache);
  ModelParams grads = ModelParams::zeros_like(params);
  const Matrix gx = encode_speech_upper_backward(weights, params, cache, grads);
  return finish("encoders.upper", concat({x.data, params.flatten()}), f,
                concat({gx.data, grads.flatten()}), corrupt);
}

GradCheckEntry check_text(std::uint64_t seed, bool corrupt) {
  RngState rng(derive_seed(seed, 0xE3));
  const ModelConfig cfg = check_model();
  const ModelParams params = ModelParams::init(cfg, rng);
  const std::vector<int> tokens{2, 0, 3, 1};  // includes a MASK token
  const Matrix weights = random_matrix(tokens.size(), cfg.dim, rng);
  auto f = [&](const std::vector<double>& v) {
    ModelParams p = params;
    p.unflatten(v);
    return weighted_sum(encode_text(tokens, p, false, nullptr, nullptr), weights);
  };
  TextCache cache;
  encode_text(tokens, params, false, nullptr, &cache);
  ModelParams grads = ModelParams::zeros_like(params);
  encode_text_backward(weights, params, cache, grads);
  return finish("encoders.text", params.flatten(), f, grads.flatten(), corrupt);
}

GradCheckEntry check_decoder(std::uint64_t seed, bool corrupt) {
  RngState rng(derive_seed(seed, 0xE4));
  const ModelConfig cfg = check_model();
  const ModelParams params = ModelParams::init(cfg, rng);
  const Matrix enc = random_matrix(5, cfg.dim, rng);
  const std::vector<int> targets{1, 3};
  const std::size_t ne = enc.data.size();
  auto f = [&](const std::vector<double>& v) {
    Matrix e = enc;
    std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(ne), e.data.begin());
    ModelParams p = params;
    p.unflatten({v.begin() + static_cast<std::ptrdiff_t>(ne), v.end()});
    return decode_teacher_forced(e, targets, p, false, nullptr, nullptr);
  };
  DecoderCache cache;
  decode_teacher_forced(enc, targets, params, false, nullptr, &cache);
  ModelParams grads = ModelParams::zeros_like(params);
  const Matrix genc = decode_teacher_forced_backward(1.0, params, cache, grads);
  return finish("encoders.decoder", concat({enc.data, params.flatten()}), f,
                concat({genc.data, grads.flatten()}), corrupt);
}

// The ASR mixture of CTC head and attention decoder above the upper stack.
GradCheckEntry check_asr(std::uint64_t seed, bool corrupt) {
  RngState rng(derive_seed(seed, 0xA5));
  const ModelConfig cfg = check_model();
  const ModelParams params = ModelParams::init(cfg, rng);
  const Matrix x = random_matrix(6, cfg.dim, rng);
  const std::vector<int> targets{2, 1, 3};
  const LossWeights w;
  const std::size_t nx = x.data.size();

  auto forward = [&](const Matrix& xv, const ModelParams& p, ModelParams* grads, Matrix* gx) {
    UpperCache ucache;
    const Matrix u = encode_speech_upper(xv, p, false, nullptr, grads ? &ucache : nullptr);
    Matrix logits = matmul(u, p.asr_head.w);
    add_broadcast_row(logits, p.asr_head.b);
    CtcResult ctc = ctc_loss(logits, targets);
    DecoderCache dcache;
    const double att =
        decode_teacher_forced(u, targets, p, false, nullptr, grads ? &dcache : nullptr);
    const double loss = w.lambda * ctc.loss + (1.0 - w.lambda) * att;
    if (grads) {
      Matrix glogits = std::move(ctc.grad_logits);
      scale_in_place(glogits, w.lambda);
      add_in_place(grads->asr_head.w, matmul_trans_a(u, glogits));
      add_in_place(grads->asr_head.b, col_sums(glogits));
      Matrix gu = matmul_trans_b(glogits, p.asr_head.w);
      add_in_place(gu, decode_teacher_forced_backward(1.0 - w.lambda, p, dcache, *grads));
      *gx = encode_speech_upper_backward(gu, p, ucache, *grads);
    }
    return loss;
  };

  auto f = [&](const std::vector<double>& v) {
    Matrix xv = x;
    std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(nx), xv.data.begin());
    ModelParams p = params;
    p.unflatten({v.begin() + static_cast<std::ptrdiff_t>(nx), v.end()});
    return forward(xv, p, nullptr, nullptr);
  };
  ModelParams grads = ModelParams::zeros_like(params);
  Matrix gx;
  forward(x, params, &grads, &gx);
  return finish("losses.asr", concat({x.data, params.flatten()}), f,
                concat({gx.data, grads.flatten()}), corrupt);
}

// Full multi-modal objective through both encoders, the shared attention
// and every loss head, against all parameters at once.
GradCheckEntry check_chain(std::uint64_t seed, bool corrupt, bool pick_speech) {
  RngState rng(derive_seed(seed, pick_speech ? 0xF1 : 0xF2));
  RunConfig cfg;
  cfg.model = check_model();
  cfg.data.vocab = cfg.model.vocab;
  cfg.data.feat_dim = cfg.model.feat_dim;
  cfg.train.mode = TrainMode::biam_full;
  const ModelParams params = ModelParams::init(cfg.model, rng);

  Utterance utt;
  utt.id = "gradcheck";
  utt.speech = random_matrix(6, cfg.model.feat_dim, rng);
  utt.graphemes = {1, 3, 2};

  StepContext ctx;
  ctx.plan.positions = {0, 2};
  ctx.pick_speech = pick_speech;
  ctx.cd_enabled = true;
  ctx.training = false;

  auto f = [&](const std::vector<double>& v) {
    ModelParams p = params;
    p.unflatten(v);
    return paired_step(p, utt, cfg, ctx, nullptr, nullptr).total;
  };
  ModelParams grads = ModelParams::zeros_like(params);
  paired_step(params, utt, cfg, ctx, nullptr, &grads);
  return finish(pick_speech ? "chain.total_speech_sample" : "chain.total_text_sample",
                params.flatten(), f, grads.flatten(), corrupt);
}

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> checks = {
      {"ctc.loss", check_ctc_loss},
      {"biam.backward", check_biam_backward},
      {"losses.cd", check_cosine},
      {"losses.mlm", check_mlm},
      {"losses.gctc", check_gctc},
      {"losses.asr", check_asr},
      {"encoders.lower", check_lower},
      {"encoders.upper", check_upper},
      {"encoders.text", check_text},
      {"encoders.decoder", check_decoder},
      {"chain.total_speech_sample",
       [](std::uint64_t s, bool c) { return check_chain(s, c, true); }},
      {"chain.total_text_sample",
       [](std::uint64_t s, bool c) { return check_chain(s, c, false); }},
  };
  return checks;
}

}  // namespace

std::vector<std::string> gradcheck_scopes() {
  return {"all", "ctc", "biam", "losses", "encoders", "chain"};
}

GradCheckReport run_gradcheck(const std::string& scope, std::uint64_t seed,
                              const std::string& corrupt_op) {
  bool known_scope = false;
  for (const std::string& s : gradcheck_scopes()) known_scope = known_scope || s == scope;
  if (!known_scope) {
    std::string choices;
    for (const std::string& s : gradcheck_scopes()) choices += (choices.empty() ? "" : ", ") + s;
    throw_usage("gradcheck: unknown scope '" + scope + "' (choices: " + choices + ")");
  }
  if (!corrupt_op.empty()) {
    bool known_op = false;
    for (const auto& [op, fn] : registry()) known_op = known_op || op == corrupt_op;
    if (!known_op) throw_usage("gradcheck: unknown op '" + corrupt_op + "'");
  }

  GradCheckReport report;
  report.all_pass = true;
  for (const auto& [op, fn] : registry()) {
    if (scope != "all" && op.substr(0, op.find('.')) != scope) continue;
    GradCheckEntry entry = fn(seed, op == corrupt_op);
    report.all_pass = report.all_pass && entry.pass;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::string format_gradcheck_report(const GradCheckReport& report) {
  std::string out;
  char buf[256];
  for (const GradCheckEntry& e : report.entries) {
    std::snprintf(buf, sizeof buf,
                  "%s %-26s max_rel_err=%.3e over %zu coords (worst: analytic=%.6g fd=%.6g)\n",
                  e.pass ? "PASS" : "FAIL", e.op.c_str(), e.max_rel_err, e.checked, e.analytic,
                  e.numeric);
    out += buf;
  }
  std::size_t passed = 0;
  for (const GradCheckEntry& e : report.entries) passed += e.pass ? 1 : 0;
  std::snprintf(buf, sizeof buf, "gradcheck: %zu/%zu gradients within %.0e at step %.0e\n",
                passed, report.entries.size(), kGradCheckTolerance, kGradCheckStep);
  out += buf;
  return out;
}

}  // namespace mmt
