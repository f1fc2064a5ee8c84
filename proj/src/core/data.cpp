#include "core/data.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace mmt {

namespace {

// substream tags of the corpus seed
constexpr std::uint64_t kProtoStream = 0xA110;
constexpr std::uint64_t kPairedStream = 0xA111;
constexpr std::uint64_t kTextStream = 0xA112;

}  // namespace

void SynthConfig::validate() const {
  if (vocab < 2) throw_usage("data: vocab must be >= 2");
  if (len_min < 1 || len_max < len_min) throw_usage("data: need 1 <= len_min <= len_max");
  if (dur_min < 1 || dur_max < dur_min) throw_usage("data: need 1 <= dur_min <= dur_max");
  if (feat_dim < 1) throw_usage("data: feat_dim must be >= 1");
  if (!(noise_sigma >= 0.0)) throw_usage("data: noise_sigma must be >= 0");
  if (!(proto_scale > 0.0)) throw_usage("data: proto_scale must be > 0");
  if (corpus_size < 1) throw_usage("data: corpus_size must be >= 1");
}

Matrix prototype_table(const SynthConfig& cfg) {
  cfg.validate();
  RngState rng = RngState(cfg.seed).fork(kProtoStream);
  Matrix protos(cfg.vocab, cfg.feat_dim);
  for (double& v : protos.data) v = cfg.proto_scale * rng.gaussian();
  return protos;
}

namespace {

std::vector<int> sample_graphemes(const SynthConfig& cfg, RngState& rng) {
  const auto len = static_cast<std::size_t>(rng.uniform_int(
      static_cast<std::int64_t>(cfg.len_min), static_cast<std::int64_t>(cfg.len_max)));
  std::vector<int> graphemes(len);
  for (int& g : graphemes)
    g = static_cast<int>(rng.uniform_int(1, static_cast<std::int64_t>(cfg.vocab)));
  return graphemes;
}

}  // namespace

std::vector<Utterance> synth_corpus(const SynthConfig& cfg) {
  cfg.validate();
  const Matrix protos = prototype_table(cfg);
  std::vector<Utterance> corpus(cfg.corpus_size);
  for (std::size_t u = 0; u < cfg.corpus_size; ++u) {
    RngState rng = RngState(cfg.seed).fork(kPairedStream).fork(u);
    Utterance& utt = corpus[u];
    char id[32];
    std::snprintf(id, sizeof id, "utt-%06zu", u);
    utt.id = id;
    utt.graphemes = sample_graphemes(cfg, rng);

    std::vector<std::size_t> durations(utt.graphemes.size());
    std::size_t n1 = 0;
    for (std::size_t& dur : durations) {
      dur = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(cfg.dur_min),
                                                     static_cast<std::int64_t>(cfg.dur_max)));
      n1 += dur;
    }

    utt.speech = Matrix(n1, cfg.feat_dim);
    std::size_t frame = 0;
    for (std::size_t i = 0; i < utt.graphemes.size(); ++i) {
      const auto proto_row = static_cast<std::size_t>(utt.graphemes[i] - 1);
      utt.alignment.push_back({frame, frame + durations[i]});
      for (std::size_t rep = 0; rep < durations[i]; ++rep, ++frame)
        for (std::size_t j = 0; j < cfg.feat_dim; ++j)
          utt.speech(frame, j) = protos(proto_row, j) + cfg.noise_sigma * rng.gaussian();
    }
  }
  return corpus;
}

std::vector<std::vector<int>> unpaired_text_corpus(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<int>> texts(cfg.unpaired_size);
  for (std::size_t u = 0; u < cfg.unpaired_size; ++u) {
    RngState rng = RngState(cfg.seed).fork(kTextStream).fork(u);
    texts[u] = sample_graphemes(cfg, rng);
  }
  return texts;
}

void save_jsonl(const std::vector<Utterance>& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("save_jsonl: cannot open '" + path + "' for writing");
  for (const Utterance& utt : corpus) {
    if (!all_finite(utt.speech))
      throw_numeric("save_jsonl: non-finite speech values in utterance " + utt.id);
    nlohmann::json rec;
    rec["id"] = utt.id;
    rec["graphemes"] = utt.graphemes;
    auto& speech = rec["speech"] = nlohmann::json::array();
    for (std::size_t i = 0; i < utt.speech.rows; ++i) {
      const auto row = utt.speech.row(i);
      speech.push_back(std::vector<double>(row.begin(), row.end()));
    }
    if (!utt.alignment.empty()) {
      auto& align = rec["alignment"] = nlohmann::json::array();
      for (const AlignSegment& seg : utt.alignment)
        align.push_back(std::vector<std::size_t>{seg.start, seg.end});
    }
    out << rec.dump() << '\n';
  }
  if (!out) throw_data("save_jsonl: write to '" + path + "' failed");
}

namespace {

[[noreturn]] void line_error(const std::string& path, std::size_t lineno,
                             const std::string& what) {
  throw_data(path + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

std::vector<Utterance> load_jsonl(const std::string& path, std::size_t expected_vocab,
                                  std::size_t expected_feat_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("load_jsonl: cannot open '" + path + "'");
  std::vector<Utterance> corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      line_error(path, lineno, std::string("malformed JSON record: ") + e.what());
    }
    if (!rec.is_object()) line_error(path, lineno, "record is not a JSON object");

    Utterance utt;
    try {
      utt.id = rec.at("id").get<std::string>();
      utt.graphemes = rec.at("graphemes").get<std::vector<int>>();
      const auto& speech = rec.at("speech");
      if (!speech.is_array() || speech.empty())
        line_error(path, lineno, "'speech' must be a nonempty array of rows");
      utt.speech = Matrix(speech.size(), expected_feat_dim);
      for (std::size_t i = 0; i < speech.size(); ++i) {
        const auto row = speech[i].get<std::vector<double>>();
        if (row.size() != expected_feat_dim)
          line_error(path, lineno,
                     "speech row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                         " values, expected " + std::to_string(expected_feat_dim));
        for (std::size_t j = 0; j < row.size(); ++j) {
          if (!std::isfinite(row[j]))
            line_error(path, lineno, "non-finite speech value in row " + std::to_string(i));
          utt.speech(i, j) = row[j];
        }
      }
      if (rec.contains("alignment")) {
        for (const auto& seg : rec.at("alignment")) {
          const auto pair = seg.get<std::vector<std::size_t>>();
          if (pair.size() != 2) line_error(path, lineno, "alignment segments must be pairs");
          utt.alignment.push_back({pair[0], pair[1]});
        }
      }
    } catch (const nlohmann::json::exception& e) {
      line_error(path, lineno, std::string("bad record field: ") + e.what());
    }

    for (int g : utt.graphemes)
      if (g < 1 || g > static_cast<int>(expected_vocab))
        line_error(path, lineno, "unknown grapheme id " + std::to_string(g) +
                                     " (vocabulary is 1.." + std::to_string(expected_vocab) + ")");
    if (!utt.alignment.empty()) {
      if (utt.alignment.size() != utt.graphemes.size())
        line_error(path, lineno, "alignment count does not match grapheme count");
      std::size_t cursor = 0;
      for (const AlignSegment& seg : utt.alignment) {
        if (seg.start != cursor || seg.end <= seg.start)
          line_error(path, lineno, "alignment segments must be contiguous and nonempty");
        cursor = seg.end;
      }
      if (cursor != utt.speech.rows)
        line_error(path, lineno, "alignment does not cover all frames");
    }
    corpus.push_back(std::move(utt));
  }
  return corpus;
}

}  // namespace mmt
