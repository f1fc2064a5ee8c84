#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace mmt {

struct AlignSegment {
  std::size_t start = 0;  // inclusive frame index
  std::size_t end = 0;    // exclusive
  bool operator==(const AlignSegment&) const = default;
};

struct Utterance {
  std::string id;
  Matrix speech;                        // n1 x feat_dim
  std::vector<int> graphemes;           // ids in 1..vocab, never blank (0)
  std::vector<AlignSegment> alignment;  // per grapheme; empty when unknown
  bool operator==(const Utterance&) const = default;
};

// Synthetic paired corpus: each grapheme owns a fixed random prototype
// vector; an utterance repeats each sampled grapheme's prototype for a
// random duration and adds i.i.d. Gaussian noise. That preserves the two
// facts the alignment mechanism has to exploit, monotonicity and
// n1 > n2, while staying seconds-fast.
struct SynthConfig {
  std::size_t vocab = 10;
  std::size_t len_min = 3;
  std::size_t len_max = 8;
  std::size_t dur_min = 2;
  std::size_t dur_max = 5;
  std::size_t feat_dim = 8;
  double noise_sigma = 0.3;
  double proto_scale = 0.7;  // standard deviation of prototype entries
  std::size_t corpus_size = 200;
  std::size_t unpaired_size = 400;
  std::uint64_t seed = 1;
  void validate() const;
};

// vocab x feat_dim; row g-1 is the prototype of grapheme g.
Matrix prototype_table(const SynthConfig& cfg);

std::vector<Utterance> synth_corpus(const SynthConfig& cfg);

// Grapheme sequences with the same length/vocab distribution as the paired
// corpus, drawn from a disjoint seed stream.
std::vector<std::vector<int>> unpaired_text_corpus(const SynthConfig& cfg);

// JSONL, one UTF-8 record per line:
//   {"id": str, "graphemes": [int], "speech": [[float]],
//    "alignment": [[int,int]]}   (alignment optional)
// Round trips bit-exactly for finite values. Errors carry line numbers.
void save_jsonl(const std::vector<Utterance>& corpus, const std::string& path);
std::vector<Utterance> load_jsonl(const std::string& path, std::size_t expected_vocab,
                                  std::size_t expected_feat_dim);

}  // namespace mmt
