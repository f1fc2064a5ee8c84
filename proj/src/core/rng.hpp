#pragma once

#include <cstdint>

namespace mmt {

// SplitMix64 generator. The entire state is one 64-bit word, so the stream
// is identical on every platform, trivially checkpointable, and cheap to
// fork into independent substreams.
class RngState {
 public:
  explicit RngState(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform draw in [0, 1).
  double next_unit();

  double uniform(double lo, double hi);

  // Inclusive integer range. Modulo bias is immaterial at the range sizes
  // used here.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Standard normal via Box-Muller (cosine branch only, two draws per call).
  double gaussian();

  // Independent substream tagged by `stream`. Forking the same state with
  // different tags yields decorrelated generators.
  RngState fork(std::uint64_t stream) const;

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// One-liner for deriving a nested stream seed without materializing forks.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace mmt
