#include <cmath>

#include <doctest.h>

#include "core/ctc.hpp"
#include "core/error.hpp"
#include "core/grad.hpp"
#include "core/rng.hpp"

using namespace mmt;

namespace {

Matrix random_logits(std::size_t t, std::size_t cols, RngState& rng) {
  Matrix m(t, cols);
  for (double& v : m.data) v = rng.uniform(-2.0, 2.0);
  return m;
}

std::vector<int> random_target(std::size_t len, int vocab, RngState& rng) {
  std::vector<int> target(len);
  for (int& t : target) t = static_cast<int>(rng.uniform_int(1, vocab));
  return target;
}

}  // namespace

TEST_CASE("single frame, uniform softmax: loss is ln 2") {
  const Matrix logits(1, 2);  // V=1, all-zero logits
  const CtcResult res = ctc_loss(logits, {1});
  CHECK(res.loss == doctest::Approx(std::log(2.0)));
}

TEST_CASE("two uniform frames over {blank,1} and target [1]: loss is -ln(3/4)") {
  // valid paths (1,blank), (blank,1), (1,1), each with probability 1/4
  const Matrix logits(2, 2);
  const CtcResult res = ctc_loss(logits, {1});
  CHECK(res.loss == doctest::Approx(-std::log(3.0 / 4.0)));
  CHECK(ctc_bruteforce(logits, {1}) == doctest::Approx(res.loss));
}

TEST_CASE("repeated label needs its separating blank and matches the oracle") {
  RngState rng(17);
  const Matrix logits = random_logits(3, 3, rng);  // T=3, V=2
  const std::vector<int> target{1, 1};
  CHECK(ctc_min_frames(target) == 3);
  const CtcResult res = ctc_loss(logits, target);
  CHECK(res.loss == doctest::Approx(ctc_bruteforce(logits, target)).epsilon(1e-12));
}

TEST_CASE("forward recursion equals brute-force enumeration on random instances") {
  RngState rng(99);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = static_cast<std::size_t>(rng.uniform_int(1, 5));
    const int vocab = static_cast<int>(rng.uniform_int(1, 3));
    const auto len = static_cast<std::size_t>(rng.uniform_int(0, 3));
    const Matrix logits = random_logits(t, static_cast<std::size_t>(vocab) + 1, rng);
    const std::vector<int> target = random_target(len, vocab, rng);
    if (t < ctc_min_frames(target)) {
      CHECK_THROWS_AS(ctc_loss(logits, target), Error);
      CHECK_THROWS_AS(ctc_bruteforce(logits, target), Error);
      continue;
    }
    const double fast = ctc_loss(logits, target).loss;
    const double slow = ctc_bruteforce(logits, target);
    CHECK(std::abs(fast - slow) <= 1e-9);
    ++compared;
  }
  CHECK(compared > 100);
}

TEST_CASE("unreachable targets raise the same structured error on both sides") {
  const Matrix logits(2, 3);
  const std::vector<int> target{1, 2, 1};  // needs 3 frames
  CHECK_THROWS_WITH_AS(ctc_loss(logits, target), doctest::Contains("frames"), Error);
  CHECK_THROWS_AS(ctc_bruteforce(logits, target), Error);
  try {
    ctc_loss(logits, target);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
  }
  try {
    ctc_bruteforce(logits, target);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
  }
}

TEST_CASE("empty target reduces to the all-blank path") {
  RngState rng(5);
  const Matrix logits = random_logits(3, 3, rng);
  const CtcResult res = ctc_loss(logits, {});
  CHECK(res.loss == doctest::Approx(ctc_bruteforce(logits, {})));
}

TEST_CASE("loss is non-negative and shift-invariant") {
  RngState rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix logits = random_logits(4, 4, rng);
    const std::vector<int> target = random_target(2, 3, rng);
    const double base = ctc_loss(logits, target).loss;
    CHECK(base >= 0.0);
    Matrix shifted = logits;
    for (std::size_t i = 0; i < shifted.rows; ++i)
      for (std::size_t j = 0; j < shifted.cols; ++j) shifted(i, j) += 7.5;
    CHECK(ctc_loss(shifted, target).loss == doctest::Approx(base));
  }
}

TEST_CASE("gradient matches finite differences on T=4, L=2, V=3 instances") {
  RngState rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix logits = random_logits(4, 4, rng);
    const std::vector<int> target = random_target(2, 3, rng);
    const CtcResult res = ctc_loss(logits, target);
    auto f = [&](const std::vector<double>& v) {
      Matrix l = logits;
      l.data = v;
      return ctc_loss(l, target).loss;
    };
    const auto numeric = finite_diff_grad(f, logits.data, 1e-4);
    CHECK(compare_gradients(res.grad_logits.data, numeric).max_rel_err <= 1e-3);
  }
}

TEST_CASE("brute force refuses oversized instances") {
  const Matrix logits(12, 10);
  CHECK_THROWS_AS(ctc_bruteforce(logits, {1}), Error);
}

TEST_CASE("greedy decode collapses repeats and drops blanks") {
  // argmax path 1,1,0,2 -> [1,2]
  Matrix logits(4, 3);
  logits(0, 1) = 5;
  logits(1, 1) = 5;
  logits(2, 0) = 5;
  logits(3, 2) = 5;
  CHECK(ctc_greedy_decode(logits) == std::vector<int>{1, 2});

  Matrix blanks(3, 3);
  blanks(0, 0) = 1;
  blanks(1, 0) = 1;
  blanks(2, 0) = 1;
  CHECK(ctc_greedy_decode(blanks).empty());

  // blank separates a genuine repeat: 1,0,1 -> [1,1]
  Matrix sep(3, 3);
  sep(0, 1) = 5;
  sep(1, 0) = 5;
  sep(2, 1) = 5;
  CHECK(ctc_greedy_decode(sep) == std::vector<int>{1, 1});
}
