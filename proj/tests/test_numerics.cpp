#include <cmath>

#include <doctest.h>

#include "core/error.hpp"
#include "core/grad.hpp"
#include "core/matrix.hpp"
#include "core/rng.hpp"

using namespace mmt;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix random_matrix(std::size_t r, std::size_t c, RngState& rng) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(-3.0, 3.0);
  return m;
}

}  // namespace

TEST_CASE("matmul identity leaves the operand unchanged") {
  const Matrix b = from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(matmul(Matrix::identity(2), b) == b);
}

TEST_CASE("matmul matches a hand-expanded 2x2 by 2x1 product") {
  const Matrix a = from_rows({{1, 2}, {3, 4}});
  const Matrix b = from_rows({{5}, {6}});
  const Matrix c = matmul(a, b);
  CHECK(c.rows == 2);
  CHECK(c.cols == 1);
  CHECK(c(0, 0) == doctest::Approx(17));
  CHECK(c(1, 0) == doctest::Approx(39));
}

TEST_CASE("matmul rejects mismatched shapes and names both") {
  const Matrix a(3, 4), b(5, 2);
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("3x4"), Error);
  try {
    matmul(a, b);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("5x2") != std::string::npos);
  }
}

TEST_CASE("matmul is associative on random 4x4 triples") {
  RngState rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(4, 4, rng);
    const Matrix b = random_matrix(4, 4, rng);
    const Matrix c = random_matrix(4, 4, rng);
    const Matrix lhs = matmul(matmul(a, b), c);
    const Matrix rhs = matmul(a, matmul(b, c));
    for (std::size_t i = 0; i < lhs.data.size(); ++i)
      CHECK(std::abs(lhs.data[i] - rhs.data[i]) <= 1e-9);
  }
}

TEST_CASE("matmul transpose helpers agree with explicit transposes") {
  RngState rng(5);
  const Matrix a = random_matrix(3, 5, rng);
  const Matrix b = random_matrix(3, 4, rng);
  CHECK(matmul_trans_a(a, b) == matmul(transpose(a), b));
  const Matrix c = random_matrix(6, 5, rng);
  CHECK(matmul_trans_b(a, c) == matmul(a, transpose(c)));
}

TEST_CASE("row_softmax of a constant row is uniform") {
  const Matrix s = row_softmax(from_rows({{0, 0, 0}}));
  for (std::size_t j = 0; j < 3; ++j) CHECK(s(0, j) == doctest::Approx(1.0 / 3));
}

TEST_CASE("row_softmax survives huge logits without overflow") {
  const Matrix s = row_softmax(from_rows({{1000, 0}}));
  CHECK(all_finite(s));
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK(s(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("row_softmax of log-odds recovers the odds") {
  const Matrix s = row_softmax(from_rows({{std::log(1.0), std::log(2.0), std::log(3.0)}}));
  CHECK(s(0, 0) == doctest::Approx(1.0 / 6));
  CHECK(s(0, 1) == doctest::Approx(2.0 / 6));
  CHECK(s(0, 2) == doctest::Approx(3.0 / 6));
}

TEST_CASE("row_softmax rows sum to one for random matrices up to 64x64") {
  RngState rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = static_cast<std::size_t>(rng.uniform_int(1, 64));
    const auto c = static_cast<std::size_t>(rng.uniform_int(1, 64));
    const Matrix s = row_softmax(random_matrix(r, c, rng));
    for (std::size_t i = 0; i < r; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        sum += s(i, j);
        CHECK(s(i, j) > 0.0);
        CHECK(s(i, j) < 1.0 + 1e-12);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("finite_diff_grad of a quadratic is exact") {
  const auto f = [](const std::vector<double>& p) { return p[0] * p[0]; };
  const auto g = finite_diff_grad(f, {3.0}, 1e-4);
  CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("finite_diff_grad of a constant is zero") {
  const auto f = [](const std::vector<double>&) { return 4.2; };
  for (double g : finite_diff_grad(f, {1.0, -2.0, 0.5}, 1e-4)) CHECK(g == 0.0);
}

TEST_CASE("finite_diff_grad names the coordinate when f blows up") {
  const auto f = [](const std::vector<double>& p) {
    return p[1] > 1.0 ? std::numeric_limits<double>::quiet_NaN() : p[0];
  };
  CHECK_THROWS_WITH_AS(finite_diff_grad(f, {0.0, 1.0}, 1e-4),
                       doctest::Contains("coordinate 1"), Error);
}

TEST_CASE("xavier_init is deterministic in the seed") {
  RngState a(7), b(7), c(8);
  CHECK(xavier_init(1, 1, a) == xavier_init(1, 1, b));
  RngState a4(1), b4(1), c4(2), d4(1);
  CHECK(xavier_init(4, 4, a4) == xavier_init(4, 4, b4));
  CHECK(xavier_init(4, 4, d4) != xavier_init(4, 4, c4));
}

TEST_CASE("xavier_init respects the +-sqrt(6/(rows+cols)) bound") {
  RngState rng(1);
  const Matrix m = xavier_init(100, 100, rng);
  const double bound = std::sqrt(6.0 / 200.0);
  for (double v : m.data) {
    CHECK(v <= bound);
    CHECK(v >= -bound);
  }
}

TEST_CASE("rng streams are reproducible and forks are decorrelated") {
  RngState a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RngState base(9);
  CHECK(base.fork(0).next_u64() != base.fork(1).next_u64());
  // forking does not advance the parent
  RngState c(9);
  c.fork(3);
  CHECK(c.state() == RngState(9).state());
}

TEST_CASE("rng gaussian has sane moments") {
  RngState rng(2024);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.gaussian();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("compare_gradients reports the worst coordinate") {
  const GradCompare cmp = compare_gradients({1.0, 2.0, 3.0}, {1.0, 2.5, 3.0});
  CHECK(cmp.worst_index == 1);
  CHECK(cmp.max_rel_err == doctest::Approx(0.5 / 2.5));
}
