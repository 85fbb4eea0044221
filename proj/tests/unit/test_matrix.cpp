#include <doctest.h>

#include <cmath>
#include <random>

#include "entroprune/errors.hpp"
#include "entroprune/matrix.hpp"

using namespace entroprune;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(r, c);
  for (double& v : m.data()) v = u(rng);
  return m;
}

// Naive triple loop with the same (k ascending) accumulation order.
Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

}  // namespace

TEST_CASE("matmul: identity and scalar cases") {
  std::mt19937_64 rng(1);
  const Matrix m = random_matrix(rng, 3, 4);
  CHECK(matmul(Matrix::identity(3), m) == m);
  CHECK(matmul(Matrix(1, 1, std::vector<double>{2.0}), Matrix(1, 1, std::vector<double>{3.0}))(0, 0) == 6.0);
}

TEST_CASE("matmul: matches naive triple loop bit for bit") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 9, k = 1 + rng() % 9, m = 1 + rng() % 9;
    const Matrix a = random_matrix(rng, n, k), b = random_matrix(rng, k, m);
    CHECK(matmul(a, b) == naive_matmul(a, b));
  }
  const Matrix a = random_matrix(rng, 4, 5), b = random_matrix(rng, 5, 3);
  CHECK(matmul(a, b) == naive_matmul(a, b));
}

TEST_CASE("matmul: shape mismatch") {
  CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1.0, 2.0, 3.0}), ShapeError);
}

TEST_CASE("softmax_rows: examples") {
  const Matrix s = softmax_rows(Matrix(3, 3, std::vector<double>{0, 0, 0, 1000, 0, 0, 1, 2, 3}));
  for (std::size_t c = 0; c < 3; ++c) CHECK(s(0, c) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s(1, 0) == 1.0);
  CHECK(s(1, 1) == 0.0);
  CHECK(s(2, 0) == doctest::Approx(0.0900305731703804580).epsilon(1e-14));
  CHECK(s(2, 1) == doctest::Approx(0.2447284710547976525).epsilon(1e-14));
  CHECK(s(2, 2) == doctest::Approx(0.6652409557748218895).epsilon(1e-14));
}

TEST_CASE("softmax_rows: row-stochastic and shift invariant (property)") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = 1 + rng() % 6, c = 1 + rng() % 12;
    const Matrix m = random_matrix(rng, r, c, 50.0);
    const Matrix s = softmax_rows(m);
    REQUIRE(s.all_finite());
    for (std::size_t i = 0; i < r; ++i) {
      double sum = 0.0;
      for (double v : s.row(i)) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
    Matrix shifted = m;
    for (std::size_t i = 0; i < r; ++i) {
      const double shift = static_cast<double>(rng() % 1000) / 7.0;
      for (double& v : shifted.row(i)) v += shift;
    }
    const Matrix s2 = softmax_rows(shifted);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s2.data()[i] - s.data()[i]) <= 1e-12);
  }
}

TEST_CASE("softmax_rows: shift invariance is exact on integer logits") {
  // Integer logits and shifts make every (v + c) - (max + c) exact, so the
  // max-subtracted exponent arguments and therefore the outputs coincide.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = 1 + rng() % 5, c = 1 + rng() % 10;
    Matrix m(r, c);
    for (double& v : m.data()) v = static_cast<double>(static_cast<int>(rng() % 101) - 50);
    Matrix shifted = m;
    for (std::size_t i = 0; i < r; ++i) {
      const double shift = static_cast<double>(static_cast<int>(rng() % 2001) - 1000);
      for (double& v : shifted.row(i)) v += shift;
    }
    CHECK(softmax_rows(shifted) == softmax_rows(m));
  }
}

TEST_CASE("layer_norm: examples") {
  const std::vector<double> one2{1.0, 1.0}, zero2{0.0, 0.0};
  const Matrix constant = layer_norm(Matrix(1, 2, 7.5), one2, zero2, 1e-6);
  CHECK(constant(0, 0) == 0.0);
  CHECK(constant(0, 1) == 0.0);

  const Matrix x(1, 2, std::vector<double>{1.0, 3.0});
  const Matrix n = layer_norm(x, one2, zero2, 0.0);
  CHECK(n(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(n(0, 1) == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<double> beta{0.25, -2.0};
  const Matrix shifted = layer_norm(x, one2, beta, 0.0);
  CHECK(shifted(0, 0) == n(0, 0) + beta[0]);
  CHECK(shifted(0, 1) == n(0, 1) + beta[1]);

  CHECK_THROWS_AS(layer_norm(x, std::vector<double>{1.0}, zero2, 0.0), ShapeError);
}

TEST_CASE("layer_norm: zero mean and unit variance before affine (property)") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + rng() % 30;
    const Matrix x = random_matrix(rng, 3, d, 10.0);
    const std::vector<double> g(d, 1.0), b(d, 0.0);
    const Matrix y = layer_norm(x, g, b, 0.0);
    for (std::size_t r = 0; r < 3; ++r) {
      double mean = 0.0, var = 0.0;
      for (double v : y.row(r)) mean += v;
      mean /= static_cast<double>(d);
      for (double v : y.row(r)) var += (v - mean) * (v - mean);
      var /= static_cast<double>(d);
      CHECK(std::abs(mean) < 1e-9);
      CHECK(std::abs(var - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("gelu: examples") {
  CHECK(gelu(0.0) == 0.0);
  CHECK(gelu(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-15));
  CHECK(gelu(10.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(gelu(-10.0) == doctest::Approx(0.0).epsilon(1e-15));
  const Matrix g = gelu(Matrix(1, 2, std::vector<double>{0.0, 1.0}));
  CHECK(g(0, 1) == gelu(1.0));
}
