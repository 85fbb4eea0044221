#include "entroprune/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "entroprune/errors.hpp"

namespace entroprune {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix data length " + std::to_string(data_.size()) + " does not match " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + dims(a) + " x " + dims(b));
  }
  const std::size_t n = a.rows(), inner = a.cols(), m = b.cols();
  Matrix c(a.rows(), b.cols());
  // Tiled i-k-j order. Tiles of k are visited in ascending order and k runs
  // ascending inside a tile, so each c(i, j) accumulates over k = 0, 1, ...
  // in sequence, same as the textbook loop. The tiles keep a block of b in
  // cache while every row of a streams past it.
  constexpr std::size_t kTileK = 64, kTileJ = 256;
  for (std::size_t j0 = 0; j0 < m; j0 += kTileJ) {
    const std::size_t j1 = std::min(m, j0 + kTileJ);
    for (std::size_t k0 = 0; k0 < inner; k0 += kTileK) {
      const std::size_t k1 = std::min(inner, k0 + kTileK);
      for (std::size_t i = 0; i < n; ++i) {
        double* crow = c.row(i).data();
        const double* arow = a.row(i).data();
        for (std::size_t k = k0; k < k1; ++k) {
          const double aik = arow[k];
          const double* brow = b.row(k).data();
          for (std::size_t j = j0; j < j1; ++j) crow[j] += aik * brow[j];
        }
      }
    }
  }
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
  return t;
}

void add_row_vector(Matrix& m, std::span<const double> bias) {
  if (bias.size() != m.cols()) {
    throw ShapeError("bias length " + std::to_string(bias.size()) + " vs " + dims(m));
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias[c];
  }
}

Matrix softmax_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto in = m.row(r);
    auto dst = out.row(r);
    if (in.empty()) continue;
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      dst[c] = std::exp(in[c] - mx);
      sum += dst[c];
    }
    for (double& v : dst) v /= sum;
  }
  return out;
}

Matrix layer_norm(const Matrix& x, std::span<const double> gamma, std::span<const double> beta,
                  double eps) {
  if (gamma.size() != x.cols() || beta.size() != x.cols()) {
    throw ShapeError("layer_norm: affine length " + std::to_string(gamma.size()) + "/" +
                     std::to_string(beta.size()) + " vs feature dim " + std::to_string(x.cols()));
  }
  Matrix out(x.rows(), x.cols());
  const double d = static_cast<double>(x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto in = x.row(r);
    auto dst = out.row(r);
    double mean = 0.0;
    for (double v : in) mean += v;
    mean /= d;
    double var = 0.0;
    for (double v : in) var += (v - mean) * (v - mean);
    var /= d;
    const double denom = std::sqrt(var + eps);
    for (std::size_t c = 0; c < in.size(); ++c) {
      // Zero variance with eps = 0 would divide 0 by 0; the centered value is exactly 0.
      const double centered = in[c] - mean;
      const double normed = denom > 0.0 ? centered / denom : 0.0;
      dst[c] = normed * gamma[c] + beta[c];
    }
  }
  return out;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

Matrix gelu(const Matrix& x) {
  Matrix out = x;
  for (double& v : out.data()) v = gelu(v);
  return out;
}

}  // namespace entroprune
