#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace entroprune {

/// Dense row-major matrix of doubles.
///
/// All kernels in this header are pure functions. Summation order inside
/// `matmul` is fixed (k ascending for each output element) so results are
/// bit-reproducible across runs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Throws ShapeError if data.size() != rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

/// Adds `bias` to every row. bias.size() must equal m.cols().
void add_row_vector(Matrix& m, std::span<const double> bias);

/// Row-wise softmax with per-row max subtraction.
Matrix softmax_rows(const Matrix& m);

/// Per-row (per-token) layer normalization: (x - mean) / sqrt(var + eps) * gamma + beta.
Matrix layer_norm(const Matrix& x, std::span<const double> gamma, std::span<const double> beta,
                  double eps = 1e-6);

/// Exact erf-based GELU, elementwise.
Matrix gelu(const Matrix& x);
double gelu(double x);

}  // namespace entroprune
