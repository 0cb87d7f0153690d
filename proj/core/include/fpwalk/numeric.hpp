#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fpwalk {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// Closed interval [lower, upper] of reals.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double mid() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
  bool contains(double x, double slack = 0.0) const { return x >= lower - slack && x <= upper + slack; }
};

/// Small dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<double> row(std::size_t i) const;
  std::vector<std::vector<double>> to_rows() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, const std::vector<double>& x);

/// max |a_ij - b_ij|; matrices must share a shape.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Gaussian elimination with partial pivoting. Throws SingularMatrixError
/// when a pivot falls below `pivot_floor` times the largest column entry.
std::vector<double> solve_linear(Matrix a, std::vector<double> b, double pivot_floor = 1e-14);

/// Integer power by repeated multiplication.
Matrix matrix_power(const Matrix& a, int k);

}  // namespace fpwalk
