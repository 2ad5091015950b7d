#pragma once

#include <cstddef>
#include <vector>

namespace sbm {

// Small dense row-major matrix for K x K block quantities.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<double>& data() const { return data_; }

  bool is_symmetric(double tol = 0.0) const {
    if (rows_ != cols_) return false;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = r + 1; c < cols_; ++c) {
        double d = (*this)(r, c) - (*this)(c, r);
        if (d > tol || d < -tol) return false;
      }
    return true;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace sbm
