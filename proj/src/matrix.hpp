#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace aml {

// Dense row-major matrix of doubles. Sized for desk-scale graphs; all the
// heavy products in the model are (n_nodes x d_in) * (d_in x d_out) with
// d <= a few dozen, so plain loops are enough.
class Matrix {
public:
  Matrix() = default;
  Matrix(int64_t rows, int64_t cols)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * static_cast<size_t>(cols), 0.0) {}

  int64_t rows() const { return rows_; }
  int64_t cols() const { return cols_; }

  double &at(int64_t r, int64_t c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double at(int64_t r, int64_t c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  std::span<double> row(int64_t r) {
    return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
  }
  std::span<const double> row(int64_t r) const {
    return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
  }

  double *data() { return data_.data(); }
  const double *data() const { return data_.data(); }
  size_t size() const { return data_.size(); }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  void resize_zeroed(int64_t rows, int64_t cols) {
    rows_ = rows;
    cols_ = cols;
    data_.assign(static_cast<size_t>(rows) * static_cast<size_t>(cols), 0.0);
  }

  bool all_finite() const;

  bool same_shape(const Matrix &o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
  int64_t rows_ = 0;
  int64_t cols_ = 0;
  std::vector<double> data_;
};

// out = a * b
void matmul(const Matrix &a, const Matrix &b, Matrix &out);
// out += a * b
void matmul_acc(const Matrix &a, const Matrix &b, Matrix &out);
// out += a^T * b
void matmul_tn_acc(const Matrix &a, const Matrix &b, Matrix &out);
// out += a * b^T
void matmul_nt_acc(const Matrix &a, const Matrix &b, Matrix &out);

}  // namespace aml
