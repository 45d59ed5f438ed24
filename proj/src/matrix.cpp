#include "matrix.hpp"

#include <cmath>

#include "error.hpp"

namespace aml {

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      return false;
    }
  }
  return true;
}

static void check_mul_shapes(const Matrix &out, int64_t m, int64_t k, int64_t n, int64_t bk,
                             const char *what) {
  if (k != bk || out.rows() != m || out.cols() != n) {
    throw InternalError(std::string("internal-consistency error: shape mismatch in ") + what);
  }
}

void matmul_acc(const Matrix &a, const Matrix &b, Matrix &out) {
  check_mul_shapes(out, a.rows(), a.cols(), b.cols(), b.rows(), "matmul");
  const int64_t m = a.rows(), k = a.cols(), n = b.cols();
  for (int64_t i = 0; i < m; ++i) {
    const double *arow = a.data() + i * k;
    double *orow = out.data() + i * n;
    for (int64_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) {
        continue;
      }
      const double *brow = b.data() + p * n;
      for (int64_t j = 0; j < n; ++j) {
        orow[j] += av * brow[j];
      }
    }
  }
}

void matmul(const Matrix &a, const Matrix &b, Matrix &out) {
  out.resize_zeroed(a.rows(), b.cols());
  matmul_acc(a, b, out);
}

void matmul_tn_acc(const Matrix &a, const Matrix &b, Matrix &out) {
  check_mul_shapes(out, a.cols(), a.rows(), b.cols(), b.rows(), "matmul_tn");
  const int64_t m = a.cols(), k = a.rows(), n = b.cols();
  for (int64_t p = 0; p < k; ++p) {
    const double *arow = a.data() + p * m;
    const double *brow = b.data() + p * n;
    for (int64_t i = 0; i < m; ++i) {
      const double av = arow[i];
      if (av == 0.0) {
        continue;
      }
      double *orow = out.data() + i * n;
      for (int64_t j = 0; j < n; ++j) {
        orow[j] += av * brow[j];
      }
    }
  }
}

void matmul_nt_acc(const Matrix &a, const Matrix &b, Matrix &out) {
  if (a.cols() != b.cols() || out.rows() != a.rows() || out.cols() != b.rows()) {
    throw InternalError("internal-consistency error: shape mismatch in matmul_nt");
  }
  const int64_t m = a.rows(), k = a.cols(), n = b.rows();
  for (int64_t i = 0; i < m; ++i) {
    const double *arow = a.data() + i * k;
    double *orow = out.data() + i * n;
    for (int64_t j = 0; j < n; ++j) {
      const double *brow = b.data() + j * k;
      double acc = 0.0;
      for (int64_t p = 0; p < k; ++p) {
        acc += arow[p] * brow[p];
      }
      orow[j] += acc;
    }
  }
}

}  // namespace aml
