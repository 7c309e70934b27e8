#pragma once

#include <cstddef>
#include <vector>

namespace djp {

using Vec = std::vector<double>;

// Small dense row-major matrix. Dimensions here are the spatial dimension of
// the jump space, so everything stays O(N^2) with tiny N.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  static Mat identity(int n);
  Mat transposed() const;
};

Mat operator*(const Mat& x, const Mat& y);
Vec mat_vec(const Mat& m, const Vec& v);
double max_abs_diff(const Mat& x, const Mat& y);

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues are sorted in decreasing order; `vectors` holds the matching
// eigenvectors as columns. Diagonal input comes back exactly (no rotations),
// which keeps degenerate axes bit-exact.
struct SymmetricEigen {
  Vec values;
  Mat vectors;
};

SymmetricEigen symmetric_eigen(const Mat& m);

// F with F F^T = m for symmetric positive semi-definite m, built from the
// eigen-decomposition with negative round-off eigenvalues clamped to zero.
Mat psd_factor(const Mat& m);

}  // namespace djp
