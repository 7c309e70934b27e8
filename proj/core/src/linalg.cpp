#include "djp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "djp/errors.hpp"

namespace djp {

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::transposed() const {
  Mat t(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Mat operator*(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw NumericError("matrix product shape mismatch");
  Mat r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const double v = x(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) r(i, j) += v * y(k, j);
    }
  return r;
}

Vec mat_vec(const Mat& m, const Vec& v) {
  Vec r(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r[i] += m(i, j) * v[j];
  return r;
}

double max_abs_diff(const Mat& x, const Mat& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.a.size(); ++i)
    d = std::max(d, std::abs(x.a[i] - y.a[i]));
  return d;
}

SymmetricEigen symmetric_eigen(const Mat& m) {
  if (m.rows != m.cols) throw NumericError("symmetric_eigen: square matrix required");
  const int n = m.rows;
  Mat a = m;
  Mat v = Mat::identity(n);

  double norm = 0.0;
  for (double x : a.a) norm += x * x;
  norm = std::sqrt(norm);
  const double tol = (norm > 0 ? norm : 1.0) * 1e-15;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= tol) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) <= tol * 1e-2) continue;
        const double apq = a(p, q);
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a(i, i) > a(j, j); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Mat(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

Mat psd_factor(const Mat& m) {
  const SymmetricEigen e = symmetric_eigen(m);
  const int n = m.rows;
  Mat f(n, n);
  for (int j = 0; j < n; ++j) {
    const double lam = std::max(e.values[j], 0.0);
    const double s = std::sqrt(lam);
    for (int i = 0; i < n; ++i) f(i, j) = e.vectors(i, j) * s;
  }
  return f;
}

}  // namespace djp
