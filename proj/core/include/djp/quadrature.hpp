#pragma once

#include <functional>
#include <vector>

namespace djp {

// Gauss-Legendre rule mapped onto the delay interval [-1,0].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached rule with n points; thread-safe.
const GaussLegendreRule& gauss_legendre(int n);

double integrate_fixed(const std::function<double(double)>& f, int n);

// Node-doubling until successive results agree to rel_tol (relative to
// max(1,|result|)). Throws NumericError if nmax is reached without agreement.
double integrate_adaptive(const std::function<double(double)>& f,
                          int n0 = 64, double rel_tol = 1e-10, int nmax = 4096);

}  // namespace djp
