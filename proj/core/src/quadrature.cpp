#include "djp/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "djp/errors.hpp"

namespace djp {
namespace {

// Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
GaussLegendreRule build_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // Map [-1,1] -> [-1,0]: t = (x-1)/2, weight halved.
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.nodes[i] = (x - 1.0) * 0.5;
    rule.weights[i] = 0.5 * w;
    rule.nodes[n - 1 - i] = (-x - 1.0) * 0.5;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

double integrate_fixed(const std::function<double(double)>& f, int n) {
  const auto& rule = gauss_legendre(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += rule.weights[i] * f(rule.nodes[i]);
  return acc;
}

double integrate_adaptive(const std::function<double(double)>& f, int n0,
                          double rel_tol, int nmax) {
  double prev = integrate_fixed(f, n0);
  for (int n = 2 * n0; n <= nmax; n *= 2) {
    const double cur = integrate_fixed(f, n);
    if (std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur))) {
      return cur;
    }
    prev = cur;
  }
  throw NumericError("quadrature did not converge after node doubling up to " +
                     std::to_string(nmax) + " points");
}

}  // namespace djp
