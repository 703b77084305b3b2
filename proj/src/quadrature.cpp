#include "wrmg/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace wrmg {

namespace {
// (P_n(x), P_n'(x)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}
}  // namespace

IntervalRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  IntervalRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    // ascending order on [0,1]
    rule.points[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

IntervalRule interval_rule(int degree) {
  if (degree < 0 || degree > 20) throw std::invalid_argument("interval_rule: unsupported degree");
  return gauss_legendre(degree / 2 + 1);
}

TriangleRule triangle_rule(int degree) {
  if (degree < 0 || degree > 12) throw std::invalid_argument("triangle_rule: unsupported degree");
  // x = u, y = v (1 - u); the Jacobian (1 - u) raises the u-degree by one.
  const IntervalRule gu = gauss_legendre((degree + 1) / 2 + 1);
  const IntervalRule gv = gauss_legendre(degree / 2 + 1);
  TriangleRule rule;
  rule.points.reserve(gu.size() * gv.size());
  rule.weights.reserve(gu.size() * gv.size());
  for (int i = 0; i < gu.size(); ++i) {
    for (int j = 0; j < gv.size(); ++j) {
      const double u = gu.points[i];
      const double v = gv.points[j];
      rule.points.push_back({u, v * (1.0 - u)});
      rule.weights.push_back(gu.weights[i] * gv.weights[j] * (1.0 - u));
    }
  }
  return rule;
}

}  // namespace wrmg
