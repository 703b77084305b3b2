#include "wrmg/basis.hpp"

#include <stdexcept>

namespace wrmg {

namespace {
// Silvester's univariate factor prod_{s<m} (k l - s) / (s + 1) and its derivative.
double silvester(int k, int m, double l) {
  double v = 1.0;
  for (int s = 0; s < m; ++s) v *= (k * l - s) / (s + 1.0);
  return v;
}

double silvester_derivative(int k, int m, double l) {
  double sum = 0.0;
  for (int r = 0; r < m; ++r) {
    double term = k / (r + 1.0);
    for (int s = 0; s < m; ++s)
      if (s != r) term *= (k * l - s) / (s + 1.0);
    sum += term;
  }
  return sum;
}
}  // namespace

LagrangeTriangle::LagrangeTriangle(int degree) : degree_(degree) {
  if (degree < 1) throw std::invalid_argument("LagrangeTriangle: degree must be at least 1");
  const int k = degree;
  nodes_.push_back({k, 0, 0});
  nodes_.push_back({0, k, 0});
  nodes_.push_back({0, 0, k});
  for (int m = 1; m < k; ++m) nodes_.push_back({0, k - m, m});
  for (int m = 1; m < k; ++m) nodes_.push_back({m, 0, k - m});
  for (int m = 1; m < k; ++m) nodes_.push_back({k - m, m, 0});
  for (int a = 1; a < k; ++a)
    for (int b = 1; a + b < k; ++b) nodes_.push_back({a, b, k - a - b});
}

void LagrangeTriangle::values(const std::array<double, 3>& lambda, double* out) const {
  for (int i = 0; i < size(); ++i) {
    const auto& a = nodes_[i];
    out[i] = silvester(degree_, a[0], lambda[0]) * silvester(degree_, a[1], lambda[1]) *
             silvester(degree_, a[2], lambda[2]);
  }
}

void LagrangeTriangle::barycentric_gradients(const std::array<double, 3>& lambda, double* out) const {
  for (int i = 0; i < size(); ++i) {
    const auto& a = nodes_[i];
    const double f0 = silvester(degree_, a[0], lambda[0]);
    const double f1 = silvester(degree_, a[1], lambda[1]);
    const double f2 = silvester(degree_, a[2], lambda[2]);
    out[3 * i + 0] = silvester_derivative(degree_, a[0], lambda[0]) * f1 * f2;
    out[3 * i + 1] = f0 * silvester_derivative(degree_, a[1], lambda[1]) * f2;
    out[3 * i + 2] = f0 * f1 * silvester_derivative(degree_, a[2], lambda[2]);
  }
}

LagrangeInterval::LagrangeInterval(int degree) : degree_(degree) {
  if (degree < 0) throw std::invalid_argument("LagrangeInterval: negative degree");
  if (degree == 0) {
    nodes_ = {0.5};
  } else {
    for (int i = 0; i <= degree; ++i) nodes_.push_back(static_cast<double>(i) / degree);
  }
}

double LagrangeInterval::value(int i, double tau) const {
  double v = 1.0;
  for (int j = 0; j <= degree_; ++j)
    if (j != i) v *= (tau - nodes_[j]) / (nodes_[i] - nodes_[j]);
  return v;
}

double LagrangeInterval::derivative(int i, double tau) const {
  double sum = 0.0;
  for (int r = 0; r <= degree_; ++r) {
    if (r == i) continue;
    double term = 1.0 / (nodes_[i] - nodes_[r]);
    for (int j = 0; j <= degree_; ++j)
      if (j != i && j != r) term *= (tau - nodes_[j]) / (nodes_[i] - nodes_[j]);
    sum += term;
  }
  return sum;
}

}  // namespace wrmg
