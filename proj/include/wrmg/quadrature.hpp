#pragma once

#include <vector>

#include "wrmg/mesh.hpp"

namespace wrmg {

struct IntervalRule {
  std::vector<double> points;  // on [0, 1]
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

struct TriangleRule {
  std::vector<Point> points;  // on the reference triangle (0,0), (1,0), (0,1)
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

/// n-point Gauss-Legendre rule mapped to [0, 1].
IntervalRule gauss_legendre(int n);

/// Gauss-Legendre rule on [0, 1] exact for polynomials of degree `degree` (<= 20).
IntervalRule interval_rule(int degree);

/// Collapsed (Duffy) tensor Gauss rule on the reference triangle, exact for
/// polynomials of total degree `degree` (<= 12).
TriangleRule triangle_rule(int degree);

}  // namespace wrmg
