#pragma once

#include <array>
#include <vector>

#include "wrmg/mesh.hpp"

namespace wrmg {

/// Equispaced Lagrange basis of degree k on a triangle, written in
/// barycentric coordinates. Node `i` sits at lattice index `node(i)`
/// (three non-negative integers summing to k, one per cell vertex).
class LagrangeTriangle {
 public:
  explicit LagrangeTriangle(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::array<int, 3>& node(int i) const { return nodes_[i]; }

  /// Values of every basis function at barycentric point `lambda`.
  void values(const std::array<double, 3>& lambda, double* out) const;
  /// Derivatives with respect to each barycentric coordinate, laid out
  /// as out[3 * i + j] = d phi_i / d lambda_j.
  void barycentric_gradients(const std::array<double, 3>& lambda, double* out) const;

 private:
  int degree_;
  std::vector<std::array<int, 3>> nodes_;
};

/// Equispaced nodal basis of degree q on the reference interval [0, 1].
/// Degree zero uses the single node 1/2.
class LagrangeInterval {
 public:
  explicit LagrangeInterval(int degree);

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }
  double node(int i) const { return nodes_[i]; }

  double value(int i, double tau) const;
  double derivative(int i, double tau) const;

 private:
  int degree_;
  std::vector<double> nodes_;
};

}  // namespace wrmg
