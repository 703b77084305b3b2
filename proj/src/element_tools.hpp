#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "wrmg/basis.hpp"
#include "wrmg/mesh.hpp"
#include "wrmg/quadrature.hpp"

namespace wrmg::detail {

/// Basis values and barycentric derivatives at the points of a triangle rule.
struct Tabulation {
  int nbasis = 0;
  int npoints = 0;
  std::vector<double> value;  // [p * nbasis + i]
  std::vector<double> dbary;  // [(p * nbasis + i) * 3 + j]

  double v(int p, int i) const { return value[p * nbasis + i]; }
  const double* d(int p, int i) const { return &dbary[(static_cast<std::size_t>(p) * nbasis + i) * 3]; }
};

inline std::array<double, 3> reference_to_barycentric(const Point& xi) { return {1.0 - xi.x - xi.y, xi.x, xi.y}; }

inline Tabulation tabulate(const LagrangeTriangle& basis, const TriangleRule& rule) {
  Tabulation t;
  t.nbasis = basis.size();
  t.npoints = rule.size();
  t.value.resize(static_cast<std::size_t>(t.nbasis) * t.npoints);
  t.dbary.resize(static_cast<std::size_t>(t.nbasis) * t.npoints * 3);
  for (int p = 0; p < t.npoints; ++p) {
    const auto lam = reference_to_barycentric(rule.points[p]);
    basis.values(lam, &t.value[static_cast<std::size_t>(p) * t.nbasis]);
    basis.barycentric_gradients(lam, &t.dbary[static_cast<std::size_t>(p) * t.nbasis * 3]);
  }
  return t;
}

/// Affine map of one cell: |det J| and the gradients of the barycentric coordinates.
struct CellGeometry {
  double abs_det = 0.0;
  double grad[3][2] = {};
  Point v0, e1, e2;

  CellGeometry(const MeshLevel& mesh, int c) {
    const auto& cell = mesh.cell(c);
    v0 = mesh.vertices()[cell[0]];
    const Point& v1 = mesh.vertices()[cell[1]];
    const Point& v2 = mesh.vertices()[cell[2]];
    e1 = {v1.x - v0.x, v1.y - v0.y};
    e2 = {v2.x - v0.x, v2.y - v0.y};
    const double det = e1.x * e2.y - e2.x * e1.y;
    abs_det = std::abs(det);
    grad[1][0] = e2.y / det;
    grad[1][1] = -e2.x / det;
    grad[2][0] = -e1.y / det;
    grad[2][1] = e1.x / det;
    grad[0][0] = -grad[1][0] - grad[2][0];
    grad[0][1] = -grad[1][1] - grad[2][1];
  }

  Point map(const Point& xi) const { return {v0.x + xi.x * e1.x + xi.y * e2.x, v0.y + xi.x * e1.y + xi.y * e2.y}; }

  /// Physical gradient from barycentric derivatives db[0..2].
  void gradient(const double* db, double& gx, double& gy) const {
    gx = db[0] * grad[0][0] + db[1] * grad[1][0] + db[2] * grad[2][0];
    gy = db[0] * grad[0][1] + db[1] * grad[1][1] + db[2] * grad[2][1];
  }
};

}  // namespace wrmg::detail
