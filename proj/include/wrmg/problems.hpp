#pragma once

#include <array>
#include <string>

#include "wrmg/forms.hpp"
#include "wrmg/mesh.hpp"

namespace wrmg {

enum class ProblemKind { Heat, Chorin, Cavity };

std::string to_string(ProblemKind kind);
/// Parses "heat", "chorin" or "cavity"; throws std::invalid_argument otherwise.
ProblemKind parse_problem_kind(const std::string& name);

struct ProblemConfig {
  ProblemKind kind = ProblemKind::Heat;
  double reynolds = 1.0;    // Navier-Stokes only
  double t_final = 0.02;
  int num_elements = 20;    // N
  int temporal_degree = 0;  // q
  int spatial_degree = 1;   // k; pressure degree for Navier-Stokes (velocity k+1)
  int mref = 3;
  int base_cells = 10;      // base lattice is base_cells x base_cells

  /// Defaults of each problem: heat and cavity on [0, 0.02] with N = 20,
  /// Chorin on [0, 0.1] with N = 20 and R = 10, cavity with R = 100.
  static ProblemConfig defaults(ProblemKind kind);
  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  bool is_navier_stokes() const { return kind != ProblemKind::Heat; }
};

struct ChorinValue {
  std::array<double, 2> velocity;
  double pressure;
};

enum class ChorinVariant {
  /// (-cos(pi x) sin(pi y), sin(pi x) cos(pi y)) e^{-2 pi^2 t}, pressure
  /// R (pi/4)(cos 2 pi x + cos 2 pi y) e^{-4 pi^2 t}.
  Literal,
  /// The literal vortex translated by (1/2, 1/2) with the velocity negated:
  /// (-sin(pi x) cos(pi y), cos(pi x) sin(pi y)) e^{-2 pi^2 t}. Its normal
  /// component vanishes on every side of the unit square, so it is the
  /// solution of the normal-component-zero boundary value problem.
  BoundaryAligned,
};

ChorinValue chorin_exact(double t, const Point& x, double reynolds, ChorinVariant variant = ChorinVariant::Literal);

/// sin(pi x) + cos(2 pi y)
double heat_initial(const Point& x);

/// Zero velocity on the bottom, left and right walls, (1, 0) on the lid;
/// the two top corners take the wall value (0, 0).
BoundaryConditions cavity_bcs(const SpaceTimeSpace& space);

/// Zero normal velocity: x-velocity on x = 0, 1 and y-velocity on y = 0, 1.
BoundaryConditions chorin_bcs(const SpaceTimeSpace& space);

/// Boundary conditions of `kind` on `space` (natural for heat).
BoundaryConditions problem_bcs(ProblemKind kind, const SpaceTimeSpace& space);

}  // namespace wrmg
