#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wrmg/operator.hpp"
#include "wrmg/spaces.hpp"
#include "wrmg/sparse.hpp"

namespace wrmg {

/// Strong constraints on mixed spatial DoFs, imposed identically at every
/// temporal DoF.
struct BoundaryConditions {
  std::vector<char> constrained;  // indexed by mixed spatial DoF
  std::vector<double> value;
  /// Pressure is determined only up to a constant at each temporal node.
  bool pressure_nullspace = false;

  int num_constrained() const;
  bool is_constrained(int i) const { return constrained[i] != 0; }
};

/// Natural (do-nothing) conditions everywhere: nothing constrained.
BoundaryConditions natural_bcs(const SpaceTimeSpace& space);

/// Space-time weak forms on one level: upwind DG in time, continuous
/// Lagrange in space. Scalar spaces give the heat operator; Taylor-Hood
/// spaces give the Navier-Stokes residual and Jacobian.
///
/// Time-independent spatial matrices (mass, stiffness, pressure coupling)
/// and the corresponding linear diagonal block are assembled once at
/// construction.
class SpaceTimeForms {
 public:
  SpaceTimeForms(std::shared_ptr<const SpaceTimeSpace> space, BoundaryConditions bcs, int threads = 1);

  const SpaceTimeSpace& space() const { return *space_; }
  const std::shared_ptr<const SpaceTimeSpace>& space_ptr() const { return space_; }
  const BoundaryConditions& bcs() const { return bcs_; }
  bool is_navier_stokes() const { return space_->num_fields() == 3; }

  /// Mixed spatial sparsity shared by every assembled matrix.
  const CsrMatrix& spatial_pattern() const { return pattern_; }
  /// Velocity (or scalar) mass matrix on the spatial pattern.
  const CsrMatrix& mass() const { return mass_; }
  /// Viscous/diffusive stiffness plus, for Navier-Stokes, both pressure couplings.
  const CsrMatrix& stationary() const { return stationary_; }

  /// Temporal reference matrices on [0,1]: mass, advection (int phi_b' phi_a)
  /// and the end-point traces.
  const Eigen::MatrixXd& temporal_mass() const { return temporal_mass_; }
  const Eigen::MatrixXd& temporal_advection() const { return temporal_advection_; }

  /// Heat operator (all time blocks shared) and right-hand side carrying the
  /// initial jump t0 (x) M u0.
  SpaceTimeOperator heat_operator() const;
  std::vector<double> initial_jump_rhs(std::span<const double> initial) const;

  /// Weak residual of the space-time Navier-Stokes system at `state`, with
  /// the velocity part of `initial` (a mixed spatial vector) as U_0^-.
  /// Constrained rows are zero.
  std::vector<double> ns_residual(std::span<const double> state, std::span<const double> initial,
                                  double reynolds) const;

  /// Newton Jacobian at `state`; constrained rows and columns are replaced
  /// by the identity.
  SpaceTimeOperator ns_jacobian(std::span<const double> state, double reynolds) const;

  /// Linear-system form of the constraints: identity rows and columns, with
  /// the eliminated columns moved into `rhs` and boundary values imposed at
  /// every temporal DoF. Returns `op` unchanged when nothing is constrained.
  SpaceTimeOperator apply_dirichlet(const SpaceTimeOperator& op, std::span<double> rhs) const;

  /// Sets constrained entries of a space-time vector to the boundary values.
  void apply_dirichlet_values(std::span<double> state) const;
  /// Zeros constrained entries (residuals and corrections).
  void zero_constrained(std::span<double> v) const;

  /// Block-local indices of one pressure DoF per temporal node, used to pin
  /// the pressure null space in direct factorizations.
  std::vector<int> pressure_pins() const;
  /// Removes the mean of the pressure coefficients at each temporal node.
  void project_pressure(std::span<double> v) const;

 private:
  void build_pattern();
  void assemble_spatial();
  void build_linear_blocks();
  void convection_element(int n, std::span<const double> state, double reynolds, std::span<double> residual,
                          CsrMatrix* block) const;
  CsrMatrix constrained_copy(const CsrMatrix& block, bool diagonal) const;

  std::shared_ptr<const SpaceTimeSpace> space_;
  BoundaryConditions bcs_;
  int threads_;

  int local_size_ = 0;                  // mixed DoFs per cell
  std::vector<int> local_field_offset_;  // field offsets within the cell
  std::vector<int> cell_map_;            // cell -> mixed spatial DoFs
  std::vector<int> cell_offsets_;        // cell -> column offset within each pattern row
  std::vector<char> mass_structure_;     // pattern entries coupling a field with itself (velocity/scalar)
  std::vector<int> constrained_list_;

  CsrMatrix pattern_, mass_, stationary_;
  Eigen::MatrixXd temporal_mass_, temporal_advection_;
  std::vector<double> start_trace_, end_trace_;

  std::shared_ptr<const CsrMatrix> linear_block_;        // unconstrained
  std::shared_ptr<const CsrMatrix> coupling_;            // unconstrained
  std::shared_ptr<const CsrMatrix> coupling_constrained_;
};

// Free-function entry points mirroring the operations above.

std::pair<SpaceTimeOperator, std::vector<double>> assemble_heat(std::shared_ptr<const SpaceTimeSpace> space,
                                                                 std::span<const double> u0);
std::vector<double> assemble_ns_residual(const SpaceTimeForms& forms, std::span<const double> state,
                                         std::span<const double> initial, double reynolds);
SpaceTimeOperator assemble_ns_jacobian(const SpaceTimeForms& forms, std::span<const double> state, double reynolds);

/// Scalar closed-form field f(t, x).
using ScalarField = std::function<double(double, const Point&)>;
/// Vector closed-form field writing one value per requested field.
using MixedField = std::function<void(double, const Point&, std::span<double>)>;

/// Nodal interpolation of `f` at time `t` onto field `f_index`, written into
/// the mixed spatial vector `out`.
void interpolate_field(const SpaceTimeSpace& space, int field, const ScalarField& f, double t,
                       std::span<double> out);

/// Mixed spatial vector interpolating `f` (all fields of `fields`) at time t.
std::vector<double> interpolate_initial(const SpaceTimeSpace& space, const std::vector<int>& fields,
                                        const MixedField& f, double t = 0.0);

/// Space-time nodal interpolant of a closed-form solution.
std::vector<double> interpolate_spacetime(const SpaceTimeSpace& space, const std::vector<int>& fields,
                                          const MixedField& f);

/// sqrt(int_0^T int_Omega sum_f |U_f - u_f|^2), over the listed fields.
double spacetime_l2_error(const SpaceTimeSpace& space, std::span<const double> state,
                          const std::vector<int>& fields, const MixedField& exact);

}  // namespace wrmg
