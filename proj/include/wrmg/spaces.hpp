#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "wrmg/basis.hpp"
#include "wrmg/mesh.hpp"

namespace wrmg {

/// Continuous Lagrange space of degree k on one mesh level.
///
/// Global numbering: vertex DoFs first (DoF v is vertex v), then k-1 DoFs
/// per edge ordered from the lower to the higher vertex index, then the
/// (k-1)(k-2)/2 interior DoFs of each cell.
class ScalarSpatialSpace {
 public:
  ScalarSpatialSpace(std::shared_ptr<const MeshLevel> mesh, int degree);

  const MeshLevel& mesh() const { return *mesh_; }
  const std::shared_ptr<const MeshLevel>& mesh_ptr() const { return mesh_; }
  int degree() const { return basis_.degree(); }
  const LagrangeTriangle& basis() const { return basis_; }

  int num_dofs() const { return num_dofs_; }
  int dofs_per_cell() const { return basis_.size(); }
  std::span<const int> cell_dofs(int c) const {
    return {cell_dofs_.data() + static_cast<std::size_t>(c) * dofs_per_cell(),
            static_cast<std::size_t>(dofs_per_cell())};
  }

  const Point& dof_point(int i) const { return dof_points_[i]; }
  std::uint8_t dof_sides(int i) const { return dof_sides_[i]; }

  int vertex_dof(int v) const { return v; }
  std::vector<int> edge_interior_dofs(int e) const;
  std::vector<int> cell_interior_dofs(int c) const;

  /// DoFs whose side flags intersect `sides`.
  std::vector<int> boundary_dofs(std::uint8_t sides) const;

  /// Evaluates the finite-element function with coefficients `coeffs` at
  /// barycentric point `lambda` of cell `c`.
  double evaluate(std::span<const double> coeffs, int c, const std::array<double, 3>& lambda) const;

  /// Locates a cell containing `p` (linear scan over candidates near the
  /// lattice) and evaluates there.
  double evaluate_at(std::span<const double> coeffs, const Point& p) const;
  int locate(const Point& p) const;

 private:
  std::shared_ptr<const MeshLevel> mesh_;
  LagrangeTriangle basis_;
  int num_dofs_ = 0;
  std::vector<int> cell_dofs_;
  std::vector<Point> dof_points_;
  std::vector<std::uint8_t> dof_sides_;
};

std::shared_ptr<const ScalarSpatialSpace> build_scalar_space(std::shared_ptr<const MeshLevel> mesh,
                                                             int degree);

/// Discontinuous nodal space of degree q on a uniform time partition.
class TemporalSpace {
 public:
  TemporalSpace(TimePartition partition, int degree);

  const TimePartition& partition() const { return partition_; }
  int degree() const { return basis_.degree(); }
  int dofs_per_element() const { return basis_.size(); }
  int num_elements() const { return partition_.num_elements(); }
  int num_dofs() const { return num_elements() * dofs_per_element(); }
  const LagrangeInterval& basis() const { return basis_; }

  /// Basis values at the left (tau = 0) and right (tau = 1) element ends.
  const std::vector<double>& start_trace() const { return start_trace_; }
  const std::vector<double>& end_trace() const { return end_trace_; }

 private:
  TimePartition partition_;
  LagrangeInterval basis_;
  std::vector<double> start_trace_, end_trace_;
};

/// Tensor product of spatial field spaces with a temporal DG space.
///
/// Global index of (time element n, temporal node a, field f, spatial DoF i)
/// is n * block_size() + a * spatial_size() + field_offset(f) + i.
class SpaceTimeSpace {
 public:
  SpaceTimeSpace(std::vector<std::shared_ptr<const ScalarSpatialSpace>> fields, TemporalSpace temporal);

  int num_fields() const { return static_cast<int>(fields_.size()); }
  const ScalarSpatialSpace& field(int f) const { return *fields_[f]; }
  const std::shared_ptr<const ScalarSpatialSpace>& field_ptr(int f) const { return fields_[f]; }
  int field_offset(int f) const { return offsets_[f]; }
  const MeshLevel& mesh() const { return fields_.front()->mesh(); }

  const TemporalSpace& temporal() const { return temporal_; }
  int num_elements() const { return temporal_.num_elements(); }
  int time_dofs_per_element() const { return temporal_.dofs_per_element(); }

  /// Sum of the field dimensions (one temporal node).
  int spatial_size() const { return offsets_.back(); }
  /// Unknowns of one time element.
  int block_size() const { return time_dofs_per_element() * spatial_size(); }
  std::int64_t size() const { return static_cast<std::int64_t>(num_elements()) * block_size(); }

  std::int64_t index(int n, int a, int f, int i) const {
    return static_cast<std::int64_t>(n) * block_size() + static_cast<std::int64_t>(a) * spatial_size() +
           offsets_[f] + i;
  }

  /// Two equal-degree velocity components followed by a pressure field one degree lower.
  bool is_taylor_hood() const;

 private:
  std::vector<std::shared_ptr<const ScalarSpatialSpace>> fields_;
  TemporalSpace temporal_;
  std::vector<int> offsets_;
};

std::shared_ptr<const SpaceTimeSpace> build_spacetime_space(
    std::vector<std::shared_ptr<const ScalarSpatialSpace>> fields, TemporalSpace temporal);

/// Scalar CG(k) space-time space on `mesh`.
std::shared_ptr<const SpaceTimeSpace> make_scalar_spacetime(std::shared_ptr<const MeshLevel> mesh, int k,
                                                            const TemporalSpace& temporal);
/// Taylor-Hood CG(k+1)^2 x CG(k) space-time space on `mesh`.
std::shared_ptr<const SpaceTimeSpace> make_taylor_hood_spacetime(std::shared_ptr<const MeshLevel> mesh,
                                                                 int pressure_degree,
                                                                 const TemporalSpace& temporal);

}  // namespace wrmg
