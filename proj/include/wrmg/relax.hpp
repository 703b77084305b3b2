#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "wrmg/dense.hpp"
#include "wrmg/forms.hpp"
#include "wrmg/krylov.hpp"
#include "wrmg/operator.hpp"

namespace wrmg {

/// Spatial patches (sorted mixed spatial DoF lists, one per mesh vertex),
/// extended over all temporal DoFs when used by the smoother.
class PatchSet {
 public:
  PatchSet() = default;
  explicit PatchSet(std::vector<std::vector<int>> patches) : patches_(std::move(patches)) {}

  int size() const { return static_cast<int>(patches_.size()); }
  const std::vector<int>& patch(int i) const { return patches_[i]; }
  const std::vector<std::vector<int>>& patches() const { return patches_; }

  /// Vertex `v`'s patch, or an empty list when every DoF there is constrained.
  const std::vector<int>& vertex_patch(int v) const { return patches_[v]; }

 private:
  std::vector<std::vector<int>> patches_;  // indexed by vertex; may be empty
};

/// Vertex DoF plus DoFs interior to incident edges and cells (scalar space).
PatchSet build_vertex_star_patches(const SpaceTimeSpace& space, const BoundaryConditions& bcs);
/// Velocity DoFs on the closure of the vertex star, pressure DoFs on the
/// open star (Taylor-Hood space).
PatchSet build_vanka_star_patches(const SpaceTimeSpace& space, const BoundaryConditions& bcs);

/// Additive Schwarz waveform relaxation: each patch system, restricted to
/// all temporal DoFs, is solved exactly by marching over time elements, and
/// the corrections are summed without weights.
class PatchSmoother {
 public:
  PatchSmoother(const SpaceTimeOperator& op, PatchSet patches, int threads = 1, Projector project = {});

  /// z = sum_p R_p^T A_p^{-1} R_p r
  void apply(std::span<const double> r, std::span<double> z) const;
  LinearMap as_map() const;

  const PatchSet& patches() const { return patches_; }
  /// Number of distinct diagonal blocks factorized per patch.
  int num_block_factorizations() const { return static_cast<int>(block_factors_.size()); }
  /// Bytes held by the patch factorizations.
  std::int64_t factor_bytes() const;
  /// Bytes the factorizations of `op` on `patches` would need.
  static std::int64_t estimate_factor_bytes(const SpaceTimeOperator& op, const PatchSet& patches);

 private:
  struct CouplingEntry {
    int row, col;
    double val;
  };
  void solve_patch(int p, std::span<const double> r, std::span<double> z, std::vector<double>& work) const;

  PatchSet patches_;
  int threads_;
  Projector project_;
  int spatial_size_, time_dofs_, block_size_, num_elements_;
  std::vector<int> block_of_element_;                  // time element -> distinct block index
  std::vector<std::vector<DenseLU>> block_factors_;    // [distinct block][patch]
  std::vector<std::vector<CouplingEntry>> coupling_;   // [patch]
};

/// Chebyshev interval for the smoother-preconditioned operator.
struct ChebyshevParams {
  double lambda_max = 1.0;
  double lower = 0.25;
  double upper = 1.05;
  int degree = 2;
  bool estimate_breakdown = false;
  int estimate_steps = 0;

  /// Interval [lower_factor * lambda, upper_factor * lambda]; degenerate
  /// intervals are widened to lambda * [1 - eps, 1 + eps].
  static ChebyshevParams from_interval(double lower, double upper, int degree = 2);
  static ChebyshevParams from_lambda(double lambda, double lower_factor = 0.25, double upper_factor = 1.05,
                                     int degree = 2);
  static constexpr double kDegenerateWidth = 1e-2;
};

/// 50-step Arnoldi on A M from a seeded random vector; lambda = largest
/// Ritz value modulus, interval [0.25 lambda, 1.05 lambda].
ChebyshevParams estimate_lambda_max(const LinearMap& op, const LinearMap& sweep, std::int64_t size,
                                    std::uint64_t seed = 0, int steps = 50, const Projector& project = {},
                                    double lower_factor = 0.25, double upper_factor = 1.05);

/// Chebyshev iteration of the given degree for A e = r from e = 0, with the
/// sweep as preconditioner.
void chebyshev_smooth(const LinearMap& op, const LinearMap& sweep, const ChebyshevParams& params,
                      std::span<const double> r, std::span<double> e, const Projector& project = {});

}  // namespace wrmg
