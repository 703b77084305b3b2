#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wrmg/direct.hpp"
#include "wrmg/forms.hpp"
#include "wrmg/krylov.hpp"
#include "wrmg/problems.hpp"
#include "wrmg/relax.hpp"
#include "wrmg/transfer.hpp"

namespace wrmg {

struct MgOptions {
  int threads = 1;
  std::uint64_t seed = 0;
  int eig_steps = 50;
  double cheb_lower = 0.25;
  double cheb_upper = 1.05;
  int cheb_degree = 2;
  /// Upper bound on operator plus factorization storage; 0 disables the check.
  std::int64_t memory_limit_bytes = 0;
};

/// Thrown before setup when the estimated storage exceeds the configured limit.
class MemoryLimitError : public std::runtime_error {
 public:
  MemoryLimitError(std::int64_t needed, std::int64_t limit);
  std::int64_t needed() const { return needed_; }
  std::int64_t limit() const { return limit_; }

 private:
  std::int64_t needed_, limit_;
};

/// Space-time multigrid hierarchy with spatial-only coarsening. Level 0 is
/// the coarsest. The discretization on every level is fixed; operators are
/// installed (and smoothers rebuilt) through set_operators.
class MgHierarchy {
 public:
  MgHierarchy(std::vector<std::shared_ptr<const SpaceTimeForms>> levels, MgOptions options = {});

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const SpaceTimeForms& forms(int l) const { return *levels_[l]; }
  const SpaceTimeForms& finest() const { return *levels_.back(); }
  /// Transfer between level l-1 and level l (l >= 1), in correction mode.
  const TransferPair& transfer(int l) const { return *transfers_[l]; }
  const MgOptions& options() const { return options_; }
  const PatchSet& patches(int l) const { return patches_[l]; }

  /// Estimated bytes for all level operators, patch factorizations and the
  /// coarse factorization. `distinct_blocks` is false when every time
  /// element shares one diagonal block (linear problems).
  std::int64_t estimate_setup_bytes(bool distinct_blocks) const;
  /// Throws MemoryLimitError when the estimate exceeds the configured limit.
  void check_memory(bool distinct_blocks) const;

  /// Installs one operator per level (coarse to fine); rebuilds the patch
  /// smoothers, Chebyshev intervals and the coarsest-level factorization.
  void set_operators(std::vector<SpaceTimeOperator> ops);
  void clear_operators();
  bool has_operators() const { return !ops_.empty(); }
  const SpaceTimeOperator& op(int l) const { return ops_[l]; }
  const ChebyshevParams& chebyshev(int l) const { return cheb_[l]; }
  /// Largest-eigenvalue estimates of the smoothed levels (level 1 upwards).
  std::vector<double> lambdas() const;

  /// x = V-cycle(level, rhs) from a zero initial guess.
  void v_cycle(int level, std::span<const double> rhs, std::span<double> x) const;
  LinearMap preconditioner() const;
  /// Pressure null-space projector of level l (no-op for scalar problems).
  Projector projector(int l) const;

  /// States on every level (coarse to fine) by injection from the finest.
  std::vector<std::vector<double>> inject_state(std::span<const double> fine) const;

 private:
  std::vector<std::shared_ptr<const SpaceTimeForms>> levels_;
  std::vector<std::unique_ptr<TransferPair>> transfers_;
  std::vector<PatchSet> patches_;
  MgOptions options_;
  std::vector<SpaceTimeOperator> ops_;
  std::vector<std::unique_ptr<PatchSmoother>> smoothers_;
  std::vector<ChebyshevParams> cheb_;
  std::unique_ptr<BlockTriangularSolver> coarse_;
};

/// Forms for every mesh in `meshes` (coarse to fine) for the given problem.
std::vector<std::shared_ptr<const SpaceTimeForms>> build_level_forms(
    ProblemKind kind, const std::vector<std::shared_ptr<const MeshLevel>>& meshes, int spatial_degree,
    const TemporalSpace& temporal, int threads = 1);

struct LinearSolveResult {
  std::vector<double> solution;
  KrylovResult krylov;
};

/// FGMRES preconditioned by one V-cycle per iteration on the installed operators.
LinearSolveResult solve_linear_wrmg(const MgHierarchy& hier, std::span<const double> rhs, const KrylovConfig& cfg);

enum class LinearSolverKind { wrmg, direct };

struct NewtonConfig {
  double rtol = 1e-8;
  int max_iterations = 25;
  double eta0 = 0.3;
  double gamma = 1.0;
  double alpha = 1.6180339887498949;  // (1 + sqrt 5) / 2
  double eta_max = 0.9;
  double linear_atol = 1e-12;
  int max_linear_iterations = 200;
  LinearSolverKind linear = LinearSolverKind::wrmg;
};

struct NewtonResult {
  std::vector<double> state;
  bool converged = false;
  std::string status;
  int iterations = 0;
  std::vector<double> residual_history;              // ||F_0||, ||F_1||, ...
  std::vector<double> forcing_terms;                 // eta_k per step
  std::vector<int> linear_iterations;                // per Newton step
  std::vector<std::vector<double>> linear_histories;  // per Newton step
  std::vector<std::vector<double>> lambdas;          // per Newton step, per smoothed level
  int total_linear_iterations() const;
};

/// Eisenstat-Walker choice 2 forcing term for step k >= 1.
double eisenstat_walker(const NewtonConfig& cfg, double norm, double previous_norm, double previous_eta);

/// Inexact Newton with full steps on the space-time Navier-Stokes residual
/// of the hierarchy's finest level.
NewtonResult solve_newton(MgHierarchy& hier, std::span<const double> initial, double reynolds,
                          std::vector<double> guess, const NewtonConfig& cfg);

/// Newton initial guess: the initial velocity copied to every temporal DoF,
/// with boundary values imposed.
std::vector<double> newton_initial_guess(const SpaceTimeForms& forms, std::span<const double> initial);

/// End-of-element trace of time element n (a mixed spatial vector).
std::vector<double> end_trace(const SpaceTimeSpace& space, std::span<const double> state, int n);

struct TimesteppingResult {
  std::vector<double> state;  // full space-time vector
  bool converged = true;
  std::string status = "converged";
  std::vector<int> newton_iterations;  // per time element (0 for linear problems)
  std::vector<int> linear_iterations;  // per time element
  std::vector<std::vector<double>> linear_histories;     // one per linear solve
  std::vector<std::vector<double>> nonlinear_histories;  // one per time element (nonlinear problems)
  std::vector<double> lambdas;  // from the first element
};

/// Sequential solve over time elements, each element an all-at-once solve on
/// one element with the same multigrid ingredients. `step_hier` must be
/// built on a single-element temporal space of the same step length.
TimesteppingResult solve_timestepping(MgHierarchy& step_hier, const SpaceTimeSpace& full_space, ProblemKind kind,
                                      std::span<const double> initial, double reynolds, const KrylovConfig& linear_cfg,
                                      const NewtonConfig& newton_cfg);

}  // namespace wrmg
