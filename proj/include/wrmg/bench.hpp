#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "wrmg/problems.hpp"
#include "wrmg/spaces.hpp"

namespace wrmg {

enum class SolverMode { wrmg, direct, timestep };

std::string to_string(SolverMode mode);
/// Parses "wrmg", "direct" or "timestep"; throws std::invalid_argument otherwise.
SolverMode parse_solver_mode(const std::string& name);

struct RunConfig {
  ProblemConfig problem;
  SolverMode solver = SolverMode::wrmg;
  double rtol = 1e-6;  // linear solves of the heat problem
  double atol = 1e-6;
  double newton_rtol = 1e-8;
  int max_it = 200;  // FGMRES iterations per linear solve
  int max_newton = 25;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Storage budget for solver setup; -1 uses 80% of the available memory,
  /// 0 disables the check.
  std::int64_t memory_limit_bytes = -1;

  void validate() const;
};

/// Machine-readable record of one run.
struct SolveReport {
  static constexpr int kVersion = 1;
  int version = kVersion;

  // configuration echo
  std::string problem;
  int q = 0;
  int k = 1;
  int mref = 0;
  int nt = 1;
  double t_final = 0.0;
  double reynolds = 0.0;
  std::string solver;
  double rtol = 0.0;
  double atol = 0.0;
  double newton_rtol = 0.0;
  int max_it = 0;
  std::uint64_t seed = 0;
  int threads = 1;

  std::int64_t dofs = 0;
  std::int64_t nnz = 0;         // extruded space-time pattern
  std::int64_t nnz_stored = 0;  // entries held by the block operator

  int newton_iterations = 0;  // total over all nonlinear solves
  int linear_iterations = 0;  // total over all linear solves
  std::vector<int> newton_per_step;  // one entry per nonlinear solve (time step in timestep mode)
  std::vector<int> linear_per_step;  // per Newton step, or per time step in timestep mode
  std::vector<std::vector<double>> nonlinear_histories;  // one per nonlinear solve
  std::vector<std::vector<double>> linear_histories;     // one per linear solve
  std::optional<double> error_l2;
  std::vector<std::vector<double>> lambdas;  // per setup, per smoothed level
  double wall_seconds = 0.0;
  std::string status;  // "converged" or "failed: <reason>"

  bool converged() const { return status == "converged"; }
  bool operator==(const SolveReport&) const = default;
};

nlohmann::json to_json(const SolveReport& report);
SolveReport report_from_json(const nlohmann::json& j);

struct RunOutput {
  SolveReport report;
  std::vector<double> state;
  std::shared_ptr<const SpaceTimeSpace> space;
};

/// Builds the hierarchy, runs the selected solver and fills the report.
/// Solver failures are reported through `report.status`, not thrown.
RunOutput run(const RunConfig& config);

/// Writes `report` as JSON to `path` (through a temporary file and rename).
void write_report(const SolveReport& report, const std::filesystem::path& path);

/// Known iteration counts, errors and sizes for one configuration.
struct ReferenceValues {
  std::optional<int> newton;
  std::optional<int> linear;
  std::optional<double> error_l2;
  std::optional<double> dofs;
  std::optional<double> nnz;
};

struct SweepCell {
  RunConfig config;
  ReferenceValues reference;
};

/// Axis overrides for a named sweep; an unset axis keeps the sweep's grid.
struct SweepOverrides {
  std::optional<std::vector<int>> q, k, mref, nt;
  std::optional<std::vector<double>> reynolds;
};

/// Sweep names: heat-mref3, heat-mref4, chorin, cavity.
std::vector<std::string> sweep_names();
/// Grid of configurations of a named sweep; `base` supplies solver settings.
std::vector<SweepCell> sweep_cells(const std::string& name, const RunConfig& base, const SweepOverrides& overrides);

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SolveReport> reports;
};

/// Runs every cell (failures recorded per cell). With a non-empty
/// `out_dir`, writes one JSON report per cell and summary.csv.
SweepResult run_sweep(const std::vector<SweepCell>& cells, const std::filesystem::path& out_dir);
/// CSV with one row per cell: configuration, measured and reference values.
std::string sweep_csv(const SweepResult& result);
/// Fixed-width measured-versus-reference table.
std::string sweep_table(const SweepResult& result);

/// Values of every field at time t on an n x n lattice of the unit square.
/// Rows are x, y, field values.
std::vector<std::vector<double>> sample_lattice(const SpaceTimeSpace& space, std::span<const double> state, double t,
                                                int n);

/// One delimiter-separated file per time, named <prefix>_t<time>.csv.
/// Returns the written paths; throws std::runtime_error on unwritable paths.
std::vector<std::filesystem::path> export_snapshots(std::span<const double> state, const SpaceTimeSpace& space,
                                                    const std::vector<double>& times,
                                                    const std::filesystem::path& prefix, int lattice = 21);

}  // namespace wrmg
