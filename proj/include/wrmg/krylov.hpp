#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wrmg {

/// out = Op(in); `in` and `out` never alias.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;
/// In-place projection onto a subspace (e.g. removing a null space).
using Projector = std::function<void(std::span<double>)>;

struct KrylovConfig {
  double rtol = 1e-6;
  double atol = 1e-6;
  int max_iterations = 200;
  int restart = 0;  // 0 = never restart
};

enum class KrylovStatus { converged, max_iterations, breakdown };

const char* to_string(KrylovStatus s);

struct KrylovResult {
  KrylovStatus status = KrylovStatus::converged;
  int iterations = 0;
  std::vector<double> residual_history;  // ||r_0||, ||r_1||, ...
  bool converged() const { return status == KrylovStatus::converged; }
};

/// Right-preconditioned flexible GMRES. `x` holds the initial guess on entry
/// and the solution on exit; the update is formed from the stored
/// preconditioned vectors. Stops once ||r|| <= max(rtol ||r_0||, atol).
KrylovResult fgmres(const LinearMap& op, const LinearMap& precond, std::span<const double> b, std::span<double> x,
                    const KrylovConfig& cfg, const Projector& project = {});

struct ArnoldiResult {
  Eigen::MatrixXd hessenberg;  // steps x steps leading block
  int steps = 0;
  bool breakdown = false;
};

/// Arnoldi process for op * precond started from `start`.
ArnoldiResult preconditioned_arnoldi(const LinearMap& op, const LinearMap& precond, std::span<const double> start,
                                     int max_steps, const Projector& project = {});

double norm2(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace wrmg
