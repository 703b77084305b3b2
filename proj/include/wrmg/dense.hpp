#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace wrmg {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Partial-pivoted LU of a small dense matrix.
class DenseLU {
 public:
  DenseLU() = default;

  /// Throws SingularMatrixError when a pivot falls below 1e-14 times the
  /// largest absolute row sum of `matrix`.
  static DenseLU factorize(const Eigen::MatrixXd& matrix);

  int size() const { return static_cast<int>(lu_.rows()); }
  void solve_in_place(std::span<double> rhs) const;
  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  Eigen::MatrixXd lu_;
  std::vector<int> row_of_;  // pivoted row order
};

inline DenseLU dense_factorize(const Eigen::MatrixXd& matrix) { return DenseLU::factorize(matrix); }
inline std::vector<double> dense_solve(const DenseLU& fact, std::span<const double> rhs) {
  return fact.solve(rhs);
}

}  // namespace wrmg
