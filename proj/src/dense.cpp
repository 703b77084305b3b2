#include "wrmg/dense.hpp"

#include <cmath>

namespace wrmg {

DenseLU DenseLU::factorize(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw std::invalid_argument("DenseLU: matrix must be square and non-empty");
  const double scale = matrix.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(matrix);
  DenseLU out;
  out.lu_ = lu.matrixLU();
  const double min_pivot = out.lu_.diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot >= 1e-14 * scale) || scale == 0.0)
    throw SingularMatrixError("DenseLU: numerically singular matrix");
  // P A = L U; P sends row j to row indices[j].
  const auto& idx = lu.permutationP().indices();
  out.row_of_.resize(matrix.rows());
  for (Eigen::Index j = 0; j < matrix.rows(); ++j) out.row_of_[idx[j]] = static_cast<int>(j);
  return out;
}

void DenseLU::solve_in_place(std::span<double> rhs) const {
  const int n = size();
  thread_local std::vector<double> work;
  work.resize(n);
  for (int i = 0; i < n; ++i) work[i] = rhs[row_of_[i]];
  Eigen::Map<Eigen::VectorXd> x(work.data(), n);
  lu_.triangularView<Eigen::UnitLower>().solveInPlace(x);
  lu_.triangularView<Eigen::Upper>().solveInPlace(x);
  for (int i = 0; i < n; ++i) rhs[i] = work[i];
}

std::vector<double> DenseLU::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

}  // namespace wrmg
