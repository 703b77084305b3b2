#pragma once

#include <memory>
#include <span>
#include <vector>

#include "wrmg/operator.hpp"

namespace wrmg {

/// Exact solver for block lower bidiagonal space-time systems by forward
/// marching over time elements. Each distinct diagonal block is factorized
/// once (dense LU for small blocks, sparse LU otherwise).
///
/// `pinned` lists block-local indices whose rows and columns are replaced by
/// the identity with zero right-hand side in every block; this removes a
/// known null space (e.g. one pressure DoF per temporal node).
class BlockTriangularSolver {
 public:
  explicit BlockTriangularSolver(const SpaceTimeOperator& op, std::vector<int> pinned = {});
  ~BlockTriangularSolver();
  BlockTriangularSolver(BlockTriangularSolver&&) noexcept;
  BlockTriangularSolver& operator=(BlockTriangularSolver&&) noexcept;

  void solve(std::span<const double> rhs, std::span<double> x) const;
  int num_factorizations() const;

  /// Blocks up to this size use dense LU.
  static constexpr int kDenseLimit = 600;

  struct Factor;

 private:
  int block_size_ = 0;
  std::vector<int> pinned_;
  std::shared_ptr<const CsrMatrix> coupling_;
  std::vector<std::shared_ptr<const Factor>> factors_;
};

std::vector<double> block_triangular_direct_solve(const SpaceTimeOperator& op, std::span<const double> rhs,
                                                  std::vector<int> pinned = {});

}  // namespace wrmg
