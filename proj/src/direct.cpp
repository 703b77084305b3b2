#include "wrmg/direct.hpp"

#include <algorithm>
#include <map>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "wrmg/dense.hpp"

namespace wrmg {

struct BlockTriangularSolver::Factor {
  DenseLU dense;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> sparse;

  void solve_in_place(std::span<double> b) const {
    if (!sparse) {
      dense.solve_in_place(b);
      return;
    }
    Eigen::Map<Eigen::VectorXd> v(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd x = sparse->solve(v);
    v = x;
  }
};

namespace {
std::shared_ptr<const BlockTriangularSolver::Factor> factorize_block(const CsrMatrix& a,
                                                                      const std::vector<char>& pinned_mask);
}  // namespace

BlockTriangularSolver::BlockTriangularSolver(const SpaceTimeOperator& op, std::vector<int> pinned)
    : block_size_(op.block_size()), pinned_(std::move(pinned)), coupling_() {
  std::vector<char> mask(block_size_, 0);
  for (int i : pinned_) mask[i] = 1;
  // Coupling shared by pointer through a copy so the solver outlives `op`.
  coupling_ = std::make_shared<const CsrMatrix>(op.coupling());
  std::map<const CsrMatrix*, std::shared_ptr<const Factor>> cache;
  factors_.reserve(op.num_elements());
  for (int n = 0; n < op.num_elements(); ++n) {
    const CsrMatrix* block = op.diagonal_ptr(n).get();
    auto it = cache.find(block);
    if (it == cache.end()) it = cache.emplace(block, factorize_block(*block, mask)).first;
    factors_.push_back(it->second);
  }
}

BlockTriangularSolver::~BlockTriangularSolver() = default;
BlockTriangularSolver::BlockTriangularSolver(BlockTriangularSolver&&) noexcept = default;
BlockTriangularSolver& BlockTriangularSolver::operator=(BlockTriangularSolver&&) noexcept = default;

int BlockTriangularSolver::num_factorizations() const {
  std::vector<const Factor*> distinct;
  for (const auto& f : factors_) distinct.push_back(f.get());
  std::sort(distinct.begin(), distinct.end());
  return static_cast<int>(std::unique(distinct.begin(), distinct.end()) - distinct.begin());
}

void BlockTriangularSolver::solve(std::span<const double> rhs, std::span<double> x) const {
  const int m = block_size_;
  for (std::size_t n = 0; n < factors_.size(); ++n) {
    auto xn = x.subspan(n * m, m);
    std::copy_n(rhs.begin() + n * m, m, xn.begin());
    if (n > 0) coupling_->multiply_add(x.subspan((n - 1) * m, m), xn, -1.0);
    for (int i : pinned_) xn[i] = 0.0;
    factors_[n]->solve_in_place(xn);
  }
}

std::vector<double> block_triangular_direct_solve(const SpaceTimeOperator& op, std::span<const double> rhs,
                                                  std::vector<int> pinned) {
  // One pass: only the factor of the current block is kept alive.
  const int m = op.block_size();
  std::vector<char> mask(m, 0);
  for (int i : pinned) mask[i] = 1;
  std::vector<double> x(rhs.size());
  const CsrMatrix* current = nullptr;
  std::shared_ptr<const BlockTriangularSolver::Factor> factor;
  for (int n = 0; n < op.num_elements(); ++n) {
    if (op.diagonal_ptr(n).get() != current) {
      factor.reset();
      current = op.diagonal_ptr(n).get();
      factor = factorize_block(*current, mask);
    }
    auto xn = std::span<double>(x).subspan(static_cast<std::size_t>(n) * m, m);
    std::copy_n(rhs.begin() + static_cast<std::int64_t>(n) * m, m, xn.begin());
    if (n > 0) {
      const auto prev = std::span<const double>(x).subspan(static_cast<std::size_t>(n - 1) * m, m);
      op.coupling().multiply_add(prev, xn, -1.0);
    }
    for (int i : pinned) xn[i] = 0.0;
    factor->solve_in_place(xn);
  }
  return x;
}

namespace {
std::shared_ptr<const BlockTriangularSolver::Factor> factorize_block(const CsrMatrix& a,
                                                                      const std::vector<char>& pinned_mask) {
  auto factor = std::make_shared<BlockTriangularSolver::Factor>();
  const int m = a.rows;
  if (m <= BlockTriangularSolver::kDenseLimit) {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      if (pinned_mask[i]) continue;
      for (std::int64_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
        if (!pinned_mask[a.col[p]]) dense(i, a.col[p]) = a.val[p];
    }
    for (int i = 0; i < m; ++i)
      if (pinned_mask[i]) dense(i, i) = 1.0;
    factor->dense = DenseLU::factorize(dense);
    return factor;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(a.nnz());
  for (int i = 0; i < m; ++i) {
    if (pinned_mask[i]) {
      triplets.emplace_back(i, i, 1.0);
      continue;
    }
    for (std::int64_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      if (!pinned_mask[a.col[p]] && a.val[p] != 0.0) triplets.emplace_back(i, a.col[p], a.val[p]);
  }
  Eigen::SparseMatrix<double> s(m, m);
  s.setFromTriplets(triplets.begin(), triplets.end());
  s.makeCompressed();
  factor->sparse = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
  factor->sparse->compute(s);
  if (factor->sparse->info() != Eigen::Success)
    throw SingularMatrixError("BlockTriangularSolver: singular diagonal block");
  return factor;
}
}  // namespace

}  // namespace wrmg
