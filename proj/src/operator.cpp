#include "wrmg/operator.hpp"

#include <limits>
#include <stdexcept>

namespace wrmg {

SpaceTimeOperator::SpaceTimeOperator(std::shared_ptr<const SpaceTimeSpace> space,
                                     std::vector<std::shared_ptr<const CsrMatrix>> diagonal,
                                     std::shared_ptr<const CsrMatrix> coupling)
    : space_(std::move(space)), diagonal_(std::move(diagonal)), coupling_(std::move(coupling)) {
  block_size_ = space_->block_size();
  if (static_cast<int>(diagonal_.size()) != space_->num_elements())
    throw std::invalid_argument("SpaceTimeOperator: one diagonal block per time element required");
  for (const auto& d : diagonal_)
    if (!d || d->rows != block_size_ || d->cols != block_size_)
      throw std::invalid_argument("SpaceTimeOperator: diagonal block has the wrong shape");
  if (!coupling_ || coupling_->rows != block_size_ || coupling_->cols != block_size_)
    throw std::invalid_argument("SpaceTimeOperator: coupling block has the wrong shape");
}

bool SpaceTimeOperator::has_uniform_diagonal() const {
  for (const auto& d : diagonal_)
    if (d != diagonal_.front()) return false;
  return true;
}

void SpaceTimeOperator::apply(std::span<const double> x, std::span<double> y) const {
  const int m = block_size_;
  for (int n = 0; n < num_elements(); ++n) {
    auto yn = y.subspan(block_offset(n), m);
    diagonal_[n]->multiply(x.subspan(block_offset(n), m), yn);
    if (n > 0) coupling_->multiply_add(x.subspan(block_offset(n - 1), m), yn);
  }
}

LinearMap SpaceTimeOperator::as_map() const {
  return [this](std::span<const double> x, std::span<double> y) { apply(x, y); };
}

std::int64_t SpaceTimeOperator::nnz_stored() const {
  std::int64_t total = 0;
  for (const auto& d : diagonal_) total += d->nnz();
  return total + static_cast<std::int64_t>(num_elements() - 1) * coupling_->nnz();
}

std::int64_t SpaceTimeOperator::nnz_extruded() const {
  const int n_el = num_elements();
  std::int64_t total = 0;
  for (int n = 0; n < n_el; ++n) {
    const int neighbours = 1 + (n > 0 ? 1 : 0) + (n + 1 < n_el ? 1 : 0);
    total += diagonal_[n]->nnz() * neighbours;
  }
  return total;
}

CsrMatrix SpaceTimeOperator::to_csr() const {
  const std::int64_t total = size();
  if (total > std::numeric_limits<int>::max()) throw std::length_error("SpaceTimeOperator::to_csr: too large");
  CsrMatrix out;
  out.rows = out.cols = static_cast<int>(total);
  out.row_ptr.assign(total + 1, 0);
  out.col.reserve(nnz_stored());
  out.val.reserve(nnz_stored());
  const int m = block_size_;
  for (int n = 0; n < num_elements(); ++n) {
    const CsrMatrix& d = *diagonal_[n];
    for (int i = 0; i < m; ++i) {
      if (n > 0) {
        for (std::int64_t p = coupling_->row_ptr[i]; p < coupling_->row_ptr[i + 1]; ++p) {
          out.col.push_back(static_cast<int>(block_offset(n - 1) + coupling_->col[p]));
          out.val.push_back(coupling_->val[p]);
        }
      }
      for (std::int64_t p = d.row_ptr[i]; p < d.row_ptr[i + 1]; ++p) {
        out.col.push_back(static_cast<int>(block_offset(n) + d.col[p]));
        out.val.push_back(d.val[p]);
      }
      out.row_ptr[block_offset(n) + i + 1] = static_cast<std::int64_t>(out.col.size());
    }
  }
  return out;
}

}  // namespace wrmg
