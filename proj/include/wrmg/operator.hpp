#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "wrmg/krylov.hpp"
#include "wrmg/spaces.hpp"
#include "wrmg/sparse.hpp"

namespace wrmg {

/// Block lower bidiagonal space-time matrix.
///
/// Row block n couples to column block n through `diagonal(n)` and to column
/// block n-1 through `coupling()` (the upwind jump term, identical for every
/// n >= 1). Diagonal blocks are shared by pointer when they coincide, which
/// is the case for any time-independent linear operator.
class SpaceTimeOperator {
 public:
  SpaceTimeOperator(std::shared_ptr<const SpaceTimeSpace> space,
                    std::vector<std::shared_ptr<const CsrMatrix>> diagonal,
                    std::shared_ptr<const CsrMatrix> coupling);

  const SpaceTimeSpace& space() const { return *space_; }
  const std::shared_ptr<const SpaceTimeSpace>& space_ptr() const { return space_; }
  int num_elements() const { return static_cast<int>(diagonal_.size()); }
  int block_size() const { return block_size_; }
  std::int64_t size() const { return static_cast<std::int64_t>(block_size_) * num_elements(); }
  std::int64_t block_offset(int n) const { return static_cast<std::int64_t>(n) * block_size_; }

  const CsrMatrix& diagonal(int n) const { return *diagonal_[n]; }
  const std::shared_ptr<const CsrMatrix>& diagonal_ptr(int n) const { return diagonal_[n]; }
  const CsrMatrix& coupling() const { return *coupling_; }

  /// True when every time element uses the same diagonal block object.
  bool has_uniform_diagonal() const;

  void apply(std::span<const double> x, std::span<double> y) const;
  LinearMap as_map() const;

  /// Entries actually stored, counting shared blocks once per time element.
  std::int64_t nnz_stored() const;
  /// Entries of the extruded tensor-product sparsity: every time element
  /// allocates its diagonal-block pattern against itself and both temporal
  /// neighbours.
  std::int64_t nnz_extruded() const;

  /// Materializes the global CSR matrix (small problems and tests only).
  CsrMatrix to_csr() const;

 private:
  std::shared_ptr<const SpaceTimeSpace> space_;
  std::vector<std::shared_ptr<const CsrMatrix>> diagonal_;
  std::shared_ptr<const CsrMatrix> coupling_;
  int block_size_;
};

}  // namespace wrmg
