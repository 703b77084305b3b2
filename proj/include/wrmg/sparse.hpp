#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wrmg {

/// Compressed sparse row matrix with sorted column indices per row.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  std::int64_t nnz() const { return static_cast<std::int64_t>(col.size()); }
  int row_length(int i) const { return static_cast<int>(row_ptr[i + 1] - row_ptr[i]); }

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y += alpha A x
  void multiply_add(std::span<const double> x, std::span<double> y, double alpha = 1.0) const;
  /// y = A^T x
  void transpose_multiply(std::span<const double> x, std::span<double> y) const;

  /// Entry (i, j), zero when structurally absent.
  double at(int i, int j) const;
  /// Position of (i, j) in `col`/`val`, or -1.
  std::int64_t find(int i, int j) const;
};

/// Builds a zero-valued CSR pattern from per-row column sets (sorted and deduplicated here).
CsrMatrix pattern_from_rows(int cols, std::vector<std::vector<int>> rows);

/// Kronecker layout used by every time-element block: row (a, i) holds, for
/// b = 0..q, the columns (b, j) of spatial row i. Values are zero.
CsrMatrix kron_dense_pattern(int time_dofs, const CsrMatrix& spatial);

/// Position of ((a, i), (b, j)) in a block built by `kron_dense_pattern`, given
/// the offset of j within spatial row i.
inline std::int64_t kron_position(const CsrMatrix& block, const CsrMatrix& spatial, int a, int b, int i,
                                  int offset_in_row) {
  return block.row_ptr[static_cast<std::int64_t>(a) * spatial.rows + i] +
         static_cast<std::int64_t>(b) * spatial.row_length(i) + offset_in_row;
}

}  // namespace wrmg
