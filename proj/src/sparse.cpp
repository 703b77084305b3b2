#include "wrmg/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace wrmg {

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += val[p] * x[col[p]];
    y[i] = s;
  }
}

void CsrMatrix::multiply_add(std::span<const double> x, std::span<double> y, double alpha) const {
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += val[p] * x[col[p]];
    y[i] += alpha * s;
  }
}

void CsrMatrix::transpose_multiply(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.begin() + cols, 0.0);
  for (int i = 0; i < rows; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) y[col[p]] += val[p] * xi;
  }
}

std::int64_t CsrMatrix::find(int i, int j) const {
  const auto first = col.begin() + row_ptr[i];
  const auto last = col.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return it - col.begin();
}

double CsrMatrix::at(int i, int j) const {
  const std::int64_t p = find(i, j);
  return p < 0 ? 0.0 : val[p];
}

CsrMatrix pattern_from_rows(int cols, std::vector<std::vector<int>> rows) {
  CsrMatrix m;
  m.rows = static_cast<int>(rows.size());
  m.cols = cols;
  m.row_ptr.assign(m.rows + 1, 0);
  for (int i = 0; i < m.rows; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    m.row_ptr[i + 1] = m.row_ptr[i] + static_cast<std::int64_t>(r.size());
  }
  m.col.reserve(m.row_ptr.back());
  for (auto& r : rows) {
    m.col.insert(m.col.end(), r.begin(), r.end());
    std::vector<int>().swap(r);
  }
  m.val.assign(m.col.size(), 0.0);
  return m;
}

CsrMatrix kron_dense_pattern(int time_dofs, const CsrMatrix& spatial) {
  const int ns = spatial.rows;
  if (spatial.cols != ns) throw std::invalid_argument("kron_dense_pattern: spatial pattern must be square");
  CsrMatrix m;
  m.rows = m.cols = time_dofs * ns;
  m.row_ptr.resize(static_cast<std::size_t>(m.rows) + 1);
  m.row_ptr[0] = 0;
  for (int a = 0; a < time_dofs; ++a)
    for (int i = 0; i < ns; ++i)
      m.row_ptr[a * ns + i + 1] = m.row_ptr[a * ns + i] + static_cast<std::int64_t>(time_dofs) * spatial.row_length(i);
  m.col.resize(m.row_ptr.back());
  for (int a = 0; a < time_dofs; ++a) {
    for (int i = 0; i < ns; ++i) {
      std::int64_t p = m.row_ptr[a * ns + i];
      for (int b = 0; b < time_dofs; ++b)
        for (std::int64_t s = spatial.row_ptr[i]; s < spatial.row_ptr[i + 1]; ++s)
          m.col[p++] = b * ns + spatial.col[s];
    }
  }
  m.val.assign(m.col.size(), 0.0);
  return m;
}

}  // namespace wrmg
