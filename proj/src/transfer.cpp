#include "wrmg/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace wrmg {

namespace {

using PointKey = std::pair<long long, long long>;

PointKey key_of(const Point& p) { return {std::llround(p.x * 1e9), std::llround(p.y * 1e9)}; }

void check_compatible(const SpaceTimeSpace& coarse, const SpaceTimeSpace& fine) {
  if (coarse.num_fields() != fine.num_fields())
    throw std::invalid_argument("TransferPair: different field layouts");
  for (int f = 0; f < coarse.num_fields(); ++f)
    if (coarse.field(f).degree() != fine.field(f).degree())
      throw std::invalid_argument("TransferPair: different field degrees");
  if (coarse.time_dofs_per_element() != fine.time_dofs_per_element() ||
      coarse.num_elements() != fine.num_elements())
    throw std::invalid_argument("TransferPair: different temporal spaces");
  const MeshLevel& fm = fine.mesh();
  if (!fm.has_parent() || fm.num_cells() != 4 * coarse.mesh().num_cells())
    throw std::invalid_argument("TransferPair: fine mesh is not a refinement of the coarse mesh");
}

}  // namespace

TransferPair::TransferPair(std::shared_ptr<const SpaceTimeSpace> coarse, std::shared_ptr<const SpaceTimeSpace> fine,
                           const BoundaryConditions* coarse_bcs, const BoundaryConditions* fine_bcs)
    : coarse_(std::move(coarse)), fine_(std::move(fine)) {
  check_compatible(*coarse_, *fine_);
  const MeshLevel& fm = fine_->mesh();
  const MeshLevel& cm = coarse_->mesh();
  const int nfs = fine_->spatial_size();

  std::vector<std::vector<int>> cols(nfs);
  std::vector<std::vector<double>> vals(nfs);
  std::vector<char> done(nfs, 0);
  for (int f = 0; f < fine_->num_fields(); ++f) {
    const ScalarSpatialSpace& fs = fine_->field(f);
    const ScalarSpatialSpace& cs = coarse_->field(f);
    const int foff = fine_->field_offset(f), coff = coarse_->field_offset(f);
    std::vector<double> phi(cs.dofs_per_cell());
    for (int c = 0; c < fm.num_cells(); ++c) {
      const int parent = fm.parent()[c];
      if (parent < 0 || parent >= cm.num_cells()) throw std::invalid_argument("TransferPair: bad parent map");
      auto cdofs = cs.cell_dofs(parent);
      for (int i : fs.cell_dofs(c)) {
        const int row = foff + i;
        if (done[row]) continue;
        done[row] = 1;
        const auto lam = cm.barycentric(parent, fs.dof_point(i));
        for (double l : lam)
          if (l < -1e-10) throw std::invalid_argument("TransferPair: non-nested levels");
        cs.basis().values(lam, phi.data());
        if (fine_bcs && fine_bcs->is_constrained(row)) continue;
        for (std::size_t j = 0; j < phi.size(); ++j) {
          const int col = coff + cdofs[j];
          if (std::abs(phi[j]) <= 1e-12) continue;
          if (coarse_bcs && coarse_bcs->is_constrained(col)) continue;
          cols[row].push_back(col);
          vals[row].push_back(std::abs(phi[j] - 1.0) <= 1e-12 ? 1.0 : phi[j]);
        }
      }
    }
  }
  p_.rows = nfs;
  p_.cols = coarse_->spatial_size();
  p_.row_ptr.assign(nfs + 1, 0);
  for (int r = 0; r < nfs; ++r) {
    std::vector<std::pair<int, double>> e;
    for (std::size_t k = 0; k < cols[r].size(); ++k) e.emplace_back(cols[r][k], vals[r][k]);
    std::sort(e.begin(), e.end());
    for (auto& [c, v] : e) {
      p_.col.push_back(c);
      p_.val.push_back(v);
    }
    p_.row_ptr[r + 1] = p_.nnz();
  }

  injection_.assign(coarse_->spatial_size(), -1);
  for (int f = 0; f < fine_->num_fields(); ++f) {
    const ScalarSpatialSpace& fs = fine_->field(f);
    const ScalarSpatialSpace& cs = coarse_->field(f);
    std::map<PointKey, int> where;
    for (int i = 0; i < fs.num_dofs(); ++i) where.emplace(key_of(fs.dof_point(i)), i);
    for (int i = 0; i < cs.num_dofs(); ++i) {
      auto it = where.find(key_of(cs.dof_point(i)));
      if (it == where.end()) throw std::invalid_argument("TransferPair: coarse node missing on the fine level");
      injection_[coarse_->field_offset(f) + i] = fine_->field_offset(f) + it->second;
    }
  }
}

void TransferPair::prolong(std::span<const double> coarse, std::span<double> fine) const {
  const std::int64_t slots = fine_->size() / fine_->spatial_size();
  for (std::int64_t s = 0; s < slots; ++s)
    p_.multiply(coarse.subspan(s * p_.cols, p_.cols), fine.subspan(s * p_.rows, p_.rows));
}

void TransferPair::restrict_to_coarse(std::span<const double> fine, std::span<double> coarse) const {
  const std::int64_t slots = fine_->size() / fine_->spatial_size();
  for (std::int64_t s = 0; s < slots; ++s)
    p_.transpose_multiply(fine.subspan(s * p_.rows, p_.rows), coarse.subspan(s * p_.cols, p_.cols));
}

void TransferPair::inject(std::span<const double> fine, std::span<double> coarse) const {
  const std::int64_t slots = fine_->size() / fine_->spatial_size();
  for (std::int64_t s = 0; s < slots; ++s)
    for (std::size_t i = 0; i < injection_.size(); ++i) coarse[s * p_.cols + i] = fine[s * p_.rows + injection_[i]];
}

TransferPair build_prolongation(std::shared_ptr<const SpaceTimeSpace> coarse,
                                std::shared_ptr<const SpaceTimeSpace> fine) {
  return TransferPair(std::move(coarse), std::move(fine));
}

}  // namespace wrmg
