#include "wrmg/forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "element_tools.hpp"
#include "wrmg/parallel.hpp"
#include "wrmg/quadrature.hpp"

namespace wrmg {

using detail::CellGeometry;
using detail::Tabulation;
using detail::tabulate;

namespace {

constexpr int kPressureField = 2;

bool is_velocity(const SpaceTimeSpace& s, int f) { return s.num_fields() == 1 || f < kPressureField; }

// Temporal quadrature data for one rule: points, weights and basis values.
struct TemporalTable {
  IntervalRule rule;
  std::vector<double> phi;  // [g * T + a]
};

TemporalTable temporal_table(const LagrangeInterval& basis, int degree) {
  TemporalTable t{interval_rule(degree), {}};
  const int T = basis.size();
  t.phi.resize(static_cast<std::size_t>(t.rule.size()) * T);
  for (int g = 0; g < t.rule.size(); ++g)
    for (int a = 0; a < T; ++a) t.phi[g * T + a] = basis.value(a, t.rule.points[g]);
  return t;
}

}  // namespace

int BoundaryConditions::num_constrained() const {
  return static_cast<int>(std::count(constrained.begin(), constrained.end(), 1));
}

BoundaryConditions natural_bcs(const SpaceTimeSpace& space) {
  BoundaryConditions bc;
  bc.constrained.assign(space.spatial_size(), 0);
  bc.value.assign(space.spatial_size(), 0.0);
  return bc;
}

SpaceTimeForms::SpaceTimeForms(std::shared_ptr<const SpaceTimeSpace> space, BoundaryConditions bcs, int threads)
    : space_(std::move(space)), bcs_(std::move(bcs)), threads_(std::max(1, threads)) {
  if (!space_) throw std::invalid_argument("SpaceTimeForms: null space");
  const int nf = space_->num_fields();
  if (nf != 1 && !(nf == 3 && space_->is_taylor_hood()))
    throw std::invalid_argument("SpaceTimeForms: expected a scalar or Taylor-Hood space");
  const int ns = space_->spatial_size();
  if (static_cast<int>(bcs_.constrained.size()) != ns || static_cast<int>(bcs_.value.size()) != ns)
    throw std::invalid_argument("SpaceTimeForms: boundary data has the wrong size");
  for (int i = 0; i < ns; ++i)
    if (bcs_.constrained[i]) constrained_list_.push_back(i);
  if (nf == 1 && bcs_.pressure_nullspace)
    throw std::invalid_argument("SpaceTimeForms: pressure null space on a scalar space");
  build_pattern();
  assemble_spatial();
  build_linear_blocks();
}

void SpaceTimeForms::build_pattern() {
  const SpaceTimeSpace& s = *space_;
  const MeshLevel& mesh = s.mesh();
  const int nf = s.num_fields();
  local_field_offset_.assign(nf + 1, 0);
  for (int f = 0; f < nf; ++f) local_field_offset_[f + 1] = local_field_offset_[f] + s.field(f).dofs_per_cell();
  local_size_ = local_field_offset_[nf];
  const int L = local_size_;
  const int nc = mesh.num_cells();

  cell_map_.resize(static_cast<std::size_t>(nc) * L);
  for (int c = 0; c < nc; ++c)
    for (int f = 0; f < nf; ++f) {
      auto dofs = s.field(f).cell_dofs(c);
      for (std::size_t i = 0; i < dofs.size(); ++i)
        cell_map_[static_cast<std::size_t>(c) * L + local_field_offset_[f] + i] = s.field_offset(f) + dofs[i];
    }

  // Every field pair sharing a cell is allocated, including the (zero)
  // pressure-pressure block of the mixed system.
  std::vector<std::vector<int>> rows(s.spatial_size());
  for (int c = 0; c < nc; ++c) {
    const int* map = &cell_map_[static_cast<std::size_t>(c) * L];
    for (int li = 0; li < L; ++li)
      for (int lj = 0; lj < L; ++lj)
        rows[map[li]].push_back(map[lj]);
  }
  pattern_ = pattern_from_rows(s.spatial_size(), std::move(rows));

  cell_offsets_.assign(static_cast<std::size_t>(nc) * L * L, -1);
  for (int c = 0; c < nc; ++c) {
    const int* map = &cell_map_[static_cast<std::size_t>(c) * L];
    for (int li = 0; li < L; ++li) {
      const int gi = map[li];
      const int* begin = pattern_.col.data() + pattern_.row_ptr[gi];
      const int* end = pattern_.col.data() + pattern_.row_ptr[gi + 1];
      for (int lj = 0; lj < L; ++lj)
        cell_offsets_[(static_cast<std::size_t>(c) * L + li) * L + lj] =
            static_cast<int>(std::lower_bound(begin, end, map[lj]) - begin);
    }
  }

  // Field of each mixed DoF, for the mass structure mask.
  std::vector<int> dof_field(s.spatial_size());
  for (int f = 0; f < nf; ++f)
    for (int i = 0; i < s.field(f).num_dofs(); ++i) dof_field[s.field_offset(f) + i] = f;
  mass_structure_.assign(pattern_.nnz(), 0);
  for (int i = 0; i < pattern_.rows; ++i)
    for (std::int64_t p = pattern_.row_ptr[i]; p < pattern_.row_ptr[i + 1]; ++p)
      mass_structure_[p] = dof_field[i] == dof_field[pattern_.col[p]] && is_velocity(s, dof_field[i]);
}

void SpaceTimeForms::assemble_spatial() {
  const SpaceTimeSpace& s = *space_;
  const MeshLevel& mesh = s.mesh();
  const int nf = s.num_fields();
  const int L = local_size_;
  const int kv = s.field(0).degree();
  const TriangleRule rule = triangle_rule(2 * kv);
  const Tabulation tv = tabulate(s.field(0).basis(), rule);
  const Tabulation tp = nf == 3 ? tabulate(s.field(kPressureField).basis(), rule) : Tabulation{};
  const int nv = tv.nbasis;
  const int np = tp.nbasis;

  mass_ = pattern_;
  stationary_ = pattern_;
  std::vector<double> lm(static_cast<std::size_t>(L) * L), ls(static_cast<std::size_t>(L) * L);
  std::vector<double> gx(nv), gy(nv);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo(mesh, c);
    std::fill(lm.begin(), lm.end(), 0.0);
    std::fill(ls.begin(), ls.end(), 0.0);
    for (int p = 0; p < rule.size(); ++p) {
      const double w = rule.weights[p] * geo.abs_det;
      for (int i = 0; i < nv; ++i) geo.gradient(tv.d(p, i), gx[i], gy[i]);
      for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j) {
          const double m = w * tv.v(p, i) * tv.v(p, j);
          const double k = w * (gx[i] * gx[j] + gy[i] * gy[j]);
          for (int f = 0; f < (nf == 1 ? 1 : 2); ++f) {
            const std::size_t idx = static_cast<std::size_t>(local_field_offset_[f] + i) * L + local_field_offset_[f] + j;
            lm[idx] += m;
            ls[idx] += k;
          }
        }
      if (nf == 3) {
        // (Phi, div psi) in the velocity rows, (div U, chi) in the pressure rows.
        const int po = local_field_offset_[kPressureField];
        for (int i = 0; i < nv; ++i)
          for (int j = 0; j < np; ++j) {
            const double chi = w * tp.v(p, j);
            ls[static_cast<std::size_t>(i) * L + po + j] += chi * gx[i];
            ls[static_cast<std::size_t>(nv + i) * L + po + j] += chi * gy[i];
            ls[static_cast<std::size_t>(po + j) * L + i] += chi * gx[i];
            ls[static_cast<std::size_t>(po + j) * L + nv + i] += chi * gy[i];
          }
      }
    }
    const int* map = &cell_map_[static_cast<std::size_t>(c) * L];
    for (int li = 0; li < L; ++li) {
      const std::int64_t base = pattern_.row_ptr[map[li]];
      for (int lj = 0; lj < L; ++lj) {
        const int off = cell_offsets_[(static_cast<std::size_t>(c) * L + li) * L + lj];
        if (off < 0) continue;
        mass_.val[base + off] += lm[static_cast<std::size_t>(li) * L + lj];
        stationary_.val[base + off] += ls[static_cast<std::size_t>(li) * L + lj];
      }
    }
  }
}

void SpaceTimeForms::build_linear_blocks() {
  const SpaceTimeSpace& s = *space_;
  const LagrangeInterval& tb = s.temporal().basis();
  const int T = tb.size();
  const double dt = s.temporal().partition().step();
  const IntervalRule rule = interval_rule(2 * tb.degree());
  temporal_mass_ = Eigen::MatrixXd::Zero(T, T);
  temporal_advection_ = Eigen::MatrixXd::Zero(T, T);
  for (int g = 0; g < rule.size(); ++g) {
    const double tau = rule.points[g];
    for (int a = 0; a < T; ++a)
      for (int b = 0; b < T; ++b) {
        temporal_mass_(a, b) += rule.weights[g] * tb.value(a, tau) * tb.value(b, tau);
        temporal_advection_(a, b) += rule.weights[g] * tb.derivative(b, tau) * tb.value(a, tau);
      }
  }
  start_trace_ = s.temporal().start_trace();
  end_trace_ = s.temporal().end_trace();

  auto block = std::make_shared<CsrMatrix>(kron_dense_pattern(T, pattern_));
  for (int a = 0; a < T; ++a)
    for (int b = 0; b < T; ++b) {
      const double cm = temporal_advection_(a, b) + start_trace_[a] * start_trace_[b];
      const double cs = dt * temporal_mass_(a, b);
      for (int i = 0; i < pattern_.rows; ++i) {
        const std::int64_t pos = kron_position(*block, pattern_, a, b, i, 0);
        for (std::int64_t p = pattern_.row_ptr[i]; p < pattern_.row_ptr[i + 1]; ++p)
          block->val[pos + (p - pattern_.row_ptr[i])] = cm * mass_.val[p] + cs * stationary_.val[p];
      }
    }
  linear_block_ = block;

  // Upwind coupling -t0 t1^T (x) M: only same-field velocity entries.
  const int ns = pattern_.rows;
  auto coupling = std::make_shared<CsrMatrix>();
  coupling->rows = coupling->cols = T * ns;
  coupling->row_ptr.assign(static_cast<std::size_t>(T) * ns + 1, 0);
  for (int a = 0; a < T; ++a)
    for (int i = 0; i < ns; ++i) {
      if (start_trace_[a] != 0.0)
        for (int b = 0; b < T; ++b) {
          const double c = -start_trace_[a] * end_trace_[b];
          if (c == 0.0) continue;
          for (std::int64_t p = pattern_.row_ptr[i]; p < pattern_.row_ptr[i + 1]; ++p)
            if (mass_structure_[p]) {
              coupling->col.push_back(b * ns + pattern_.col[p]);
              coupling->val.push_back(c * mass_.val[p]);
            }
        }
      coupling->row_ptr[static_cast<std::size_t>(a) * ns + i + 1] = coupling->nnz();
    }
  coupling_ = coupling;
  coupling_constrained_ =
      constrained_list_.empty() ? coupling_ : std::make_shared<const CsrMatrix>(constrained_copy(*coupling_, false));
}

CsrMatrix SpaceTimeForms::constrained_copy(const CsrMatrix& block, bool diagonal) const {
  CsrMatrix out = block;
  const int ns = space_->spatial_size();
  for (int r = 0; r < out.rows; ++r) {
    const bool row_fixed = bcs_.constrained[r % ns] != 0;
    for (std::int64_t p = out.row_ptr[r]; p < out.row_ptr[r + 1]; ++p) {
      if (row_fixed || bcs_.constrained[out.col[p] % ns]) out.val[p] = 0.0;
      if (row_fixed && diagonal && out.col[p] == r) out.val[p] = 1.0;
    }
  }
  return out;
}

SpaceTimeOperator SpaceTimeForms::heat_operator() const {
  auto diag = constrained_list_.empty() ? linear_block_
                                        : std::make_shared<const CsrMatrix>(constrained_copy(*linear_block_, true));
  return SpaceTimeOperator(space_, std::vector<std::shared_ptr<const CsrMatrix>>(space_->num_elements(), diag),
                           coupling_constrained_);
}

std::vector<double> SpaceTimeForms::initial_jump_rhs(std::span<const double> initial) const {
  const int ns = space_->spatial_size();
  if (static_cast<int>(initial.size()) != ns) throw std::invalid_argument("initial_jump_rhs: wrong size");
  std::vector<double> mu(ns, 0.0);
  for (int i = 0; i < ns; ++i)
    for (std::int64_t p = mass_.row_ptr[i]; p < mass_.row_ptr[i + 1]; ++p)
      if (mass_structure_[p]) mu[i] += mass_.val[p] * initial[mass_.col[p]];
  std::vector<double> rhs(space_->size(), 0.0);
  for (int a = 0; a < space_->time_dofs_per_element(); ++a)
    for (int i = 0; i < ns; ++i) rhs[static_cast<std::size_t>(a) * ns + i] = start_trace_[a] * mu[i];
  return rhs;
}

SpaceTimeOperator SpaceTimeForms::apply_dirichlet(const SpaceTimeOperator& op, std::span<double> rhs) const {
  if (constrained_list_.empty()) return op;
  std::vector<double> lift(space_->size(), 0.0);
  apply_dirichlet_values(lift);
  std::vector<double> a_lift(lift.size());
  op.apply(lift, a_lift);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= a_lift[i];
  apply_dirichlet_values(rhs);
  std::vector<std::shared_ptr<const CsrMatrix>> diag;
  std::vector<std::pair<const CsrMatrix*, std::shared_ptr<const CsrMatrix>>> done;
  for (int n = 0; n < op.num_elements(); ++n) {
    const CsrMatrix* src = op.diagonal_ptr(n).get();
    auto it = std::find_if(done.begin(), done.end(), [&](const auto& d) { return d.first == src; });
    if (it == done.end()) {
      done.emplace_back(src, std::make_shared<const CsrMatrix>(constrained_copy(*src, true)));
      it = done.end() - 1;
    }
    diag.push_back(it->second);
  }
  return SpaceTimeOperator(op.space_ptr(), std::move(diag),
                           std::make_shared<const CsrMatrix>(constrained_copy(op.coupling(), false)));
}

void SpaceTimeForms::apply_dirichlet_values(std::span<double> state) const {
  const int ns = space_->spatial_size();
  const std::int64_t slots = space_->size() / ns;
  for (std::int64_t s = 0; s < slots; ++s)
    for (int i : constrained_list_) state[s * ns + i] = bcs_.value[i];
}

void SpaceTimeForms::zero_constrained(std::span<double> v) const {
  const int ns = space_->spatial_size();
  const std::int64_t slots = static_cast<std::int64_t>(v.size()) / ns;
  for (std::int64_t s = 0; s < slots; ++s)
    for (int i : constrained_list_) v[s * ns + i] = 0.0;
}

std::vector<int> SpaceTimeForms::pressure_pins() const {
  std::vector<int> pins;
  if (!is_navier_stokes() || !bcs_.pressure_nullspace) return pins;
  const int ns = space_->spatial_size();
  for (int a = 0; a < space_->time_dofs_per_element(); ++a)
    pins.push_back(a * ns + space_->field_offset(kPressureField));
  return pins;
}

void SpaceTimeForms::project_pressure(std::span<double> v) const {
  if (!is_navier_stokes() || !bcs_.pressure_nullspace) return;
  const int ns = space_->spatial_size();
  const int po = space_->field_offset(kPressureField);
  const int np = space_->field(kPressureField).num_dofs();
  const std::int64_t slots = static_cast<std::int64_t>(v.size()) / ns;
  for (std::int64_t s = 0; s < slots; ++s) {
    double* p = v.data() + s * ns + po;
    double mean = 0.0;
    for (int i = 0; i < np; ++i) mean += p[i];
    mean /= np;
    for (int i = 0; i < np; ++i) p[i] -= mean;
  }
}

void SpaceTimeForms::convection_element(int n, std::span<const double> state, double reynolds,
                                        std::span<double> residual, CsrMatrix* block) const {
  const SpaceTimeSpace& s = *space_;
  const MeshLevel& mesh = s.mesh();
  const ScalarSpatialSpace& vel = s.field(0);
  const int T = s.time_dofs_per_element();
  const int ns = s.spatial_size();
  const int L = local_size_;
  const int nv = vel.dofs_per_cell();
  const int nl = 2 * nv;  // local velocity DoFs, x block then y block
  const double dt = s.temporal().partition().step();
  const TriangleRule rule = triangle_rule(std::min(12, 3 * vel.degree()));
  const Tabulation tv = tabulate(vel.basis(), rule);
  const TemporalTable tt = temporal_table(s.temporal().basis(), 3 * s.temporal().degree() + 1);
  const int G = tt.rule.size();
  const int P = rule.size();
  const std::int64_t base = static_cast<std::int64_t>(n) * s.block_size();

  std::vector<double> coeff(static_cast<std::size_t>(T) * nl);  // [b * nl + l]
  std::vector<double> gx(static_cast<std::size_t>(P) * nv), gy(static_cast<std::size_t>(P) * nv);
  std::vector<double> k(static_cast<std::size_t>(nl) * nl);
  std::vector<double> kloc(static_cast<std::size_t>(T) * T * nl * nl);
  std::vector<double> rloc(static_cast<std::size_t>(T) * nl);

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo(mesh, c);
    const int* map = &cell_map_[static_cast<std::size_t>(c) * L];
    for (int b = 0; b < T; ++b)
      for (int l = 0; l < nl; ++l) coeff[b * nl + l] = state[base + static_cast<std::int64_t>(b) * ns + map[l]];
    for (int p = 0; p < P; ++p)
      for (int i = 0; i < nv; ++i) geo.gradient(tv.d(p, i), gx[p * nv + i], gy[p * nv + i]);
    if (block) std::fill(kloc.begin(), kloc.end(), 0.0);
    std::fill(rloc.begin(), rloc.end(), 0.0);

    for (int g = 0; g < G; ++g) {
      const double* phi = &tt.phi[static_cast<std::size_t>(g) * T];
      if (block) std::fill(k.begin(), k.end(), 0.0);
      double rg[64];
      std::fill(rg, rg + nl, 0.0);
      for (int p = 0; p < P; ++p) {
        const double w = reynolds * rule.weights[p] * geo.abs_det;
        double u[2] = {0, 0}, du[2][2] = {{0, 0}, {0, 0}};  // du[c][d] = d U_c / d x_d
        for (int b = 0; b < T; ++b) {
          for (int i = 0; i < nv; ++i) {
            for (int cc = 0; cc < 2; ++cc) {
              const double cf = phi[b] * coeff[b * nl + cc * nv + i];
              u[cc] += cf * tv.v(p, i);
              du[cc][0] += cf * gx[p * nv + i];
              du[cc][1] += cf * gy[p * nv + i];
            }
          }
        }
        const double conv[2] = {u[0] * du[0][0] + u[1] * du[0][1], u[0] * du[1][0] + u[1] * du[1][1]};
        for (int i = 0; i < nv; ++i) {
          const double wi = w * tv.v(p, i);
          rg[i] += wi * conv[0];
          rg[nv + i] += wi * conv[1];
        }
        if (!block) continue;
        for (int i = 0; i < nv; ++i) {
          const double wi = w * tv.v(p, i);
          for (int j = 0; j < nv; ++j) {
            const double psi = tv.v(p, j);
            const double adv = u[0] * gx[p * nv + j] + u[1] * gy[p * nv + j];
            for (int cc = 0; cc < 2; ++cc) {
              double* row = &k[static_cast<std::size_t>(cc * nv + i) * nl];
              row[j] += wi * psi * du[cc][0];
              row[nv + j] += wi * psi * du[cc][1];
              row[cc * nv + j] += wi * adv;
            }
          }
        }
      }
      const double wt = dt * tt.rule.weights[g];
      for (int a = 0; a < T; ++a)
        for (int l = 0; l < nl; ++l) rloc[a * nl + l] += wt * phi[a] * rg[l];
      if (!block) continue;
      for (int a = 0; a < T; ++a)
        for (int b = 0; b < T; ++b) {
          const double f = wt * phi[a] * phi[b];
          if (f == 0.0) continue;
          double* dst = &kloc[static_cast<std::size_t>(a * T + b) * nl * nl];
          for (std::size_t e = 0; e < k.size(); ++e) dst[e] += f * k[e];
        }
    }

    if (!residual.empty())
      for (int a = 0; a < T; ++a)
        for (int l = 0; l < nl; ++l) residual[static_cast<std::size_t>(a) * ns + map[l]] += rloc[a * nl + l];
    if (!block) continue;
    for (int a = 0; a < T; ++a)
      for (int b = 0; b < T; ++b) {
        const double* src = &kloc[static_cast<std::size_t>(a * T + b) * nl * nl];
        for (int li = 0; li < nl; ++li) {
          const int* offs = &cell_offsets_[(static_cast<std::size_t>(c) * L + li) * L];
          const std::int64_t pos = kron_position(*block, pattern_, a, b, map[li], 0);
          for (int lj = 0; lj < nl; ++lj) block->val[pos + offs[lj]] += src[li * nl + lj];
        }
      }
  }
}

std::vector<double> SpaceTimeForms::ns_residual(std::span<const double> state, std::span<const double> initial,
                                                double reynolds) const {
  if (!is_navier_stokes()) throw std::invalid_argument("ns_residual: space is not Taylor-Hood");
  if (!(reynolds > 0.0)) throw std::invalid_argument("ns_residual: Reynolds number must be positive");
  if (static_cast<std::int64_t>(state.size()) != space_->size())
    throw std::invalid_argument("ns_residual: state has the wrong size");
  const int m = space_->block_size();
  std::vector<double> r(state.size(), 0.0);
  std::vector<double> jump = initial_jump_rhs(initial);
  parallel_for(space_->num_elements(), threads_, [&](int n) {
    auto rn = std::span<double>(r).subspan(static_cast<std::size_t>(n) * m, m);
    linear_block_->multiply(state.subspan(static_cast<std::size_t>(n) * m, m), rn);
    if (n > 0)
      coupling_->multiply_add(state.subspan(static_cast<std::size_t>(n - 1) * m, m), rn);
    else
      for (int i = 0; i < m; ++i) rn[i] -= jump[i];
    convection_element(n, state, reynolds, rn, nullptr);
  });
  zero_constrained(r);
  return r;
}

SpaceTimeOperator SpaceTimeForms::ns_jacobian(std::span<const double> state, double reynolds) const {
  if (!is_navier_stokes()) throw std::invalid_argument("ns_jacobian: space is not Taylor-Hood");
  if (!(reynolds > 0.0)) throw std::invalid_argument("ns_jacobian: Reynolds number must be positive");
  if (static_cast<std::int64_t>(state.size()) != space_->size())
    throw std::invalid_argument("ns_jacobian: state has the wrong size");
  std::vector<std::shared_ptr<const CsrMatrix>> diag(space_->num_elements());
  parallel_for(space_->num_elements(), threads_, [&](int n) {
    CsrMatrix block = *linear_block_;
    convection_element(n, state, reynolds, {}, &block);
    diag[n] = std::make_shared<const CsrMatrix>(constrained_list_.empty() ? std::move(block)
                                                                           : constrained_copy(block, true));
  });
  return SpaceTimeOperator(space_, std::move(diag), coupling_constrained_);
}

std::pair<SpaceTimeOperator, std::vector<double>> assemble_heat(std::shared_ptr<const SpaceTimeSpace> space,
                                                                 std::span<const double> u0) {
  if (!space || space->num_fields() != 1) throw std::invalid_argument("assemble_heat: space is not scalar");
  SpaceTimeForms forms(space, natural_bcs(*space));
  return {forms.heat_operator(), forms.initial_jump_rhs(u0)};
}

std::vector<double> assemble_ns_residual(const SpaceTimeForms& forms, std::span<const double> state,
                                         std::span<const double> initial, double reynolds) {
  return forms.ns_residual(state, initial, reynolds);
}

SpaceTimeOperator assemble_ns_jacobian(const SpaceTimeForms& forms, std::span<const double> state, double reynolds) {
  return forms.ns_jacobian(state, reynolds);
}

void interpolate_field(const SpaceTimeSpace& space, int field, const ScalarField& f, double t,
                       std::span<double> out) {
  const ScalarSpatialSpace& fs = space.field(field);
  const int off = space.field_offset(field);
  for (int i = 0; i < fs.num_dofs(); ++i) out[off + i] = f(t, fs.dof_point(i));
}

std::vector<double> interpolate_initial(const SpaceTimeSpace& space, const std::vector<int>& fields,
                                        const MixedField& f, double t) {
  std::vector<double> out(space.spatial_size(), 0.0);
  std::vector<double> vals(fields.size());
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const ScalarSpatialSpace& fs = space.field(fields[k]);
    const int off = space.field_offset(fields[k]);
    for (int i = 0; i < fs.num_dofs(); ++i) {
      f(t, fs.dof_point(i), vals);
      out[off + i] = vals[k];
    }
  }
  return out;
}

std::vector<double> interpolate_spacetime(const SpaceTimeSpace& space, const std::vector<int>& fields,
                                          const MixedField& f) {
  std::vector<double> out(space.size(), 0.0);
  const TimePartition& part = space.temporal().partition();
  for (int n = 0; n < space.num_elements(); ++n)
    for (int a = 0; a < space.time_dofs_per_element(); ++a) {
      const double t = part.node(n) + part.step() * space.temporal().basis().node(a);
      const auto slice = interpolate_initial(space, fields, f, t);
      std::copy(slice.begin(), slice.end(), out.begin() + space.index(n, a, 0, 0));
    }
  return out;
}

double spacetime_l2_error(const SpaceTimeSpace& space, std::span<const double> state, const std::vector<int>& fields,
                          const MixedField& exact) {
  const MeshLevel& mesh = space.mesh();
  const TimePartition& part = space.temporal().partition();
  const int q = space.temporal().degree();
  const IntervalRule trule = gauss_legendre(std::max(q + 4, 5));
  int kmax = 1;
  for (int f : fields) kmax = std::max(kmax, space.field(f).degree());
  const TriangleRule srule = triangle_rule(std::min(12, 2 * kmax + 4));
  std::vector<Tabulation> tabs;
  for (int f : fields) tabs.push_back(tabulate(space.field(f).basis(), srule));
  const int T = space.time_dofs_per_element();
  std::vector<double> phi(T), ex(fields.size());
  double total = 0.0;
  for (int n = 0; n < space.num_elements(); ++n)
    for (int g = 0; g < trule.size(); ++g) {
      const double t = part.node(n) + part.step() * trule.points[g];
      for (int a = 0; a < T; ++a) phi[a] = space.temporal().basis().value(a, trule.points[g]);
      const double wt = part.step() * trule.weights[g];
      for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry geo(mesh, c);
        for (int p = 0; p < srule.size(); ++p) {
          exact(t, geo.map(srule.points[p]), ex);
          double sum = 0.0;
          for (std::size_t k = 0; k < fields.size(); ++k) {
            const ScalarSpatialSpace& fs = space.field(fields[k]);
            auto dofs = fs.cell_dofs(c);
            double uh = 0.0;
            for (int a = 0; a < T; ++a) {
              if (phi[a] == 0.0) continue;
              const std::int64_t off = space.index(n, a, fields[k], 0);
              double v = 0.0;
              for (std::size_t i = 0; i < dofs.size(); ++i) v += state[off + dofs[i]] * tabs[k].v(p, static_cast<int>(i));
              uh += phi[a] * v;
            }
            const double e = uh - ex[k];
            sum += e * e;
          }
          total += wt * srule.weights[p] * geo.abs_det * sum;
        }
      }
    }
  return std::sqrt(total);
}

}  // namespace wrmg
