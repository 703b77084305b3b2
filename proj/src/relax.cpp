#include "wrmg/relax.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "wrmg/parallel.hpp"

namespace wrmg {

namespace {

void append_unconstrained(std::vector<int>& out, int dof, const BoundaryConditions& bcs) {
  if (!bcs.is_constrained(dof)) out.push_back(dof);
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// DoFs of `field` on the open star of vertex v: the vertex itself plus the
// interiors of incident edges and cells.
void open_star(const SpaceTimeSpace& space, int field, int v, const BoundaryConditions& bcs, std::vector<int>& out) {
  const ScalarSpatialSpace& fs = space.field(field);
  const MeshLevel& mesh = fs.mesh();
  const int off = space.field_offset(field);
  append_unconstrained(out, off + fs.vertex_dof(v), bcs);
  for (int e : mesh.vertex_edges(v))
    for (int d : fs.edge_interior_dofs(e)) append_unconstrained(out, off + d, bcs);
  for (int c : mesh.vertex_cells(v))
    for (int d : fs.cell_interior_dofs(c)) append_unconstrained(out, off + d, bcs);
}

}  // namespace

PatchSet build_vertex_star_patches(const SpaceTimeSpace& space, const BoundaryConditions& bcs) {
  if (space.num_fields() != 1) throw std::invalid_argument("vertex-star patches need a scalar space");
  const MeshLevel& mesh = space.mesh();
  std::vector<std::vector<int>> patches(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    open_star(space, 0, v, bcs, patches[v]);
    patches[v] = sorted_unique(std::move(patches[v]));
  }
  return PatchSet(std::move(patches));
}

PatchSet build_vanka_star_patches(const SpaceTimeSpace& space, const BoundaryConditions& bcs) {
  if (!space.is_taylor_hood()) throw std::invalid_argument("Vanka-star patches need a Taylor-Hood space");
  const MeshLevel& mesh = space.mesh();
  std::vector<std::vector<int>> patches(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    auto& p = patches[v];
    for (int f = 0; f < 2; ++f)
      for (int c : mesh.vertex_cells(v))
        for (int d : space.field(f).cell_dofs(c)) append_unconstrained(p, space.field_offset(f) + d, bcs);
    open_star(space, 2, v, bcs, p);
    p = sorted_unique(std::move(p));
  }
  return PatchSet(std::move(patches));
}

PatchSmoother::PatchSmoother(const SpaceTimeOperator& op, PatchSet patches, int threads, Projector project)
    : patches_(std::move(patches)),
      threads_(std::max(1, threads)),
      project_(std::move(project)),
      spatial_size_(op.space().spatial_size()),
      time_dofs_(op.space().time_dofs_per_element()),
      block_size_(op.block_size()),
      num_elements_(op.num_elements()) {
  std::map<const CsrMatrix*, int> distinct;
  std::vector<const CsrMatrix*> blocks;
  for (int n = 0; n < num_elements_; ++n) {
    const CsrMatrix* b = op.diagonal_ptr(n).get();
    auto [it, inserted] = distinct.emplace(b, static_cast<int>(blocks.size()));
    if (inserted) blocks.push_back(b);
    block_of_element_.push_back(it->second);
  }
  const int np = patches_.size();
  const int ns = spatial_size_;
  const int T = time_dofs_;
  block_factors_.assign(blocks.size(), std::vector<DenseLU>(np));
  coupling_.assign(np, {});
  const CsrMatrix& cpl = op.coupling();

  parallel_for(np, threads_, [&](int p) {
    const auto& dofs = patches_.patch(p);
    const int m = static_cast<int>(dofs.size());
    if (m == 0) return;
    thread_local std::vector<int> local_of;
    if (static_cast<int>(local_of.size()) < ns) local_of.assign(ns, -1);
    for (int l = 0; l < m; ++l) local_of[dofs[l]] = l;
    Eigen::MatrixXd dense(T * m, T * m);
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const CsrMatrix& a = *blocks[bi];
      dense.setZero();
      for (int ta = 0; ta < T; ++ta)
        for (int l = 0; l < m; ++l) {
          const int row = ta * ns + dofs[l];
          for (std::int64_t e = a.row_ptr[row]; e < a.row_ptr[row + 1]; ++e) {
            const int c = a.col[e];
            const int lj = local_of[c % ns];
            if (lj >= 0) dense(ta * m + l, (c / ns) * m + lj) = a.val[e];
          }
        }
      block_factors_[bi][p] = DenseLU::factorize(dense);
    }
    auto& cp = coupling_[p];
    for (int ta = 0; ta < T; ++ta)
      for (int l = 0; l < m; ++l) {
        const int row = ta * ns + dofs[l];
        for (std::int64_t e = cpl.row_ptr[row]; e < cpl.row_ptr[row + 1]; ++e) {
          const int c = cpl.col[e];
          const int lj = local_of[c % ns];
          if (lj >= 0 && cpl.val[e] != 0.0) cp.push_back({ta * m + l, (c / ns) * m + lj, cpl.val[e]});
        }
      }
    for (int l = 0; l < m; ++l) local_of[dofs[l]] = -1;
  });
}

std::int64_t PatchSmoother::factor_bytes() const {
  std::int64_t total = 0;
  for (const auto& per_block : block_factors_)
    for (const auto& f : per_block) total += static_cast<std::int64_t>(f.size()) * f.size() * 8;
  return total;
}

std::int64_t PatchSmoother::estimate_factor_bytes(const SpaceTimeOperator& op, const PatchSet& patches) {
  std::set<const CsrMatrix*> distinct;
  for (int n = 0; n < op.num_elements(); ++n) distinct.insert(op.diagonal_ptr(n).get());
  const std::int64_t t = op.space().time_dofs_per_element();
  std::int64_t per_block = 0;
  for (const auto& p : patches.patches()) {
    const std::int64_t m = t * static_cast<std::int64_t>(p.size());
    per_block += m * m * 8;
  }
  return per_block * static_cast<std::int64_t>(distinct.size());
}

void PatchSmoother::solve_patch(int p, std::span<const double> r, std::span<double> z,
                                std::vector<double>& work) const {
  const auto& dofs = patches_.patch(p);
  const int m = static_cast<int>(dofs.size());
  if (m == 0) return;
  const int T = time_dofs_;
  const int M = T * m;
  work.resize(2 * static_cast<std::size_t>(M));
  double* prev = work.data();
  double* cur = work.data() + M;
  for (int n = 0; n < num_elements_; ++n) {
    const std::int64_t base = static_cast<std::int64_t>(n) * block_size_;
    for (int a = 0; a < T; ++a)
      for (int l = 0; l < m; ++l) cur[a * m + l] = r[base + static_cast<std::int64_t>(a) * spatial_size_ + dofs[l]];
    if (n > 0)
      for (const auto& e : coupling_[p]) cur[e.row] -= e.val * prev[e.col];
    block_factors_[block_of_element_[n]][p].solve_in_place(std::span<double>(cur, M));
    for (int a = 0; a < T; ++a)
      for (int l = 0; l < m; ++l) z[base + static_cast<std::int64_t>(a) * spatial_size_ + dofs[l]] += cur[a * m + l];
    std::swap(prev, cur);
  }
}

void PatchSmoother::apply(std::span<const double> r, std::span<double> z) const {
  const int np = patches_.size();
  std::fill(z.begin(), z.end(), 0.0);
  const int nt = std::min(threads_, std::max(1, np));
  if (nt == 1) {
    std::vector<double> work;
    for (int p = 0; p < np; ++p) solve_patch(p, r, z, work);
  } else {
    std::vector<std::vector<double>> partial(nt, std::vector<double>(z.size(), 0.0));
    parallel_for(nt, nt, [&](int t) {
      std::vector<double> work;
      const int begin = static_cast<int>(static_cast<long long>(np) * t / nt);
      const int end = static_cast<int>(static_cast<long long>(np) * (t + 1) / nt);
      for (int p = begin; p < end; ++p) solve_patch(p, r, partial[t], work);
    });
    for (int t = 0; t < nt; ++t)
      for (std::size_t i = 0; i < z.size(); ++i) z[i] += partial[t][i];
  }
  if (project_) project_(z);
}

LinearMap PatchSmoother::as_map() const {
  return [this](std::span<const double> r, std::span<double> z) { apply(r, z); };
}

ChebyshevParams ChebyshevParams::from_interval(double lower, double upper, int degree) {
  if (!(upper > 0.0) || !(lower > 0.0) || lower > upper)
    throw std::invalid_argument("ChebyshevParams: need 0 < lower <= upper");
  if (degree < 1) throw std::invalid_argument("ChebyshevParams: degree must be positive");
  ChebyshevParams c;
  c.degree = degree;
  c.lambda_max = upper;
  c.lower = lower;
  c.upper = upper;
  if (upper - lower < kDegenerateWidth * upper) {
    const double mid = 0.5 * (upper + lower);
    c.lower = mid * (1.0 - kDegenerateWidth);
    c.upper = mid * (1.0 + kDegenerateWidth);
  }
  return c;
}

ChebyshevParams ChebyshevParams::from_lambda(double lambda, double lower_factor, double upper_factor, int degree) {
  ChebyshevParams c = from_interval(lower_factor * lambda, upper_factor * lambda, degree);
  c.lambda_max = lambda;
  return c;
}

ChebyshevParams estimate_lambda_max(const LinearMap& op, const LinearMap& sweep, std::int64_t size,
                                    std::uint64_t seed, int steps, const Projector& project, double lower_factor,
                                    double upper_factor) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> start(size);
  for (double& x : start) x = u(rng);
  const ArnoldiResult a = preconditioned_arnoldi(op, sweep, start, steps, project);
  double lambda = 1.0;
  if (a.steps > 0) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a.hessenberg, false);
    lambda = es.eigenvalues().cwiseAbs().maxCoeff();
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) lambda = 1.0;
  ChebyshevParams c = ChebyshevParams::from_lambda(lambda, lower_factor, upper_factor);
  c.estimate_steps = a.steps;
  c.estimate_breakdown = a.breakdown && a.steps < 5;
  return c;
}

void chebyshev_smooth(const LinearMap& op, const LinearMap& sweep, const ChebyshevParams& params,
                      std::span<const double> r, std::span<double> e, const Projector& project) {
  const std::size_t n = r.size();
  const double theta = 0.5 * (params.upper + params.lower);
  const double delta = 0.5 * (params.upper - params.lower);
  const double sigma = theta / delta;
  double rho = 1.0 / sigma;
  std::vector<double> d(n), res(r.begin(), r.end()), tmp(n);
  sweep(r, tmp);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = tmp[i] / theta;
    e[i] = d[i];
  }
  for (int k = 1; k < params.degree; ++k) {
    op(d, tmp);
    for (std::size_t i = 0; i < n; ++i) res[i] -= tmp[i];
    const double rho_next = 1.0 / (2.0 * sigma - rho);
    sweep(res, tmp);
    const double c1 = rho_next * rho, c2 = 2.0 * rho_next / delta;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = c1 * d[i] + c2 * tmp[i];
      e[i] += d[i];
    }
    rho = rho_next;
  }
  if (project) project(e);
}

}  // namespace wrmg
