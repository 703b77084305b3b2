#include "wrmg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wrmg {

namespace {

void subtract_apply(const SpaceTimeOperator& op, std::span<const double> b, std::span<const double> x,
                    std::span<double> r) {
  op.apply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

PatchSet level_patches(const SpaceTimeForms& forms) {
  return forms.is_navier_stokes() ? build_vanka_star_patches(forms.space(), forms.bcs())
                                  : build_vertex_star_patches(forms.space(), forms.bcs());
}

}  // namespace

MemoryLimitError::MemoryLimitError(std::int64_t needed, std::int64_t limit)
    : std::runtime_error("estimated storage " + std::to_string(needed / (1 << 20)) + " MiB exceeds limit " +
                         std::to_string(limit / (1 << 20)) + " MiB"),
      needed_(needed),
      limit_(limit) {}

MgHierarchy::MgHierarchy(std::vector<std::shared_ptr<const SpaceTimeForms>> levels, MgOptions options)
    : levels_(std::move(levels)), options_(options) {
  if (levels_.empty()) throw std::invalid_argument("MgHierarchy: no levels");
  const auto& tp = levels_.front()->space().temporal();
  transfers_.resize(levels_.size());
  patches_.resize(levels_.size());
  for (std::size_t l = 1; l < levels_.size(); ++l) patches_[l] = level_patches(*levels_[l]);
  for (std::size_t l = 1; l < levels_.size(); ++l) {
    const auto& t = levels_[l]->space().temporal();
    if (t.num_elements() != tp.num_elements() || t.degree() != tp.degree() ||
        t.partition().t_final() != tp.partition().t_final())
      throw std::invalid_argument("MgHierarchy: levels must share the temporal space");
    transfers_[l] = std::make_unique<TransferPair>(levels_[l - 1]->space_ptr(), levels_[l]->space_ptr(),
                                                   &levels_[l - 1]->bcs(), &levels_[l]->bcs());
  }
}

void MgHierarchy::clear_operators() {
  coarse_.reset();
  smoothers_.clear();
  cheb_.clear();
  ops_.clear();
}

void MgHierarchy::set_operators(std::vector<SpaceTimeOperator> ops) {
  if (ops.size() != levels_.size()) throw std::invalid_argument("MgHierarchy: one operator per level required");
  clear_operators();
  ops_ = std::move(ops);
  smoothers_.resize(levels_.size());
  cheb_.resize(levels_.size());
  coarse_ = std::make_unique<BlockTriangularSolver>(ops_[0], levels_[0]->pressure_pins());
  for (int l = 1; l < num_levels(); ++l) {
    smoothers_[l] = std::make_unique<PatchSmoother>(ops_[l], patches_[l], options_.threads,
                                                    projector(l));
    cheb_[l] = estimate_lambda_max(ops_[l].as_map(), smoothers_[l]->as_map(), ops_[l].size(),
                                   options_.seed + static_cast<std::uint64_t>(l), options_.eig_steps, projector(l),
                                   options_.cheb_lower, options_.cheb_upper);
    cheb_[l].degree = options_.cheb_degree;
  }
}

std::int64_t MgHierarchy::estimate_setup_bytes(bool distinct_blocks) const {
  std::int64_t total = 0;
  for (int l = 0; l < num_levels(); ++l) {
    const SpaceTimeSpace& s = levels_[l]->space();
    const std::int64_t t = s.time_dofs_per_element();
    const std::int64_t blocks = distinct_blocks ? s.num_elements() : 1;
    const std::int64_t block_nnz = static_cast<std::int64_t>(levels_[l]->spatial_pattern().nnz()) * t * t;
    total += block_nnz * 12 * (blocks + 1);  // diagonal blocks plus the coupling block
    if (l == 0) {
      const std::int64_t b = s.block_size();
      // dense LU below the dense limit; sparse LU fill is taken as 10x the block
      total += blocks * (b <= BlockTriangularSolver::kDenseLimit ? b * b * 8 : block_nnz * 12 * 10);
    } else {
      std::int64_t per_block = 0;
      for (const auto& p : patches_[l].patches()) {
        const std::int64_t m = t * static_cast<std::int64_t>(p.size());
        per_block += m * m * 8;
      }
      total += per_block * blocks;
    }
  }
  return total;
}

void MgHierarchy::check_memory(bool distinct_blocks) const {
  if (options_.memory_limit_bytes <= 0) return;
  const std::int64_t need = estimate_setup_bytes(distinct_blocks);
  if (need > options_.memory_limit_bytes) throw MemoryLimitError(need, options_.memory_limit_bytes);
}

std::vector<double> MgHierarchy::lambdas() const {
  std::vector<double> out;
  for (int l = 1; l < static_cast<int>(cheb_.size()); ++l) out.push_back(cheb_[l].lambda_max);
  return out;
}

Projector MgHierarchy::projector(int l) const {
  const SpaceTimeForms* f = levels_[l].get();
  if (!f->bcs().pressure_nullspace) return {};
  return [f](std::span<double> v) { f->project_pressure(v); };
}

void MgHierarchy::v_cycle(int level, std::span<const double> rhs, std::span<double> x) const {
  if (ops_.empty()) throw std::logic_error("MgHierarchy: operators not set");
  const Projector proj = projector(level);
  if (level == 0) {
    coarse_->solve(rhs, x);
    if (proj) proj(x);
    return;
  }
  const SpaceTimeOperator& a = ops_[level];
  const LinearMap amap = a.as_map();
  const LinearMap sweep = smoothers_[level]->as_map();
  const std::size_t n = rhs.size();

  chebyshev_smooth(amap, sweep, cheb_[level], rhs, x, proj);

  std::vector<double> r(n);
  subtract_apply(a, rhs, x, r);
  if (proj) proj(r);
  const TransferPair& t = *transfers_[level];
  std::vector<double> rc(static_cast<std::size_t>(ops_[level - 1].size())), ec(rc.size(), 0.0);
  t.restrict_to_coarse(r, rc);
  v_cycle(level - 1, rc, ec);
  std::vector<double> e(n);
  t.prolong(ec, e);
  for (std::size_t i = 0; i < n; ++i) x[i] += e[i];

  subtract_apply(a, rhs, x, r);
  if (proj) proj(r);
  chebyshev_smooth(amap, sweep, cheb_[level], r, e, proj);
  for (std::size_t i = 0; i < n; ++i) x[i] += e[i];
  if (proj) proj(x);
}

LinearMap MgHierarchy::preconditioner() const {
  const int top = num_levels() - 1;
  return [this, top](std::span<const double> in, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    v_cycle(top, in, out);
  };
}

std::vector<std::vector<double>> MgHierarchy::inject_state(std::span<const double> fine) const {
  std::vector<std::vector<double>> s(levels_.size());
  s.back().assign(fine.begin(), fine.end());
  for (int l = num_levels() - 1; l > 0; --l) {
    s[l - 1].assign(static_cast<std::size_t>(levels_[l - 1]->space().size()), 0.0);
    transfers_[l]->inject(s[l], s[l - 1]);
  }
  return s;
}

std::vector<std::shared_ptr<const SpaceTimeForms>> build_level_forms(
    ProblemKind kind, const std::vector<std::shared_ptr<const MeshLevel>>& meshes, int spatial_degree,
    const TemporalSpace& temporal, int threads) {
  std::vector<std::shared_ptr<const SpaceTimeForms>> out;
  for (const auto& mesh : meshes) {
    auto space = kind == ProblemKind::Heat ? make_scalar_spacetime(mesh, spatial_degree, temporal)
                                           : make_taylor_hood_spacetime(mesh, spatial_degree, temporal);
    BoundaryConditions bcs = problem_bcs(kind, *space);
    out.push_back(std::make_shared<const SpaceTimeForms>(space, std::move(bcs), threads));
  }
  return out;
}

LinearSolveResult solve_linear_wrmg(const MgHierarchy& hier, std::span<const double> rhs, const KrylovConfig& cfg) {
  const int top = hier.num_levels() - 1;
  LinearSolveResult out;
  out.solution.assign(rhs.size(), 0.0);
  out.krylov = fgmres(hier.op(top).as_map(), hier.preconditioner(), rhs, out.solution, cfg, hier.projector(top));
  return out;
}

int NewtonResult::total_linear_iterations() const {
  int s = 0;
  for (int i : linear_iterations) s += i;
  return s;
}

double eisenstat_walker(const NewtonConfig& cfg, double norm, double previous_norm, double previous_eta) {
  double eta = cfg.gamma * std::pow(norm / previous_norm, cfg.alpha);
  const double safeguard = cfg.gamma * std::pow(previous_eta, cfg.alpha);
  if (safeguard > 0.1) eta = std::max(eta, safeguard);
  return std::min(eta, cfg.eta_max);
}

std::vector<double> newton_initial_guess(const SpaceTimeForms& forms, std::span<const double> initial) {
  const SpaceTimeSpace& s = forms.space();
  std::vector<double> u(static_cast<std::size_t>(s.size()), 0.0);
  const int nvel = s.field_offset(2);
  const int slots = static_cast<int>(s.size() / s.spatial_size());
  for (int a = 0; a < slots; ++a)
    std::copy(initial.begin(), initial.begin() + nvel, u.begin() + static_cast<std::int64_t>(a) * s.spatial_size());
  forms.apply_dirichlet_values(u);
  return u;
}

NewtonResult solve_newton(MgHierarchy& hier, std::span<const double> initial, double reynolds,
                          std::vector<double> guess, const NewtonConfig& cfg) {
  if (!(cfg.eta0 > 0.0 && cfg.eta0 <= cfg.eta_max && cfg.eta_max < 1.0))
    throw std::invalid_argument("solve_newton: need 0 < eta0 <= eta_max < 1");
  const SpaceTimeForms& fine = hier.finest();
  if (cfg.linear == LinearSolverKind::wrmg) hier.check_memory(true);
  const Projector proj = hier.projector(hier.num_levels() - 1);
  NewtonResult res;
  res.state = std::move(guess);
  if (res.state.size() != static_cast<std::size_t>(fine.space().size()))
    throw std::invalid_argument("solve_newton: guess has the wrong size");

  auto residual = [&] {
    std::vector<double> f = fine.ns_residual(res.state, initial, reynolds);
    if (proj) proj(f);
    return f;
  };
  std::vector<double> f = residual();
  double norm = norm2(f);
  const double norm0 = norm;
  res.residual_history.push_back(norm);
  double eta = cfg.eta0;

  while (true) {
    if (!std::isfinite(norm)) {
      res.status = "failed: non-finite residual";
      break;
    }
    if (norm <= cfg.rtol * norm0 || norm == 0.0) {
      res.converged = true;
      res.status = "converged";
      break;
    }
    if (res.iterations >= cfg.max_iterations) {
      res.status = "failed: max Newton iterations";
      break;
    }
    if (res.iterations > 0) eta = eisenstat_walker(cfg, norm, res.residual_history[res.iterations - 1], eta);
    res.forcing_terms.push_back(eta);

    std::vector<double> rhs(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = -f[i];
    std::vector<double> delta(f.size(), 0.0);
    KrylovResult kr;
    if (cfg.linear == LinearSolverKind::direct) {
      hier.clear_operators();
      SpaceTimeOperator j = fine.ns_jacobian(res.state, reynolds);
      delta = block_triangular_direct_solve(j, rhs, fine.pressure_pins());
      if (proj) proj(delta);
      std::vector<double> r(f.size());
      subtract_apply(j, rhs, delta, r);
      if (proj) proj(r);
      kr.iterations = 1;
      kr.residual_history = {norm2(rhs), norm2(r)};
      res.lambdas.emplace_back();
    } else {
      hier.clear_operators();
      auto states = hier.inject_state(res.state);
      std::vector<SpaceTimeOperator> ops;
      for (int l = 0; l < hier.num_levels(); ++l) ops.push_back(hier.forms(l).ns_jacobian(states[l], reynolds));
      states.clear();
      hier.set_operators(std::move(ops));
      res.lambdas.push_back(hier.lambdas());
      KrylovConfig kc;
      kc.rtol = eta;
      kc.atol = cfg.linear_atol;
      kc.max_iterations = cfg.max_linear_iterations;
      kr = fgmres(hier.op(hier.num_levels() - 1).as_map(), hier.preconditioner(), rhs, delta, kc, proj);
    }
    res.linear_iterations.push_back(kr.iterations);
    res.linear_histories.push_back(kr.residual_history);
    if (!kr.converged()) {
      res.status = std::string("failed: linear solve ") + to_string(kr.status);
      break;
    }
    for (std::size_t i = 0; i < delta.size(); ++i) res.state[i] += delta[i];
    ++res.iterations;
    f = residual();
    norm = norm2(f);
    res.residual_history.push_back(norm);
  }
  return res;
}

std::vector<double> end_trace(const SpaceTimeSpace& space, std::span<const double> state, int n) {
  const int ns = space.spatial_size();
  const auto& t1 = space.temporal().end_trace();
  std::vector<double> out(ns, 0.0);
  for (int a = 0; a < space.time_dofs_per_element(); ++a) {
    const std::int64_t base = space.index(n, a, 0, 0);
    for (int i = 0; i < ns; ++i) out[i] += t1[a] * state[base + i];
  }
  return out;
}

TimesteppingResult solve_timestepping(MgHierarchy& step_hier, const SpaceTimeSpace& full_space, ProblemKind kind,
                                      std::span<const double> initial, double reynolds,
                                      const KrylovConfig& linear_cfg, const NewtonConfig& newton_cfg) {
  const SpaceTimeForms& step = step_hier.finest();
  const SpaceTimeSpace& s1 = step.space();
  if (s1.num_elements() != 1 || s1.block_size() != full_space.block_size() ||
      std::abs(s1.temporal().partition().step() - full_space.temporal().partition().step()) >
          1e-14 * full_space.temporal().partition().step())
    throw std::invalid_argument("solve_timestepping: step hierarchy must hold one element of the same step");

  TimesteppingResult out;
  out.state.assign(static_cast<std::size_t>(full_space.size()), 0.0);
  std::vector<double> prev(initial.begin(), initial.end());
  const bool linear = kind == ProblemKind::Heat;
  if (linear) {
    step_hier.check_memory(false);
    std::vector<SpaceTimeOperator> ops;
    for (int l = 0; l < step_hier.num_levels(); ++l) ops.push_back(step_hier.forms(l).heat_operator());
    step_hier.set_operators(std::move(ops));
    out.lambdas = step_hier.lambdas();
  }

  for (int n = 0; n < full_space.num_elements(); ++n) {
    std::vector<double> u;
    if (linear) {
      const std::vector<double> rhs = step.initial_jump_rhs(prev);
      LinearSolveResult r = solve_linear_wrmg(step_hier, rhs, linear_cfg);
      out.newton_iterations.push_back(0);
      out.linear_iterations.push_back(r.krylov.iterations);
      out.linear_histories.push_back(r.krylov.residual_history);
      if (!r.krylov.converged()) {
        out.converged = false;
        out.status = std::string("failed: linear solve ") + to_string(r.krylov.status) + " at step " +
                     std::to_string(n);
      }
      u = std::move(r.solution);
    } else {
      std::vector<double> guess(static_cast<std::size_t>(s1.size()));
      for (int a = 0; a < s1.time_dofs_per_element(); ++a)
        std::copy(prev.begin(), prev.end(), guess.begin() + static_cast<std::int64_t>(a) * s1.spatial_size());
      step.apply_dirichlet_values(guess);
      NewtonResult r = solve_newton(step_hier, prev, reynolds, std::move(guess), newton_cfg);
      if (n == 0 && !r.lambdas.empty()) out.lambdas = r.lambdas.front();
      out.newton_iterations.push_back(r.iterations);
      out.linear_iterations.push_back(r.total_linear_iterations());
      for (auto& h : r.linear_histories) out.linear_histories.push_back(std::move(h));
      out.nonlinear_histories.push_back(r.residual_history);
      if (!r.converged) {
        out.converged = false;
        out.status = r.status + " at step " + std::to_string(n);
      }
      u = std::move(r.state);
    }
    std::copy(u.begin(), u.end(), out.state.begin() + full_space.index(n, 0, 0, 0));
    prev = end_trace(s1, u, 0);
    if (!out.converged) break;
  }
  return out;
}

}  // namespace wrmg
