#include "wrmg/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wrmg {

namespace {
constexpr double kBreakdown = 1e-30;

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}
}  // namespace

const char* to_string(KrylovStatus s) {
  switch (s) {
    case KrylovStatus::converged: return "converged";
    case KrylovStatus::max_iterations: return "max_iterations";
    case KrylovStatus::breakdown: return "breakdown";
  }
  return "unknown";
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

KrylovResult fgmres(const LinearMap& op, const LinearMap& precond, std::span<const double> b, std::span<double> x,
                    const KrylovConfig& cfg, const Projector& project) {
  if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0)) throw std::invalid_argument("fgmres: tolerances must be positive");
  const std::size_t n = b.size();
  KrylovResult result;

  std::vector<double> r(n);
  auto residual = [&] {
    op(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    if (project) project(r);
    return norm2(r);
  };

  double beta = residual();
  if (!std::isfinite(beta)) throw std::runtime_error("fgmres: non-finite initial residual");
  result.residual_history.push_back(beta);
  const double target = std::max(cfg.rtol * beta, cfg.atol);
  if (beta <= target) return result;

  const int cycle = cfg.restart > 0 ? cfg.restart : cfg.max_iterations;
  std::vector<std::vector<double>> v, z;
  Eigen::MatrixXd h;
  std::vector<double> cs, sn, g;

  while (true) {
    v.assign(1, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    z.clear();
    h = Eigen::MatrixXd::Zero(cycle + 1, cycle);
    cs.assign(cycle, 0.0);
    sn.assign(cycle, 0.0);
    g.assign(cycle + 1, 0.0);
    g[0] = beta;

    int j = 0;
    bool stop = false;
    double res = beta;
    for (; j < cycle; ++j) {
      z.emplace_back(n);
      precond(v[j], z[j]);
      if (project) project(z[j]);
      std::vector<double> w(n);
      op(z[j], w);
      if (project) project(w);
      for (int i = 0; i <= j; ++i) {
        h(i, j) = dot(w, v[i]);
        axpy(-h(i, j), v[i], w);
      }
      h(j + 1, j) = norm2(w);
      const double subdiag = h(j + 1, j);
      if (subdiag > kBreakdown) {
        for (auto& wi : w) wi /= subdiag;
        v.push_back(std::move(w));
      }
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      if (denom <= kBreakdown) {
        // The new direction is annihilated by the operator; drop it.
        result.status = KrylovStatus::breakdown;
        stop = true;
        break;
      }
      cs[j] = h(j, j) / denom;
      sn[j] = h(j + 1, j) / denom;
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      res = std::abs(g[j + 1]);
      ++result.iterations;
      result.residual_history.push_back(res);

      if (res <= target) {
        result.status = KrylovStatus::converged;
        stop = true;
      } else if (subdiag <= kBreakdown) {
        result.status = KrylovStatus::breakdown;
        stop = true;
      } else if (result.iterations >= cfg.max_iterations) {
        result.status = KrylovStatus::max_iterations;
        stop = true;
      }
      if (stop || j + 1 == cycle) {
        ++j;
        break;
      }
    }

    // back substitution on the rotated Hessenberg
    std::vector<double> y(j);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int l = i + 1; l < j; ++l) s -= h(i, l) * y[l];
      y[i] = s / h(i, i);
    }
    for (int i = 0; i < j; ++i) axpy(y[i], z[i], x);
    if (project) project(x);

    if (stop) return result;
    beta = residual();
  }
}

ArnoldiResult preconditioned_arnoldi(const LinearMap& op, const LinearMap& precond, std::span<const double> start,
                                     int max_steps, const Projector& project) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> v(1, std::vector<double>(start.begin(), start.end()));
  if (project) project(v[0]);
  const double beta = norm2(v[0]);
  if (!(beta > 0.0)) throw std::invalid_argument("preconditioned_arnoldi: zero start vector");
  for (auto& e : v[0]) e /= beta;

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(max_steps + 1, max_steps);
  ArnoldiResult out;
  std::vector<double> z(n), w(n);
  int j = 0;
  for (; j < max_steps; ++j) {
    precond(v[j], z);
    if (project) project(z);
    op(z, w);
    if (project) project(w);
    for (int i = 0; i <= j; ++i) {
      h(i, j) = dot(w, v[i]);
      axpy(-h(i, j), v[i], w);
    }
    h(j + 1, j) = norm2(w);
    if (h(j + 1, j) <= 1e-12 * h.col(j).head(j + 1).norm() || h(j + 1, j) <= kBreakdown) {
      out.breakdown = true;
      ++j;
      break;
    }
    std::vector<double> next(w);
    for (auto& e : next) e /= h(j + 1, j);
    v.push_back(std::move(next));
  }
  out.steps = j;
  out.hessenberg = h.topLeftCorner(j, j);
  return out;
}

}  // namespace wrmg
