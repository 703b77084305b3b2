#include <cmath>
#include <random>

#include "doctest.h"
#include "wrmg/dense.hpp"
#include "wrmg/direct.hpp"
#include "wrmg/forms.hpp"
#include "wrmg/krylov.hpp"
#include "wrmg/problems.hpp"

using namespace wrmg;

namespace {
std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

LinearMap identity_map() {
  return [](std::span<const double> x, std::span<double> y) { std::copy(x.begin(), x.end(), y.begin()); };
}

double relative_residual(const SpaceTimeOperator& op, std::span<const double> x, std::span<const double> b) {
  std::vector<double> r(b.size());
  op.apply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return norm2(r) / norm2(b);
}
}  // namespace

TEST_CASE("dense LU") {
  const DenseLU id = dense_factorize(Eigen::MatrixXd::Identity(3, 3));
  std::vector<double> b{1, 2, 3};
  CHECK(dense_solve(id, b) == b);

  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  const auto x = dense_solve(dense_factorize(swap), std::vector<double>{1, 2});
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(1.0));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd a(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) a(i, j) = u(rng) + (i == j ? 10.0 : 0.0);
  const auto rhs = random_vector(50, 11);
  const auto sol = dense_solve(dense_factorize(a), rhs);
  Eigen::VectorXd r = a * Eigen::Map<const Eigen::VectorXd>(sol.data(), 50) - Eigen::Map<const Eigen::VectorXd>(rhs.data(), 50);
  CHECK(r.norm() / Eigen::Map<const Eigen::VectorXd>(rhs.data(), 50).norm() <= 1e-12);

  Eigen::MatrixXd singular = Eigen::MatrixXd::Ones(3, 3);
  CHECK_THROWS_AS(dense_factorize(singular), SingularMatrixError);
  CHECK_THROWS_AS(dense_factorize(Eigen::MatrixXd(2, 3)), std::invalid_argument);
}

TEST_CASE("fgmres small systems") {
  KrylovConfig cfg;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-14;
  {
    const auto b = random_vector(7, 1);
    std::vector<double> x(7, 0.0);
    const auto res = fgmres(identity_map(), identity_map(), b, x, cfg);
    CHECK(res.converged());
    CHECK(res.iterations == 1);
    for (int i = 0; i < 7; ++i) CHECK(x[i] == doctest::Approx(b[i]));
  }
  {
    LinearMap diag = [](std::span<const double> x, std::span<double> y) {
      y[0] = x[0];
      y[1] = 10 * x[1];
    };
    std::vector<double> b{1, 1}, x{0, 0};
    const auto res = fgmres(diag, identity_map(), b, x, cfg);
    CHECK(res.converged());
    CHECK(res.iterations <= 2);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(0.1).epsilon(1e-12));
  }
  {
    std::vector<double> b(5, 0.0), x(5, 0.0);
    const auto res = fgmres(identity_map(), identity_map(), b, x, cfg);
    CHECK(res.converged());
    CHECK(res.iterations == 0);
  }
}

TEST_CASE("fgmres history is non-increasing and breakdown is distinct") {
  const int n = 40;
  LinearMap op = [n](std::span<const double> x, std::span<double> y) {
    for (int i = 0; i < n; ++i) y[i] = (2.0 + 0.1 * i) * x[i] - (i > 0 ? x[i - 1] : 0.0) - 0.5 * (i + 1 < n ? x[i + 1] : 0.0);
  };
  const auto b = random_vector(n, 5);
  std::vector<double> x(n, 0.0);
  KrylovConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-14;
  const auto res = fgmres(op, identity_map(), b, x, cfg);
  CHECK(res.converged());
  CHECK(static_cast<int>(res.residual_history.size()) == res.iterations + 1);
  for (std::size_t i = 1; i < res.residual_history.size(); ++i)
    CHECK(res.residual_history[i] <= res.residual_history[i - 1] * (1 + 1e-12));

  KrylovConfig few = cfg;
  few.max_iterations = 3;
  std::vector<double> y(n, 0.0);
  CHECK(fgmres(op, identity_map(), b, y, few).status == KrylovStatus::max_iterations);

  // A nilpotent operator makes the Krylov space collapse: breakdown.
  LinearMap shift = [n](std::span<const double> x, std::span<double> y) {
    y[0] = 0.0;
    for (int i = 1; i < n; ++i) y[i] = x[i - 1];
  };
  std::vector<double> e(n, 0.0), z(n, 0.0);
  e[n - 1] = 1.0;
  CHECK(fgmres(shift, identity_map(), e, z, cfg).status == KrylovStatus::breakdown);
}

TEST_CASE("arnoldi on the identity") {
  const auto start = random_vector(30, 2);
  const auto a = preconditioned_arnoldi(identity_map(), identity_map(), start, 50);
  CHECK(a.steps >= 1);
  CHECK(a.hessenberg(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("space-time operator structure and direct solver") {
  auto h = build_hierarchy(2, 2, 1);
  TemporalSpace ts(TimePartition(0.1, 4), 1);
  auto space = make_scalar_spacetime(h.back(), 2, ts);
  std::vector<double> u0(space->spatial_size());
  for (int i = 0; i < space->spatial_size(); ++i) u0[i] = heat_initial(space->field(0).dof_point(i));
  auto [op, rhs] = assemble_heat(space, u0);
  CHECK(op.has_uniform_diagonal());

  const CsrMatrix global = op.to_csr();
  CHECK(global.nnz() == op.nnz_stored());
  for (int r = 0; r < global.rows; ++r)
    for (auto p = global.row_ptr[r]; p < global.row_ptr[r + 1]; ++p) {
      const int rn = r / op.block_size(), cn = global.col[p] / op.block_size();
      CHECK((cn == rn || cn == rn - 1));
    }
  const auto x = random_vector(global.rows, 9);
  std::vector<double> y1(x.size()), y2(x.size());
  op.apply(x, y1);
  global.multiply(x, y2);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

  BlockTriangularSolver solver(op);
  CHECK(solver.num_factorizations() == 1);
  std::vector<double> sol(rhs.size());
  solver.solve(rhs, sol);
  CHECK(relative_residual(op, sol, rhs) <= 1e-10);

  // N = 1 reduces to one block solve.
  TemporalSpace one(TimePartition(0.1, 1), 1);
  auto s1 = make_scalar_spacetime(h.back(), 2, one);
  auto [op1, rhs1] = assemble_heat(s1, u0);
  const auto sol1 = block_triangular_direct_solve(op1, rhs1);
  CHECK(relative_residual(op1, sol1, rhs1) <= 1e-10);
}

TEST_CASE("direct solver on the Stokes operator with pinned pressure") {
  auto h = build_hierarchy(2, 2, 1);
  TemporalSpace ts(TimePartition(0.02, 3), 1);
  auto space = make_taylor_hood_spacetime(h.back(), 1, ts);
  SpaceTimeForms forms(space, cavity_bcs(*space));
  std::vector<double> zero(space->size(), 0.0);
  const SpaceTimeOperator jac = forms.ns_jacobian(zero, 1.0);
  auto b = random_vector(space->size(), 4);
  forms.zero_constrained(b);
  forms.project_pressure(b);
  BlockTriangularSolver solver(jac, forms.pressure_pins());
  std::vector<double> x(b.size());
  solver.solve(b, x);
  forms.project_pressure(x);
  for (double v : x) CHECK(std::isfinite(v));
  std::vector<double> r(b.size());
  jac.apply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  CHECK(norm2(r) / norm2(b) <= 1e-10);
  // The divergence rows in particular.
  double div = 0.0;
  for (int n = 0; n < space->num_elements(); ++n)
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < space->field(2).num_dofs(); ++i) div = std::max(div, std::abs(r[space->index(n, a, 2, i)]));
  CHECK(div <= 1e-10 * norm2(b));
}
