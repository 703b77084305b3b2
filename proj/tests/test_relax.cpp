#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "wrmg/problems.hpp"
#include "wrmg/relax.hpp"

using namespace wrmg;

namespace {
std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

int vertex_at(const MeshLevel& mesh, double x, double y) {
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (std::abs(mesh.vertices()[v].x - x) < 1e-12 && std::abs(mesh.vertices()[v].y - y) < 1e-12) return v;
  return -1;
}

std::shared_ptr<const SpaceTimeSpace> heat_space(int nx, int k, int q, int n) {
  auto mesh = build_hierarchy(nx, nx, 0).back();
  return make_scalar_spacetime(mesh, k, TemporalSpace(TimePartition(0.02, n), q));
}

std::shared_ptr<const SpaceTimeSpace> th_space(int nx, int k, int q, int n) {
  auto mesh = build_hierarchy(nx, nx, 0).back();
  return make_taylor_hood_spacetime(mesh, k, TemporalSpace(TimePartition(0.02, n), q));
}

LinearMap identity_map() {
  return [](std::span<const double> in, std::span<double> out) { std::copy(in.begin(), in.end(), out.begin()); };
}
}  // namespace

TEST_CASE("vertex-star patch sizes at an interior vertex") {
  const int expected[] = {1, 7, 19};
  for (int k : {1, 2, 3}) {
    auto s = heat_space(4, k, 0, 1);
    const auto patches = build_vertex_star_patches(*s, natural_bcs(*s));
    const int v = vertex_at(s->mesh(), 0.5, 0.5);
    REQUIRE(v >= 0);
    CHECK(static_cast<int>(patches.vertex_patch(v).size()) == expected[k - 1]);
  }
}

TEST_CASE("vanka-star patch sizes at an interior vertex") {
  const int total[] = {39, 81};
  const int pressure[] = {1, 7};
  for (int k : {1, 2}) {
    auto s = th_space(4, k, 0, 1);
    const auto patches = build_vanka_star_patches(*s, cavity_bcs(*s));
    const int v = vertex_at(s->mesh(), 0.5, 0.5);
    const auto& p = patches.vertex_patch(v);
    CHECK(static_cast<int>(p.size()) == total[k - 1]);
    const auto np = std::count_if(p.begin(), p.end(), [&](int i) { return i >= s->field_offset(2); });
    CHECK(np == pressure[k - 1]);
    CHECK(std::count_if(p.begin(), p.end(), [&](int i) { return i < s->field_offset(1); }) ==
          (total[k - 1] - pressure[k - 1]) / 2);
  }
}

TEST_CASE("patches exclude constrained DoFs and cover the rest") {
  for (int k : {1, 2}) {
    auto s = th_space(3, k, 0, 1);
    const auto bcs = cavity_bcs(*s);
    const auto patches = build_vanka_star_patches(*s, bcs);
    std::set<int> covered;
    for (const auto& p : patches.patches()) {
      CHECK(std::is_sorted(p.begin(), p.end()));
      for (int i : p) {
        CHECK_FALSE(bcs.is_constrained(i));
        covered.insert(i);
      }
    }
    CHECK(static_cast<int>(covered.size()) == s->spatial_size() - bcs.num_constrained());
  }
  for (int k : {1, 2, 3}) {
    auto s = heat_space(3, k, 0, 1);
    const auto patches = build_vertex_star_patches(*s, natural_bcs(*s));
    std::set<int> covered;
    for (const auto& p : patches.patches()) covered.insert(p.begin(), p.end());
    CHECK(static_cast<int>(covered.size()) == s->spatial_size());
  }
}

TEST_CASE("a single patch holding every DoF is an exact solve") {
  auto s = heat_space(2, 2, 1, 3);
  SpaceTimeForms forms(s, natural_bcs(*s));
  const auto op = forms.heat_operator();
  std::vector<int> all(s->spatial_size());
  for (int i = 0; i < s->spatial_size(); ++i) all[i] = i;
  PatchSmoother sm(op, PatchSet({all}));
  const auto r = random_vector(op.size(), 5);
  std::vector<double> z(op.size()), az(op.size());
  sm.apply(r, z);
  op.apply(z, az);
  double res = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) res = std::max(res, std::abs(az[i] - r[i]));
  CHECK(res <= 1e-10);
}

TEST_CASE("patch time marching equals the monolithic patch solve") {
  auto s = th_space(2, 1, 1, 3);
  SpaceTimeForms forms(s, cavity_bcs(*s), 1);
  std::vector<double> u0(s->spatial_size(), 0.0);
  auto state = random_vector(s->size(), 9);
  forms.apply_dirichlet_values(state);
  const auto op = forms.ns_jacobian(state, 10.0);
  const auto patches = build_vanka_star_patches(*s, forms.bcs());
  const CsrMatrix a = op.to_csr();
  const auto r = random_vector(op.size(), 11);
  for (int p = 0; p < patches.size(); ++p) {
    const auto& dofs = patches.patch(p);
    if (dofs.empty()) continue;
    PatchSmoother one(op, PatchSet({dofs}));
    std::vector<double> z(op.size());
    one.apply(r, z);
    // Dense system on every space-time index of the patch.
    std::vector<std::int64_t> idx;
    for (int n = 0; n < s->num_elements(); ++n)
      for (int t = 0; t < s->time_dofs_per_element(); ++t)
        for (int i : dofs) idx.push_back(static_cast<std::int64_t>(n) * s->block_size() + t * s->spatial_size() + i);
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd dense(m, m);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) {
      rhs[i] = r[idx[i]];
      for (int j = 0; j < m; ++j) dense(i, j) = a.at(static_cast<int>(idx[i]), static_cast<int>(idx[j]));
    }
    const Eigen::VectorXd x = dense.partialPivLu().solve(rhs);
    double err = 0.0;
    for (int i = 0; i < m; ++i) err = std::max(err, std::abs(z[idx[i]] - x[i]));
    CHECK(err <= 1e-11 * std::max(1.0, x.cwiseAbs().maxCoeff()));
    if (p > 6) break;
  }
}

TEST_CASE("additive sweep: zero residual, constrained DoFs and worker count") {
  auto s = th_space(3, 1, 1, 3);
  SpaceTimeForms forms(s, cavity_bcs(*s));
  auto state = random_vector(s->size(), 3);
  forms.apply_dirichlet_values(state);
  const auto op = forms.ns_jacobian(state, 10.0);
  const auto patches = build_vanka_star_patches(*s, forms.bcs());
  PatchSmoother serial(op, patches, 1);
  PatchSmoother threaded(op, patches, 3);
  std::vector<double> zero(op.size(), 0.0), z(op.size(), 1.0);
  serial.apply(zero, z);
  CHECK(*std::max_element(z.begin(), z.end()) == 0.0);
  CHECK(*std::min_element(z.begin(), z.end()) == 0.0);

  const auto r = random_vector(op.size(), 4);
  std::vector<double> z1(op.size()), z2(op.size());
  serial.apply(r, z1);
  threaded.apply(r, z2);
  double dev = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < z1.size(); ++i) {
    dev = std::max(dev, std::abs(z1[i] - z2[i]));
    scale = std::max(scale, std::abs(z1[i]));
  }
  CHECK(dev <= 1e-13 * scale);
  for (int n = 0; n < s->num_elements(); ++n)
    for (int t = 0; t < s->time_dofs_per_element(); ++t)
      for (int i = 0; i < s->spatial_size(); ++i)
        if (forms.bcs().is_constrained(i)) CHECK(z1[s->index(n, t, 0, i)] == 0.0);
}

TEST_CASE("damped additive sweep reduces the heat residual") {
  auto mesh = build_hierarchy(10, 10, 1).back();
  auto s = make_scalar_spacetime(mesh, 1, TemporalSpace(TimePartition(0.02, 20), 0));
  SpaceTimeForms forms(s, natural_bcs(*s));
  const auto op = forms.heat_operator();
  PatchSmoother sm(op, build_vertex_star_patches(*s, forms.bcs()));
  const auto params = estimate_lambda_max(op.as_map(), sm.as_map(), op.size(), 0);
  const double omega = 0.5 / params.lambda_max;
  const auto b = random_vector(op.size(), 8);
  std::vector<double> x(op.size(), 0.0), r(op.size()), z(op.size());
  double prev = norm2(b);
  for (int it = 0; it < 10; ++it) {
    op.apply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const double nr = norm2(r);
    CHECK(nr < prev * (it == 0 ? 1.0 + 1e-15 : 1.0));
    prev = nr;
    sm.apply(r, z);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += omega * z[i];
  }
}

TEST_CASE("eigenvalue estimates") {
  SUBCASE("identity preconditioned system") {
    const auto c = estimate_lambda_max(identity_map(), identity_map(), 40, 1);
    CHECK(c.lambda_max == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.upper > c.lower);
  }
  SUBCASE("diagonal system with its Jacobi sweep") {
    std::vector<double> d(60);
    for (int i = 0; i < 60; ++i) d[i] = 1.0 + i;
    LinearMap a = [&](std::span<const double> in, std::span<double> out) {
      for (int i = 0; i < 60; ++i) out[i] = d[i] * in[i];
    };
    LinearMap jac = [&](std::span<const double> in, std::span<double> out) {
      for (int i = 0; i < 60; ++i) out[i] = in[i] / d[i];
    };
    const auto c = estimate_lambda_max(a, jac, 60, 3);
    CHECK(c.lambda_max == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("heat: finite, positive and reproducible") {
    auto mesh = build_hierarchy(10, 10, 1).back();
    auto s = make_scalar_spacetime(mesh, 1, TemporalSpace(TimePartition(0.02, 20), 0));
    SpaceTimeForms forms(s, natural_bcs(*s));
    const auto op = forms.heat_operator();
    PatchSmoother sm(op, build_vertex_star_patches(*s, forms.bcs()));
    const auto a = estimate_lambda_max(op.as_map(), sm.as_map(), op.size(), 42);
    const auto b = estimate_lambda_max(op.as_map(), sm.as_map(), op.size(), 42);
    CHECK(std::isfinite(a.lambda_max));
    CHECK(a.lambda_max > 0.0);
    CHECK(a.lambda_max == b.lambda_max);
    CHECK(a.lower == doctest::Approx(0.25 * a.lambda_max));
    CHECK(a.upper == doctest::Approx(1.05 * a.lambda_max));
    CHECK(a.estimate_steps == 50);
  }
}

TEST_CASE("chebyshev smoothing") {
  SUBCASE("identity system: degree-2 polynomial factor") {
    const auto params = ChebyshevParams::from_interval(0.25, 1.05);
    const std::vector<double> r(7, 1.0);
    std::vector<double> e(7);
    chebyshev_smooth(identity_map(), identity_map(), params, r, e);
    // Error factor T2((theta - 1)/delta) / T2(theta/delta), theta = 0.65, delta = 0.4.
    auto t2 = [](double x) { return 2.0 * x * x - 1.0; };
    const double factor = t2((0.65 - 1.0) / 0.4) / t2(0.65 / 0.4);
    CHECK(factor == doctest::Approx(0.53125 / 4.28125).epsilon(1e-14));
    for (double v : e) CHECK(1.0 - v == doctest::Approx(factor).epsilon(1e-13));
  }
  SUBCASE("degenerate interval is widened") {
    const auto params = ChebyshevParams::from_interval(1.0, 1.0);
    CHECK(params.lower == doctest::Approx(1.0 - ChebyshevParams::kDegenerateWidth));
    CHECK(params.upper == doctest::Approx(1.0 + ChebyshevParams::kDegenerateWidth));
    const std::vector<double> r(3, 2.0);
    std::vector<double> e(3);
    chebyshev_smooth(identity_map(), identity_map(), params, r, e);
    for (double v : e) CHECK(std::isfinite(v));
    for (double v : e) CHECK(std::abs(2.0 - v) < 1e-3);
  }
  SUBCASE("zero residual") {
    const auto params = ChebyshevParams::from_interval(0.25, 1.05);
    const std::vector<double> r(5, 0.0);
    std::vector<double> e(5, 3.0);
    chebyshev_smooth(identity_map(), identity_map(), params, r, e);
    for (double v : e) CHECK(v == 0.0);
  }
}
