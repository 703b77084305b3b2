#include <cmath>
#include <random>

#include "doctest.h"
#include "wrmg/basis.hpp"
#include "wrmg/quadrature.hpp"
#include "wrmg/spaces.hpp"

using namespace wrmg;

TEST_CASE("scalar space DoF counts") {
  auto h = build_hierarchy(10, 10, 3);
  CHECK(build_scalar_space(h[3], 1)->num_dofs() == 6561);
  CHECK(build_scalar_space(h[0], 2)->num_dofs() == 441);
  for (int k = 1; k <= 3; ++k)
    for (const auto& m : h) {
      const int expected = m->num_vertices() + (k - 1) * m->num_edges() + (k - 1) * (k - 2) / 2 * m->num_cells();
      CHECK(build_scalar_space(m, k)->num_dofs() == expected);
    }
  CHECK_THROWS(build_scalar_space(h[0], 4));
}

TEST_CASE("continuity: shared DoFs sit at the same physical point") {
  auto m = build_hierarchy(3, 2, 1).back();
  for (int k = 1; k <= 3; ++k) {
    auto s = build_scalar_space(m, k);
    const LagrangeTriangle& b = s->basis();
    for (int c = 0; c < m->num_cells(); ++c) {
      auto dofs = s->cell_dofs(c);
      const auto& cell = m->cell(c);
      for (int i = 0; i < b.size(); ++i) {
        Point p{0, 0};
        for (int v = 0; v < 3; ++v) {
          p.x += b.node(i)[v] / double(k) * m->vertices()[cell[v]].x;
          p.y += b.node(i)[v] / double(k) * m->vertices()[cell[v]].y;
        }
        CHECK(std::abs(p.x - s->dof_point(dofs[i]).x) < 1e-14);
        CHECK(std::abs(p.y - s->dof_point(dofs[i]).y) < 1e-14);
      }
    }
  }
}

TEST_CASE("nodal property and partition of unity") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 1; k <= 3; ++k) {
    LagrangeTriangle b(k);
    std::vector<double> vals(b.size()), grads(3 * b.size());
    for (int i = 0; i < b.size(); ++i) {
      std::array<double, 3> lam{b.node(i)[0] / double(k), b.node(i)[1] / double(k), b.node(i)[2] / double(k)};
      b.values(lam, vals.data());
      for (int j = 0; j < b.size(); ++j) CHECK(std::abs(vals[j] - (i == j ? 1.0 : 0.0)) < 1e-13);
    }
    for (int r = 0; r < 20; ++r) {
      double x = u(rng), y = u(rng) * (1 - x);
      b.values({1 - x - y, x, y}, vals.data());
      double sum = 0;
      for (double v : vals) sum += v;
      CHECK(std::abs(sum - 1.0) < 1e-13);
    }
  }
  for (int q = 0; q <= 3; ++q) {
    LagrangeInterval b(q);
    for (int i = 0; i < b.size(); ++i)
      for (int j = 0; j < b.size(); ++j) CHECK(std::abs(b.value(j, b.node(i)) - (i == j ? 1.0 : 0.0)) < 1e-13);
    for (int r = 0; r < 10; ++r) {
      const double t = u(rng);
      double sum = 0, dsum = 0;
      for (int i = 0; i < b.size(); ++i) {
        sum += b.value(i, t);
        dsum += b.derivative(i, t);
      }
      CHECK(std::abs(sum - 1.0) < 1e-13);
      CHECK(std::abs(dsum) < 1e-12);
    }
  }
  CHECK(LagrangeInterval(0).node(0) == 0.5);
}

TEST_CASE("space-time DoF counts") {
  auto h = build_hierarchy(10, 10, 3);
  TemporalSpace t0(TimePartition(0.02, 20), 0);
  CHECK(make_scalar_spacetime(h[3], 1, t0)->size() == 131220);
  auto th = make_taylor_hood_spacetime(h[3], 1, t0);
  CHECK(th->size() == 1168060);
  CHECK(th->is_taylor_hood());
  CHECK(th->spatial_size() == 2 * 25921 + 6561);
  TemporalSpace t3(TimePartition(0.02, 20), 3);
  CHECK(make_scalar_spacetime(h[1], 2, t3)->size() == 4 * make_scalar_spacetime(h[1], 2, t0)->size());
  // Lexicographic index (n, a, f, i).
  TemporalSpace t1(TimePartition(1.0, 3), 1);
  auto s = make_taylor_hood_spacetime(h[0], 1, t1);
  CHECK(s->index(2, 1, 2, 5) == 2 * s->block_size() + s->spatial_size() + s->field_offset(2) + 5);
  CHECK(s->field_offset(1) == s->field(0).num_dofs());
  CHECK_THROWS(build_spacetime_space({build_scalar_space(h[0], 1), build_scalar_space(h[1], 1)}, t1));
}

TEST_CASE("quadrature exactness") {
  const IntervalRule mid = interval_rule(1);
  REQUIRE(mid.size() == 1);
  CHECK(mid.points[0] == doctest::Approx(0.5));
  CHECK(mid.weights[0] == doctest::Approx(1.0));
  for (int d = 0; d <= 20; ++d) {
    const IntervalRule r = interval_rule(d);
    double s = 0;
    for (int i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.points[i], d);
    CHECK(s == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
  }
  CHECK_THROWS(interval_rule(21));
  for (int d = 0; d <= 12; ++d) {
    const TriangleRule r = triangle_rule(d);
    double area = 0;
    for (double w : r.weights) area += w;
    CHECK(area == doctest::Approx(0.5).epsilon(1e-14));
    // x^a y^b with a + b = d: exact value a! b! / (a + b + 2)!
    for (int a = 0; a <= d; ++a) {
      const int b = d - a;
      double s = 0;
      for (int i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.points[i].x, a) * std::pow(r.points[i].y, b);
      const double exact = std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
      CHECK(s == doctest::Approx(exact).epsilon(1e-12));
    }
  }
  {
    const TriangleRule r = triangle_rule(4);
    double s = 0;
    for (int i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.points[i].x * r.points[i].y, 2);
    CHECK(s == doctest::Approx(1.0 / 180.0).epsilon(1e-13));
  }
  CHECK_THROWS(triangle_rule(13));
}

TEST_CASE("evaluate_at reproduces polynomials of the space degree") {
  auto m = build_hierarchy(2, 2, 1).back();
  for (int k = 1; k <= 3; ++k) {
    auto s = build_scalar_space(m, k);
    auto f = [k](const Point& p) { return std::pow(p.x, k) + 0.5 * std::pow(p.y, k - 1) * p.x - 0.25; };
    std::vector<double> c(s->num_dofs());
    for (int i = 0; i < s->num_dofs(); ++i) c[i] = f(s->dof_point(i));
    for (const Point p : {Point{0.13, 0.71}, Point{0.5, 0.5}, Point{1.0, 0.0}, Point{0.99, 0.37}})
      CHECK(s->evaluate_at(c, p) == doctest::Approx(f(p)).epsilon(1e-12));
  }
}
