#include <cmath>
#include <random>

#include "doctest.h"
#include "wrmg/krylov.hpp"
#include "wrmg/problems.hpp"
#include "wrmg/transfer.hpp"

using namespace wrmg;

namespace {
std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

struct Pair {
  std::shared_ptr<const SpaceTimeSpace> coarse, fine;
};

Pair spaces(bool taylor_hood, int k, int q = 0, int n = 2) {
  auto meshes = build_hierarchy(3, 3, 1);
  TemporalSpace t(TimePartition(0.1, n), q);
  if (taylor_hood) return {make_taylor_hood_spacetime(meshes[0], k, t), make_taylor_hood_spacetime(meshes[1], k, t)};
  return {make_scalar_spacetime(meshes[0], k, t), make_scalar_spacetime(meshes[1], k, t)};
}

// Degree-k polynomial in x and y.
double poly(int k, const Point& p) {
  double v = 0.3;
  for (int a = 0; a <= k; ++a)
    for (int b = 0; a + b <= k; ++b) v += (0.1 + 0.05 * a - 0.07 * b) * std::pow(p.x, a) * std::pow(p.y, b);
  return v;
}
}  // namespace

TEST_CASE("prolongation rows sum to one per field") {
  for (bool th : {false, true})
    for (int k : {1, 2, 3}) {
      if (th && k == 3) continue;
      auto s = spaces(th, k);
      TransferPair t(s.coarse, s.fine);
      const CsrMatrix& p = t.spatial();
      REQUIRE(p.rows == s.fine->spatial_size());
      REQUIRE(p.cols == s.coarse->spatial_size());
      for (int r = 0; r < p.rows; ++r) {
        double sum = 0.0;
        for (auto e = p.row_ptr[r]; e < p.row_ptr[r + 1]; ++e) sum += p.val[e];
        CHECK(std::abs(sum - 1.0) <= 1e-12);
      }
    }
}

TEST_CASE("prolongation reproduces polynomials of the space degree") {
  for (int k : {1, 2, 3}) {
    auto s = spaces(false, k, 1, 1);
    TransferPair t(s.coarse, s.fine);
    auto f = [k](double, const Point& x, std::span<double> out) { out[0] = poly(k, x); };
    const auto coarse = interpolate_spacetime(*s.coarse, {0}, f);
    const auto fine = interpolate_spacetime(*s.fine, {0}, f);
    std::vector<double> pc(fine.size());
    t.prolong(coarse, pc);
    for (std::size_t i = 0; i < fine.size(); ++i) CHECK(std::abs(pc[i] - fine[i]) <= 1e-12);
  }
}

TEST_CASE("restriction is the transpose of prolongation") {
  for (bool th : {false, true}) {
    auto s = spaces(th, 2, 1, 3);
    TransferPair t(s.coarse, s.fine);
    const auto x = random_vector(s.coarse->size(), 1);
    const auto y = random_vector(s.fine->size(), 2);
    std::vector<double> px(s.fine->size()), rty(s.coarse->size());
    t.prolong(x, px);
    t.restrict_to_coarse(y, rty);
    CHECK(std::abs(dot(px, y) - dot(x, rty)) <= 1e-12 * norm2(px) * norm2(y));
  }
}

TEST_CASE("injection inverts prolongation at coincident nodes") {
  auto s = spaces(true, 2, 1, 2);
  TransferPair t(s.coarse, s.fine);
  const auto x = random_vector(s.coarse->size(), 3);
  std::vector<double> px(s.fine->size()), back(s.coarse->size());
  t.prolong(x, px);
  t.inject(px, back);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-14));
}

TEST_CASE("correction-mode transfers vanish on constrained DoFs") {
  auto s = spaces(true, 1, 0, 2);
  const auto cb = cavity_bcs(*s.coarse);
  const auto fb = cavity_bcs(*s.fine);
  TransferPair t(s.coarse, s.fine, &cb, &fb);
  const CsrMatrix& p = t.spatial();
  for (int r = 0; r < p.rows; ++r)
    for (auto e = p.row_ptr[r]; e < p.row_ptr[r + 1]; ++e) {
      CHECK_FALSE(fb.is_constrained(r));
      CHECK_FALSE(cb.is_constrained(p.col[e]));
    }
  // Unconstrained fine rows away from the boundary still sum to one.
  std::vector<double> ones(s.coarse->size(), 1.0), out(s.fine->size());
  t.prolong(ones, out);
  const int ns = s.fine->spatial_size();
  for (int i = 0; i < ns; ++i) {
    const int f = i < s.fine->field_offset(1) ? 0 : (i < s.fine->field_offset(2) ? 1 : 2);
    const Point& x = s.fine->field(f).dof_point(i - s.fine->field_offset(f));
    if (fb.is_constrained(i)) CHECK(out[i] == 0.0);
    else if (x.x > 0.34 && x.x < 0.66 && x.y > 0.34 && x.y < 0.66) CHECK(out[i] == doctest::Approx(1.0));
  }
}
