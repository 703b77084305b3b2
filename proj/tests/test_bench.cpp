#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "wrmg/bench.hpp"

using namespace wrmg;
namespace fs = std::filesystem;

namespace {
RunConfig small(ProblemKind kind, int mref, int q, int k, int nt) {
  RunConfig c;
  c.problem = ProblemConfig::defaults(kind);
  c.problem.mref = mref;
  c.problem.temporal_degree = q;
  c.problem.spatial_degree = k;
  c.problem.num_elements = nt;
  return c;
}

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("wrmg_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}
}  // namespace

TEST_CASE("solver mode names") {
  CHECK(parse_solver_mode("wrmg") == SolverMode::wrmg);
  CHECK(parse_solver_mode("direct") == SolverMode::direct);
  CHECK(parse_solver_mode("timestep") == SolverMode::timestep);
  CHECK(to_string(SolverMode::timestep) == "timestep");
  CHECK_THROWS_AS(parse_solver_mode("gmres"), std::invalid_argument);
}

TEST_CASE("run config validation") {
  auto c = small(ProblemKind::Heat, 0, 0, 1, 2);
  CHECK_NOTHROW(c.validate());
  c.rtol = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small(ProblemKind::Heat, 0, 0, 1, 2);
  c.threads = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("report json round trip and version check") {
  SolveReport r;
  r.problem = "chorin";
  r.q = 1;
  r.k = 2;
  r.mref = 2;
  r.nt = 10;
  r.t_final = 0.1;
  r.reynolds = 10.0;
  r.solver = "wrmg";
  r.rtol = 1e-6;
  r.atol = 1e-6;
  r.newton_rtol = 1e-8;
  r.max_it = 200;
  r.seed = 42;
  r.threads = 2;
  r.dofs = 123456;
  r.nnz = 9876543210LL;
  r.nnz_stored = 1234;
  r.newton_iterations = 2;
  r.linear_iterations = 5;
  r.newton_per_step = {2};
  r.linear_per_step = {2, 3};
  r.nonlinear_histories = {{1.0, 1e-3, 1e-9}};
  r.linear_histories = {{1.0, 0.1, 0.01}, {1.0, 0.5, 0.1, 1e-7}};
  r.error_l2 = 3.5e-4;
  r.lambdas = {{7.5, 8.25}};
  r.wall_seconds = 1.25;
  r.status = "converged";
  const auto j = to_json(r);
  CHECK(j.at("version") == SolveReport::kVersion);
  CHECK(j.at("config").at("problem") == "chorin");
  CHECK(report_from_json(j) == r);
  CHECK(report_from_json(nlohmann::json::parse(j.dump())) == r);

  r.error_l2.reset();
  auto j2 = to_json(r);
  CHECK(j2.at("error_l2").is_null());
  CHECK(report_from_json(j2) == r);

  j2["version"] = SolveReport::kVersion + 1;
  CHECK_THROWS(report_from_json(j2));
}

TEST_CASE("heat run: sizes and history lengths") {
  for (SolverMode mode : {SolverMode::wrmg, SolverMode::direct, SolverMode::timestep}) {
    auto c = small(ProblemKind::Heat, 1, 1, 1, 4);
    c.solver = mode;
    const auto out = run(c);
    const auto& r = out.report;
    REQUIRE(r.converged());
    // P1 on a 20x20 lattice has 441 vertices; two temporal DoFs per element.
    CHECK(r.dofs == 441 * 2 * 4);
    CHECK(out.state.size() == static_cast<std::size_t>(r.dofs));
    CHECK(r.nnz >= r.nnz_stored);
    CHECK(r.linear_histories.size() == r.linear_per_step.size());
    int total = 0;
    for (std::size_t i = 0; i < r.linear_histories.size(); ++i) {
      CHECK(r.linear_histories[i].size() == static_cast<std::size_t>(r.linear_per_step[i] + 1));
      total += r.linear_per_step[i];
    }
    CHECK(total == r.linear_iterations);
    CHECK(r.newton_iterations == 0);
    CHECK(!r.error_l2.has_value());
    CHECK(r.version == SolveReport::kVersion);
    if (mode == SolverMode::timestep) CHECK(r.linear_per_step.size() == 4u);
    if (mode == SolverMode::wrmg) CHECK(r.lambdas.size() == 1u);
  }
}

TEST_CASE("chorin run reports an error and matching direct solution") {
  auto c = small(ProblemKind::Chorin, 0, 0, 1, 2);
  const auto w = run(c);
  REQUIRE(w.report.converged());
  REQUIRE(w.report.error_l2.has_value());
  CHECK(*w.report.error_l2 > 0.0);
  CHECK(w.report.newton_per_step.size() == 1u);
  CHECK(w.report.newton_iterations == w.report.newton_per_step[0]);
  CHECK(w.report.nonlinear_histories.size() == 1u);
  CHECK(w.report.nonlinear_histories[0].size() == static_cast<std::size_t>(w.report.newton_iterations + 1));
  c.solver = SolverMode::direct;
  const auto d = run(c);
  REQUIRE(d.report.converged());
  CHECK(*d.report.error_l2 == doctest::Approx(*w.report.error_l2).epsilon(1e-4));
}

TEST_CASE("memory guard turns into a failed status") {
  auto c = small(ProblemKind::Cavity, 1, 0, 1, 2);
  c.memory_limit_bytes = 4096;
  const auto out = run(c);
  CHECK(!out.report.converged());
  CHECK(out.report.status.rfind("failed: out of memory", 0) == 0);
}

TEST_CASE("sweeps: grids and reference values") {
  RunConfig base;
  CHECK(sweep_names().size() == 4u);
  CHECK_THROWS_AS(sweep_cells("nope", base, {}), std::invalid_argument);
  CHECK(sweep_cells("heat-mref3", base, {}).size() == 12u);
  CHECK(sweep_cells("cavity", base, {}).size() == 24u);

  SweepOverrides o;
  o.q = std::vector<int>{0};
  const auto chorin = sweep_cells("chorin", base, o);
  REQUIRE(chorin.size() == 6u);
  for (const auto& cell : chorin) {
    CHECK(cell.config.problem.kind == ProblemKind::Chorin);
    CHECK(cell.config.problem.reynolds == 10.0);
    CHECK(cell.reference.error_l2.has_value());
  }
  CHECK(*chorin[0].reference.error_l2 == 6.51e-3);

  SweepOverrides c;
  c.q = std::vector<int>{0};
  c.k = std::vector<int>{1};
  c.mref = std::vector<int>{2};
  c.reynolds = std::vector<double>{1.0};
  const auto cav = sweep_cells("cavity", base, c);
  REQUIRE(cav.size() == 1u);
  CHECK(cav[0].reference.newton == 4);
  CHECK(cav[0].reference.linear == 6);

  SweepOverrides none;
  none.nt = std::vector<int>{};
  const auto empty = run_sweep(sweep_cells("chorin", base, none), {});
  CHECK(empty.cells.empty());
  CHECK(empty.reports.empty());
  std::istringstream csv(sweep_csv(empty));
  std::string header, row;
  std::getline(csv, header);
  CHECK(!header.empty());
  CHECK(!std::getline(csv, row));
}

TEST_CASE("sweep writes one report per cell and a summary") {
  RunConfig base;
  SweepOverrides o;
  o.q = std::vector<int>{0};
  o.k = std::vector<int>{1};
  o.mref = std::vector<int>{0};
  o.nt = std::vector<int>{2, 3};
  const auto dir = scratch_dir("sweep");
  const auto res = run_sweep(sweep_cells("heat-mref3", base, o), dir);
  REQUIRE(res.reports.size() == 2u);
  int json_files = 0;
  for (const auto& e : fs::directory_iterator(dir)) json_files += e.path().extension() == ".json";
  CHECK(json_files == 2);
  CHECK(read_lines(dir / "summary.csv").size() == 3u);
  CHECK(sweep_table(res).find("heat") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("snapshots") {
  const auto dir = scratch_dir("snap");

  SUBCASE("constant heat state") {
    auto c = small(ProblemKind::Heat, 0, 0, 1, 2);
    auto out = run(c);
    std::fill(out.state.begin(), out.state.end(), 2.5);
    const auto files = export_snapshots(out.state, *out.space, {0.01}, dir / "heat", 5);
    REQUIRE(files.size() == 1u);
    const auto lines = read_lines(files[0]);
    REQUIRE(lines.size() == 26u);
    CHECK(lines[0] == "x,y,u");
    for (std::size_t i = 1; i < lines.size(); ++i) CHECK(lines[i].substr(lines[i].rfind(',') + 1) == "2.5");
  }

  SUBCASE("chorin lattice at t = 0") {
    auto c = small(ProblemKind::Chorin, 1, 1, 1, 2);
    c.solver = SolverMode::direct;
    const auto out = run(c);
    REQUIRE(out.report.converged());
    const auto rows = sample_lattice(*out.space, out.state, 0.0, 3);
    REQUIRE(rows.size() == 9u);
    for (const auto& r : rows) {
      REQUIRE(r.size() == 5u);
      const auto e = chorin_exact(0.0, {r[0], r[1]}, 10.0, ChorinVariant::BoundaryAligned);
      CHECK(r[2] == doctest::Approx(e.velocity[0]).epsilon(0.05).scale(1.0));
      CHECK(r[3] == doctest::Approx(e.velocity[1]).epsilon(0.05).scale(1.0));
    }
    const auto files = export_snapshots(out.state, *out.space, {0.0, 0.05}, dir / "ch", 3);
    CHECK(files.size() == 2u);
    CHECK(read_lines(files[1])[0] == "x,y,vx,vy,p");
  }

  SUBCASE("no times, no files") {
    auto out = run(small(ProblemKind::Heat, 0, 0, 1, 1));
    CHECK(export_snapshots(out.state, *out.space, {}, dir / "none").empty());
  }

  SUBCASE("unwritable path") {
    auto out = run(small(ProblemKind::Heat, 0, 0, 1, 1));
    CHECK_THROWS_AS(export_snapshots(out.state, *out.space, {0.0}, "/nonexistent/dir/x"), std::runtime_error);
  }
  fs::remove_all(dir);
}
