#include "wrmg/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wrmg {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Heat: return "heat";
    case ProblemKind::Chorin: return "chorin";
    case ProblemKind::Cavity: return "cavity";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "heat") return ProblemKind::Heat;
  if (name == "chorin") return ProblemKind::Chorin;
  if (name == "cavity") return ProblemKind::Cavity;
  throw std::invalid_argument("unknown problem '" + name + "'");
}

ProblemConfig ProblemConfig::defaults(ProblemKind kind) {
  ProblemConfig c;
  c.kind = kind;
  switch (kind) {
    case ProblemKind::Heat:
      c.t_final = 0.02;
      c.num_elements = 20;
      break;
    case ProblemKind::Chorin:
      c.t_final = 0.1;
      c.num_elements = 20;
      c.reynolds = 10.0;
      break;
    case ProblemKind::Cavity:
      c.t_final = 0.02;
      c.num_elements = 20;
      c.reynolds = 100.0;
      break;
  }
  return c;
}

void ProblemConfig::validate() const {
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
  if (num_elements < 1) throw std::invalid_argument("N must be at least 1");
  if (temporal_degree < 0 || temporal_degree > 3) throw std::invalid_argument("temporal degree must be in 0..3");
  if (mref < 0) throw std::invalid_argument("Mref must be non-negative");
  if (base_cells < 1) throw std::invalid_argument("base mesh needs at least one cell per direction");
  if (is_navier_stokes()) {
    if (!(reynolds > 0.0)) throw std::invalid_argument("Reynolds number must be positive");
    if (spatial_degree < 1 || spatial_degree > 2)
      throw std::invalid_argument("pressure degree must be 1 or 2");
  } else if (spatial_degree < 1 || spatial_degree > 3) {
    throw std::invalid_argument("spatial degree must be in 1..3");
  }
}

ChorinValue chorin_exact(double t, const Point& x, double reynolds, ChorinVariant variant) {
  if (variant == ChorinVariant::BoundaryAligned) {
    ChorinValue v = chorin_exact(t, {x.x + 0.5, x.y + 0.5}, reynolds, ChorinVariant::Literal);
    v.velocity = {-v.velocity[0], -v.velocity[1]};
    return v;
  }
  const double decay = std::exp(-2.0 * kPi * kPi * t);
  const double sx = std::sin(kPi * x.x), cx = std::cos(kPi * x.x);
  const double sy = std::sin(kPi * x.y), cy = std::cos(kPi * x.y);
  ChorinValue v;
  v.velocity = {-cx * sy * decay, sx * cy * decay};
  v.pressure = reynolds * kPi / 4.0 * (std::cos(2.0 * kPi * x.x) + std::cos(2.0 * kPi * x.y)) * decay * decay;
  return v;
}

double heat_initial(const Point& x) { return std::sin(kPi * x.x) + std::cos(2.0 * kPi * x.y); }

BoundaryConditions cavity_bcs(const SpaceTimeSpace& space) {
  if (space.num_fields() != 3) throw std::invalid_argument("cavity_bcs: needs a Taylor-Hood space");
  BoundaryConditions bc = natural_bcs(space);
  bc.pressure_nullspace = true;
  for (int f = 0; f < 2; ++f) {
    const ScalarSpatialSpace& vs = space.field(f);
    for (int i = 0; i < vs.num_dofs(); ++i) {
      const std::uint8_t sides = vs.dof_sides(i);
      if (!sides) continue;
      const int g = space.field_offset(f) + i;
      bc.constrained[g] = 1;
      const bool lid = (sides & kTop) && !(sides & (kLeft | kRight));
      bc.value[g] = (f == 0 && lid) ? 1.0 : 0.0;
    }
  }
  return bc;
}

BoundaryConditions chorin_bcs(const SpaceTimeSpace& space) {
  if (space.num_fields() != 3) throw std::invalid_argument("chorin_bcs: needs a Taylor-Hood space");
  BoundaryConditions bc = natural_bcs(space);
  bc.pressure_nullspace = true;
  const std::uint8_t normal[2] = {kLeft | kRight, kBottom | kTop};
  for (int f = 0; f < 2; ++f) {
    const ScalarSpatialSpace& vs = space.field(f);
    for (int i = 0; i < vs.num_dofs(); ++i)
      if (vs.dof_sides(i) & normal[f]) bc.constrained[space.field_offset(f) + i] = 1;
  }
  return bc;
}

BoundaryConditions problem_bcs(ProblemKind kind, const SpaceTimeSpace& space) {
  switch (kind) {
    case ProblemKind::Heat: return natural_bcs(space);
    case ProblemKind::Chorin: return chorin_bcs(space);
    case ProblemKind::Cavity: return cavity_bcs(space);
  }
  throw std::invalid_argument("problem_bcs: unknown problem");
}

}  // namespace wrmg
