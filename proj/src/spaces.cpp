#include "wrmg/spaces.hpp"

#include <algorithm>
#include <stdexcept>

namespace wrmg {

ScalarSpatialSpace::ScalarSpatialSpace(std::shared_ptr<const MeshLevel> mesh, int degree)
    : mesh_(std::move(mesh)), basis_(degree) {
  if (degree < 1 || degree > 3) throw std::invalid_argument("ScalarSpatialSpace: degree must be 1, 2 or 3");
  const MeshLevel& m = *mesh_;
  const int k = degree;
  const int nv = m.num_vertices(), ne = m.num_edges(), nc = m.num_cells();
  const int per_edge = k - 1;
  const int per_cell = (k - 1) * (k - 2) / 2;
  num_dofs_ = nv + per_edge * ne + per_cell * nc;

  dof_points_.resize(num_dofs_);
  dof_sides_.assign(num_dofs_, kInterior);
  cell_dofs_.resize(static_cast<std::size_t>(nc) * basis_.size());

  for (int c = 0; c < nc; ++c) {
    const auto& verts = m.cell(c);
    const auto& edges = m.cell_edges(c);
    int interior = 0;
    for (int i = 0; i < basis_.size(); ++i) {
      const auto& a = basis_.node(i);
      const int nonzero = (a[0] > 0) + (a[1] > 0) + (a[2] > 0);
      int dof = -1;
      if (nonzero == 1) {
        const int lv = a[0] > 0 ? 0 : (a[1] > 0 ? 1 : 2);
        dof = verts[lv];
        dof_sides_[dof] = m.vertex_sides(verts[lv]);
      } else if (nonzero == 2) {
        const int opposite = a[0] == 0 ? 0 : (a[1] == 0 ? 1 : 2);
        const int e = edges[opposite];
        const int hi = m.edge(e)[1];
        int m_hi = 0;
        for (int j = 0; j < 3; ++j)
          if (verts[j] == hi) m_hi = a[j];
        dof = nv + per_edge * e + (m_hi - 1);
        dof_sides_[dof] = m.edge_sides(e);
      } else {
        dof = nv + per_edge * ne + per_cell * c + interior++;
      }
      cell_dofs_[static_cast<std::size_t>(c) * basis_.size() + i] = dof;
      Point p;
      for (int j = 0; j < 3; ++j) {
        const Point& v = m.vertices()[verts[j]];
        p.x += a[j] * v.x / k;
        p.y += a[j] * v.y / k;
      }
      dof_points_[dof] = p;
    }
  }
}

std::vector<int> ScalarSpatialSpace::edge_interior_dofs(int e) const {
  const int per_edge = degree() - 1;
  std::vector<int> out(per_edge);
  for (int t = 0; t < per_edge; ++t) out[t] = mesh_->num_vertices() + per_edge * e + t;
  return out;
}

std::vector<int> ScalarSpatialSpace::cell_interior_dofs(int c) const {
  const int k = degree();
  const int per_cell = (k - 1) * (k - 2) / 2;
  const int base = mesh_->num_vertices() + (k - 1) * mesh_->num_edges() + per_cell * c;
  std::vector<int> out(per_cell);
  for (int t = 0; t < per_cell; ++t) out[t] = base + t;
  return out;
}

std::vector<int> ScalarSpatialSpace::boundary_dofs(std::uint8_t sides) const {
  std::vector<int> out;
  for (int i = 0; i < num_dofs_; ++i)
    if (dof_sides_[i] & sides) out.push_back(i);
  return out;
}

double ScalarSpatialSpace::evaluate(std::span<const double> coeffs, int c,
                                    const std::array<double, 3>& lambda) const {
  std::vector<double> phi(dofs_per_cell());
  basis_.values(lambda, phi.data());
  const auto dofs = cell_dofs(c);
  double v = 0.0;
  for (int i = 0; i < dofs_per_cell(); ++i) v += coeffs[dofs[i]] * phi[i];
  return v;
}

int ScalarSpatialSpace::locate(const Point& p) const {
  int best = -1;
  double best_min = -1e300;
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto l = mesh_->barycentric(c, p);
    const double lmin = std::min({l[0], l[1], l[2]});
    if (lmin > best_min) {
      best_min = lmin;
      best = c;
      if (lmin >= 0.0) break;
    }
  }
  return best;
}

double ScalarSpatialSpace::evaluate_at(std::span<const double> coeffs, const Point& p) const {
  const int c = locate(p);
  return evaluate(coeffs, c, mesh_->barycentric(c, p));
}

std::shared_ptr<const ScalarSpatialSpace> build_scalar_space(std::shared_ptr<const MeshLevel> mesh,
                                                             int degree) {
  return std::make_shared<const ScalarSpatialSpace>(std::move(mesh), degree);
}

TemporalSpace::TemporalSpace(TimePartition partition, int degree)
    : partition_(partition), basis_(degree) {
  if (degree < 0 || degree > 3) throw std::invalid_argument("TemporalSpace: degree must be in 0..3");
  for (int a = 0; a <= degree; ++a) {
    start_trace_.push_back(basis_.value(a, 0.0));
    end_trace_.push_back(basis_.value(a, 1.0));
  }
}

SpaceTimeSpace::SpaceTimeSpace(std::vector<std::shared_ptr<const ScalarSpatialSpace>> fields,
                               TemporalSpace temporal)
    : fields_(std::move(fields)), temporal_(std::move(temporal)) {
  if (fields_.empty()) throw std::invalid_argument("SpaceTimeSpace: no fields");
  offsets_.push_back(0);
  for (const auto& f : fields_) {
    if (&f->mesh() != &fields_.front()->mesh())
      throw std::invalid_argument("SpaceTimeSpace: fields live on different mesh levels");
    offsets_.push_back(offsets_.back() + f->num_dofs());
  }
}

bool SpaceTimeSpace::is_taylor_hood() const {
  return num_fields() == 3 && fields_[0] == fields_[1] && fields_[2]->degree() + 1 == fields_[0]->degree();
}

std::shared_ptr<const SpaceTimeSpace> build_spacetime_space(
    std::vector<std::shared_ptr<const ScalarSpatialSpace>> fields, TemporalSpace temporal) {
  return std::make_shared<const SpaceTimeSpace>(std::move(fields), std::move(temporal));
}

std::shared_ptr<const SpaceTimeSpace> make_scalar_spacetime(std::shared_ptr<const MeshLevel> mesh, int k,
                                                            const TemporalSpace& temporal) {
  return build_spacetime_space({build_scalar_space(std::move(mesh), k)}, temporal);
}

std::shared_ptr<const SpaceTimeSpace> make_taylor_hood_spacetime(std::shared_ptr<const MeshLevel> mesh,
                                                                 int pressure_degree,
                                                                 const TemporalSpace& temporal) {
  if (pressure_degree < 1 || pressure_degree > 2)
    throw std::invalid_argument("make_taylor_hood_spacetime: pressure degree must be 1 or 2");
  auto velocity = build_scalar_space(mesh, pressure_degree + 1);
  auto pressure = build_scalar_space(std::move(mesh), pressure_degree);
  return build_spacetime_space({velocity, velocity, pressure}, temporal);
}

}  // namespace wrmg
