#include "wrmg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace wrmg {

namespace {
constexpr double kSideTolerance = 1e-12;

// Compressed adjacency list from (key, value) pairs.
void build_adjacency(int num_keys, const std::vector<std::pair<int, int>>& pairs,
                     std::vector<int>& offsets, std::vector<int>& list) {
  offsets.assign(num_keys + 1, 0);
  for (const auto& [key, value] : pairs) ++offsets[key + 1];
  for (int k = 0; k < num_keys; ++k) offsets[k + 1] += offsets[k];
  list.resize(pairs.size());
  std::vector<int> fill(offsets.begin(), offsets.end() - 1);
  for (const auto& [key, value] : pairs) list[fill[key]++] = value;
  for (int k = 0; k < num_keys; ++k)
    std::sort(list.begin() + offsets[k], list.begin() + offsets[k + 1]);
}
}  // namespace

std::uint8_t side_flags_at(const Point& p) {
  std::uint8_t flags = kInterior;
  if (std::abs(p.x) < kSideTolerance) flags |= kLeft;
  if (std::abs(p.x - 1.0) < kSideTolerance) flags |= kRight;
  if (std::abs(p.y) < kSideTolerance) flags |= kBottom;
  if (std::abs(p.y - 1.0) < kSideTolerance) flags |= kTop;
  return flags;
}

MeshLevel::MeshLevel(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
                     std::vector<int> parent)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), parent_(std::move(parent)) {
  if (!parent_.empty() && parent_.size() != cells_.size())
    throw std::invalid_argument("MeshLevel: parent map size does not match cell count");
  build_topology();
}

void MeshLevel::build_topology() {
  const int nv = num_vertices();
  const int nc = num_cells();

  for (int c = 0; c < nc; ++c) {
    if (signed_area(c) <= 0.0)
      throw std::invalid_argument("MeshLevel: cell with non-positive signed area");
  }

  std::map<std::pair<int, int>, int> edge_index;
  cell_edges_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto& t = cells_[c];
    for (int i = 0; i < 3; ++i) {
      int a = t[(i + 1) % 3];
      int b = t[(i + 2) % 3];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_index.try_emplace({a, b}, static_cast<int>(edges_.size()));
      if (inserted) {
        edges_.push_back({a, b});
        edge_cells_.push_back({c, -1});
      } else {
        auto& owners = edge_cells_[it->second];
        if (owners[1] != -1) throw std::invalid_argument("MeshLevel: edge shared by more than two cells");
        owners[1] = c;
      }
      cell_edges_[c][i] = it->second;
    }
  }

  vertex_sides_.resize(nv);
  for (int v = 0; v < nv; ++v) vertex_sides_[v] = side_flags_at(vertices_[v]);

  edge_sides_.assign(edges_.size(), kInterior);
  num_boundary_edges_ = 0;
  for (int e = 0; e < num_edges(); ++e) {
    if (edge_cells_[e][1] != -1) continue;
    ++num_boundary_edges_;
    edge_sides_[e] = vertex_sides_[edges_[e][0]] & vertex_sides_[edges_[e][1]];
    if (edge_sides_[e] == kInterior)
      throw std::invalid_argument("MeshLevel: boundary edge not on the unit square boundary");
  }

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(3 * nc);
  for (int c = 0; c < nc; ++c)
    for (int v : cells_[c]) pairs.emplace_back(v, c);
  build_adjacency(nv, pairs, vertex_cell_offsets_, vertex_cell_list_);

  pairs.clear();
  for (int e = 0; e < num_edges(); ++e) {
    pairs.emplace_back(edges_[e][0], e);
    pairs.emplace_back(edges_[e][1], e);
  }
  build_adjacency(nv, pairs, vertex_edge_offsets_, vertex_edge_list_);
}

std::span<const int> MeshLevel::vertex_cells(int v) const {
  return {vertex_cell_list_.data() + vertex_cell_offsets_[v],
          static_cast<std::size_t>(vertex_cell_offsets_[v + 1] - vertex_cell_offsets_[v])};
}

std::span<const int> MeshLevel::vertex_edges(int v) const {
  return {vertex_edge_list_.data() + vertex_edge_offsets_[v],
          static_cast<std::size_t>(vertex_edge_offsets_[v + 1] - vertex_edge_offsets_[v])};
}

double MeshLevel::signed_area(int c) const {
  const auto& a = vertices_[cells_[c][0]];
  const auto& b = vertices_[cells_[c][1]];
  const auto& d = vertices_[cells_[c][2]];
  return 0.5 * ((b.x - a.x) * (d.y - a.y) - (d.x - a.x) * (b.y - a.y));
}

Point MeshLevel::centroid(int c) const {
  Point p;
  for (int v : cells_[c]) {
    p.x += vertices_[v].x / 3.0;
    p.y += vertices_[v].y / 3.0;
  }
  return p;
}

std::array<double, 3> MeshLevel::barycentric(int c, const Point& p) const {
  const auto& a = vertices_[cells_[c][0]];
  const auto& b = vertices_[cells_[c][1]];
  const auto& d = vertices_[cells_[c][2]];
  const double det = (b.x - a.x) * (d.y - a.y) - (d.x - a.x) * (b.y - a.y);
  const double l1 = ((p.x - a.x) * (d.y - a.y) - (d.x - a.x) * (p.y - a.y)) / det;
  const double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
  return {1.0 - l1 - l2, l1, l2};
}

void MeshLevel::write_text(std::ostream& out) const {
  out << num_vertices() << '\n';
  for (const auto& p : vertices_) out << p.x << ' ' << p.y << '\n';
  out << num_cells() << '\n';
  for (const auto& t : cells_) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

MeshLevel build_base_mesh(int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_base_mesh: nx and ny must be positive");
  std::vector<Point> vertices;
  vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      vertices.push_back({static_cast<double>(i) / nx, static_cast<double>(j) / ny});

  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> cells;
  cells.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      // diagonal v10 -> v01
      cells.push_back({v00, v10, v01});
      cells.push_back({v10, v11, v01});
    }
  }
  return MeshLevel(std::move(vertices), std::move(cells));
}

MeshLevel refine(const MeshLevel& coarse) {
  const int nv = coarse.num_vertices();
  std::vector<Point> vertices = coarse.vertices();
  vertices.reserve(nv + coarse.num_edges());
  for (int e = 0; e < coarse.num_edges(); ++e) {
    const auto& a = coarse.vertices()[coarse.edge(e)[0]];
    const auto& b = coarse.vertices()[coarse.edge(e)[1]];
    vertices.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
  }

  std::vector<std::array<int, 3>> cells;
  std::vector<int> parent;
  cells.reserve(4 * coarse.num_cells());
  parent.reserve(4 * coarse.num_cells());
  for (int c = 0; c < coarse.num_cells(); ++c) {
    const auto& t = coarse.cell(c);
    const auto& ce = coarse.cell_edges(c);
    // midpoint opposite local vertex i
    const int m0 = nv + ce[0], m1 = nv + ce[1], m2 = nv + ce[2];
    cells.push_back({t[0], m2, m1});
    cells.push_back({m2, t[1], m0});
    cells.push_back({m1, m0, t[2]});
    cells.push_back({m0, m1, m2});
    parent.insert(parent.end(), 4, c);
  }
  return MeshLevel(std::move(vertices), std::move(cells), std::move(parent));
}

std::vector<std::shared_ptr<const MeshLevel>> build_hierarchy(int nx, int ny, int mref) {
  if (mref < 0) throw std::invalid_argument("build_hierarchy: mref must be non-negative");
  std::vector<std::shared_ptr<const MeshLevel>> levels;
  levels.push_back(std::make_shared<const MeshLevel>(build_base_mesh(nx, ny)));
  for (int j = 0; j < mref; ++j) levels.push_back(std::make_shared<const MeshLevel>(refine(*levels.back())));
  return levels;
}

TimePartition::TimePartition(double t_final, int num_elements)
    : t_final_(t_final), num_elements_(num_elements) {
  if (!(t_final > 0.0)) throw std::invalid_argument("TimePartition: t_final must be positive");
  if (num_elements < 1) throw std::invalid_argument("TimePartition: need at least one element");
}

double TimePartition::node(int n) const {
  if (n == num_elements_) return t_final_;
  return t_final_ * static_cast<double>(n) / num_elements_;
}

}  // namespace wrmg
