#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace wrmg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Side tags are bit flags so that corner vertices can carry two of them.
enum SideFlag : std::uint8_t {
  kInterior = 0,
  kLeft = 1,
  kRight = 2,
  kBottom = 4,
  kTop = 8,
};

std::uint8_t side_flags_at(const Point& p);

/// One level of a conforming triangulation of the unit square.
///
/// Cells are counterclockwise vertex triples. Edges are stored with
/// `edges[e][0] < edges[e][1]`; `cell_edges[c][i]` is the edge opposite
/// local vertex `i`. Boundary edges have `edge_cells[e][1] == -1`.
class MeshLevel {
 public:
  MeshLevel(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
            std::vector<int> parent = {});

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_boundary_edges() const { return num_boundary_edges_; }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::array<int, 3>& cell(int c) const { return cells_[c]; }
  const std::vector<std::array<int, 3>>& cells() const { return cells_; }
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  const std::array<int, 3>& cell_edges(int c) const { return cell_edges_[c]; }
  const std::array<int, 2>& edge_cells(int e) const { return edge_cells_[e]; }

  std::uint8_t edge_sides(int e) const { return edge_sides_[e]; }
  std::uint8_t vertex_sides(int v) const { return vertex_sides_[v]; }

  std::span<const int> vertex_cells(int v) const;
  std::span<const int> vertex_edges(int v) const;

  /// Parent cell on the next coarser level; empty on the coarsest level.
  const std::vector<int>& parent() const { return parent_; }
  bool has_parent() const { return !parent_.empty(); }

  double signed_area(int c) const;
  Point centroid(int c) const;

  /// Barycentric coordinates of `p` with respect to cell `c`.
  std::array<double, 3> barycentric(int c, const Point& p) const;

  void write_text(std::ostream& out) const;

 private:
  void build_topology();

  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<int> parent_;

  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> cell_edges_;
  std::vector<std::array<int, 2>> edge_cells_;
  std::vector<std::uint8_t> edge_sides_;
  std::vector<std::uint8_t> vertex_sides_;
  std::vector<int> vertex_cell_offsets_, vertex_cell_list_;
  std::vector<int> vertex_edge_offsets_, vertex_edge_list_;
  int num_boundary_edges_ = 0;
};

/// Uniform nx-by-ny lattice of [0,1]^2 with every quadrilateral cut along
/// its bottom-right to top-left diagonal.
MeshLevel build_base_mesh(int nx, int ny);

/// Red refinement: each triangle is split into four by its edge midpoints.
/// Coarse vertices keep their indices; the midpoint of coarse edge e gets
/// index `coarse.num_vertices() + e`.
MeshLevel refine(const MeshLevel& coarse);

/// Levels ordered coarse to fine; `mref` refinements of the base mesh.
std::vector<std::shared_ptr<const MeshLevel>> build_hierarchy(int nx, int ny, int mref);

/// Uniform partition of [0, t_final] into `num_elements` intervals.
class TimePartition {
 public:
  TimePartition(double t_final, int num_elements);

  double t_final() const { return t_final_; }
  int num_elements() const { return num_elements_; }
  double step() const { return t_final_ / num_elements_; }
  double node(int n) const;

 private:
  double t_final_;
  int num_elements_;
};

}  // namespace wrmg
