#ifndef MSGFEM_MESH_HPP
#define MSGFEM_MESH_HPP

#include <algorithm>
#include <array>
#include <vector>

#include "msgfem/core.hpp"

namespace msgfem {

/// Uniform rectangular grid on the unit square.
///
/// Numbering conventions (fixed, relied on by every other module):
///  - cells: row-major, cell (i, j) -> j*nx + i, i along x, j along y.
///  - nodes: row-major on the (nx+1) x (ny+1) vertex grid.
///  - edges: vertical edges first (normal +x), row-major over (i, j) with
///    i in [0, nx], j in [0, ny-1]; then horizontal edges (normal +y),
///    row-major over i in [0, nx-1], j in [0, ny].
/// Velocity DOFs are mean normal flux densities with respect to the fixed
/// global normal (+x for vertical edges, +y for horizontal edges); outward
/// orientation per cell is recovered through cell_edge_signs.
class Mesh {
 public:
  Mesh(int nx, int ny) : nx_(nx), ny_(ny) {
    require(nx >= 1 && ny >= 1, "mesh: cell counts must be positive");
    hx_ = 1.0 / nx;
    hy_ = 1.0 / ny;
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }

  int n_cells() const { return nx_ * ny_; }
  int n_nodes() const { return (nx_ + 1) * (ny_ + 1); }
  int n_vertical_edges() const { return (nx_ + 1) * ny_; }
  int n_horizontal_edges() const { return nx_ * (ny_ + 1); }
  int n_edges() const { return n_vertical_edges() + n_horizontal_edges(); }

  int cell_id(int i, int j) const { return j * nx_ + i; }
  int cell_i(int c) const { return c % nx_; }
  int cell_j(int c) const { return c / nx_; }

  int node_id(int i, int j) const { return j * (nx_ + 1) + i; }
  int node_i(int v) const { return v % (nx_ + 1); }
  int node_j(int v) const { return v / (nx_ + 1); }
  double node_x(int v) const { return node_i(v) * hx_; }
  double node_y(int v) const { return node_j(v) * hy_; }

  /// Vertical edge at x = i*hx spanning y in [j*hy, (j+1)*hy].
  int vertical_edge_id(int i, int j) const { return j * (nx_ + 1) + i; }
  /// Horizontal edge at y = j*hy spanning x in [i*hx, (i+1)*hx].
  int horizontal_edge_id(int i, int j) const {
    return n_vertical_edges() + j * nx_ + i;
  }

  bool edge_is_vertical(int e) const { return e < n_vertical_edges(); }
  double edge_length(int e) const { return edge_is_vertical(e) ? hy_ : hx_; }

  /// Edge endpoints ordered along the tangent: vertical edges run +y,
  /// horizontal edges run +x.
  std::array<int, 2> edge_nodes(int e) const {
    if (edge_is_vertical(e)) {
      int i = e % (nx_ + 1), j = e / (nx_ + 1);
      return {node_id(i, j), node_id(i, j + 1)};
    }
    int k = e - n_vertical_edges();
    int i = k % nx_, j = k / nx_;
    return {node_id(i, j), node_id(i + 1, j)};
  }

  /// Adjacent cells ordered as {behind, ahead} of the global normal
  /// (left/right for vertical edges, below/above for horizontal ones);
  /// -1 where the domain ends.
  std::array<int, 2> edge_cells(int e) const {
    if (edge_is_vertical(e)) {
      int i = e % (nx_ + 1), j = e / (nx_ + 1);
      return {i > 0 ? cell_id(i - 1, j) : -1, i < nx_ ? cell_id(i, j) : -1};
    }
    int k = e - n_vertical_edges();
    int i = k % nx_, j = k / nx_;
    return {j > 0 ? cell_id(i, j - 1) : -1, j < ny_ ? cell_id(i, j) : -1};
  }

  bool edge_on_domain_boundary(int e) const {
    auto cells = edge_cells(e);
    return cells[0] < 0 || cells[1] < 0;
  }

  /// Edges of a cell in the fixed order {left, right, bottom, top}.
  std::array<int, 4> cell_edges(int c) const {
    int i = cell_i(c), j = cell_j(c);
    return {vertical_edge_id(i, j), vertical_edge_id(i + 1, j),
            horizontal_edge_id(i, j), horizontal_edge_id(i, j + 1)};
  }

  /// Sign of the global edge normal relative to the cell's outward normal,
  /// matching the cell_edges order {left, right, bottom, top}.
  static constexpr std::array<double, 4> cell_edge_signs() {
    return {-1.0, +1.0, -1.0, +1.0};
  }

  /// Nodes of a cell ordered {(0,0), (1,0), (0,1), (1,1)} in local coords.
  std::array<int, 4> cell_nodes(int c) const {
    int i = cell_i(c), j = cell_j(c);
    return {node_id(i, j), node_id(i + 1, j), node_id(i, j + 1),
            node_id(i + 1, j + 1)};
  }

  double cell_area(int /*c*/) const { return hx_ * hy_; }
  double cell_center_x(int c) const { return (cell_i(c) + 0.5) * hx_; }
  double cell_center_y(int c) const { return (cell_j(c) + 0.5) * hy_; }

  std::vector<int> boundary_edges() const {
    std::vector<int> out;
    for (int e = 0; e < n_edges(); ++e)
      if (edge_on_domain_boundary(e)) out.push_back(e);
    return out;
  }

 private:
  int nx_, ny_;
  double hx_, hy_;
};

/// Subset of cells with cached incident/interior/boundary edge lists and node
/// set, plus global-to-local index maps. Local DOF numbering for all
/// region-restricted operators is the position in the sorted id lists, which
/// makes it deterministic.
class CellRegion {
 public:
  CellRegion(const Mesh& mesh, std::vector<int> cells)
      : mesh_(&mesh), cells_(std::move(cells)) {
    require(!cells_.empty(), "region: empty cell set");
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    require(cells_.front() >= 0 && cells_.back() < mesh.n_cells(),
            "region: cell id out of range");
    in_region_.assign(mesh.n_cells(), 0);
    for (int c : cells_) in_region_[c] = 1;
    require(edge_connected(), "region: cell set is not edge-connected");
    build_edge_and_node_sets();
  }

  /// Axis-aligned rectangle of cells [i0, i0+w) x [j0, j0+h).
  static CellRegion rectangle(const Mesh& mesh, int i0, int j0, int w, int h) {
    require(w >= 1 && h >= 1 && i0 >= 0 && j0 >= 0 && i0 + w <= mesh.nx() &&
                j0 + h <= mesh.ny(),
            "region: rectangle outside mesh");
    std::vector<int> cells;
    cells.reserve(static_cast<size_t>(w) * h);
    for (int j = j0; j < j0 + h; ++j)
      for (int i = i0; i < i0 + w; ++i) cells.push_back(mesh.cell_id(i, j));
    return CellRegion(mesh, std::move(cells));
  }

  static CellRegion whole(const Mesh& mesh) {
    std::vector<int> cells(mesh.n_cells());
    for (int c = 0; c < mesh.n_cells(); ++c) cells[c] = c;
    return CellRegion(mesh, std::move(cells));
  }

  const Mesh& mesh() const { return *mesh_; }
  const std::vector<int>& cells() const { return cells_; }
  const std::vector<int>& edges() const { return edges_; }
  const std::vector<int>& nodes() const { return nodes_; }
  const std::vector<int>& interior_edges() const { return interior_edges_; }
  /// Boundary edges on the domain boundary (where the region meets the unit
  /// square's boundary).
  const std::vector<int>& boundary_edges_domain() const {
    return boundary_domain_;
  }
  /// Boundary edges in the interior of the domain (the interface to the rest
  /// of the mesh).
  const std::vector<int>& boundary_edges_interface() const {
    return boundary_interface_;
  }

  int n_cells() const { return static_cast<int>(cells_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  int n_nodes() const { return static_cast<int>(nodes_.size()); }

  bool contains_cell(int c) const { return in_region_[c] != 0; }

  /// Local index of a global id within the region's sorted id list; -1 when
  /// absent.
  int local_cell(int c) const { return local_index(cells_, c); }
  int local_edge(int e) const { return local_index(edges_, e); }
  int local_node(int v) const { return local_index(nodes_, v); }

 private:
  static int local_index(const std::vector<int>& ids, int global) {
    auto it = std::lower_bound(ids.begin(), ids.end(), global);
    if (it == ids.end() || *it != global) return -1;
    return static_cast<int>(it - ids.begin());
  }

  bool edge_connected() const {
    std::vector<char> seen(mesh_->n_cells(), 0);
    std::vector<int> stack = {cells_.front()};
    seen[cells_.front()] = 1;
    size_t visited = 0;
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      ++visited;
      for (int e : mesh_->cell_edges(c)) {
        for (int nb : mesh_->edge_cells(e)) {
          if (nb >= 0 && nb != c && in_region_[nb] && !seen[nb]) {
            seen[nb] = 1;
            stack.push_back(nb);
          }
        }
      }
    }
    return visited == cells_.size();
  }

  void build_edge_and_node_sets() {
    const Mesh& m = *mesh_;
    std::vector<int> nodes;
    for (int c : cells_) {
      for (int e : m.cell_edges(c)) edges_.push_back(e);
      for (int v : m.cell_nodes(c)) nodes.push_back(v);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    nodes_ = std::move(nodes);

    for (int e : edges_) {
      auto cells = m.edge_cells(e);
      bool in0 = cells[0] >= 0 && in_region_[cells[0]];
      bool in1 = cells[1] >= 0 && in_region_[cells[1]];
      if (in0 && in1) {
        interior_edges_.push_back(e);
      } else if (cells[0] < 0 || cells[1] < 0) {
        boundary_domain_.push_back(e);
      } else {
        boundary_interface_.push_back(e);
      }
    }
  }

  const Mesh* mesh_;
  std::vector<int> cells_;
  std::vector<char> in_region_;
  std::vector<int> edges_, nodes_;
  std::vector<int> interior_edges_, boundary_domain_, boundary_interface_;
};

/// The two disjoint halves of a region's boundary edge set: edges on the
/// domain boundary and edges on the interface to the rest of the mesh.
inline std::pair<std::vector<int>, std::vector<int>> region_boundary_split(
    const CellRegion& region) {
  return {region.boundary_edges_domain(), region.boundary_edges_interface()};
}

/// Region nodes split by role for nodal (stream-function) spaces: interior
/// nodes, interface nodes (on the region boundary but off the domain
/// boundary), and nodes on the domain-boundary part of the region boundary.
struct RegionNodeSplit {
  std::vector<int> interior;
  std::vector<int> interface;
  std::vector<int> domain_boundary;
};

inline RegionNodeSplit region_node_split(const CellRegion& region) {
  const Mesh& m = region.mesh();
  // 0 = interior, 1 = interface, 2 = domain boundary (strongest wins).
  std::vector<char> role(m.n_nodes(), 0);
  for (int e : region.boundary_edges_interface())
    for (int v : m.edge_nodes(e)) role[v] = std::max(role[v], char(1));
  for (int e : region.boundary_edges_domain())
    for (int v : m.edge_nodes(e)) role[v] = 2;
  RegionNodeSplit split;
  for (int v : region.nodes()) {
    if (role[v] == 0)
      split.interior.push_back(v);
    else if (role[v] == 1)
      split.interface.push_back(v);
    else
      split.domain_boundary.push_back(v);
  }
  return split;
}

}  // namespace msgfem

#endif  // MSGFEM_MESH_HPP
