#ifndef MSGFEM_ASSEMBLY_HPP
#define MSGFEM_ASSEMBLY_HPP

#include <array>
#include <cmath>

#include "msgfem/coefficient.hpp"
#include "msgfem/core.hpp"
#include "msgfem/mesh.hpp"

namespace msgfem {

/// Cell areas of a region in region-local cell order.
inline Eigen::VectorXd region_cell_areas(const CellRegion& region) {
  Eigen::VectorXd areas(region.n_cells());
  for (int lc = 0; lc < region.n_cells(); ++lc)
    areas[lc] = region.mesh().cell_area(region.cells()[lc]);
  return areas;
}

/// Weighted velocity mass matrix a(u, v) = sum_K (1/A_K) int_K u.v on the
/// region's cells, indexed by region-local edges. Element integrals of RT0
/// shape functions on a rectangle are exact: same-direction pairs couple as
/// (hx*hy/6)*[[2,1],[1,2]], perpendicular pairs vanish.
inline SparseMat assemble_mass(const Mesh& mesh, const CoefficientField& A,
                               const CellRegion& region) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(region.n_cells()) * 8);
  double w_cell = mesh.hx() * mesh.hy() / 6.0;
  for (int c : region.cells()) {
    auto edges = mesh.cell_edges(c);
    std::array<int, 4> loc;
    for (int k = 0; k < 4; ++k) loc[k] = region.local_edge(edges[k]);
    double w = w_cell * A.inverse(c);
    // Pairs (left, right) and (bottom, top).
    for (int base : {0, 2}) {
      trip.emplace_back(loc[base], loc[base], 2.0 * w);
      trip.emplace_back(loc[base + 1], loc[base + 1], 2.0 * w);
      trip.emplace_back(loc[base], loc[base + 1], w);
      trip.emplace_back(loc[base + 1], loc[base], w);
    }
  }
  SparseMat M(region.n_edges(), region.n_edges());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

/// Divergence pairing b(u, q) = int q div u as a (cells x edges) matrix of
/// signed edge lengths: q^T B u = sum_K q_K * (net outward flux of u on K).
inline SparseMat assemble_div(const Mesh& mesh, const CellRegion& region) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(region.n_cells()) * 4);
  auto signs = Mesh::cell_edge_signs();
  for (int lc = 0; lc < region.n_cells(); ++lc) {
    int c = region.cells()[lc];
    auto edges = mesh.cell_edges(c);
    for (int k = 0; k < 4; ++k) {
      trip.emplace_back(lc, region.local_edge(edges[k]),
                        signs[k] * mesh.edge_length(edges[k]));
    }
  }
  SparseMat B(region.n_cells(), region.n_edges());
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

/// Augmented velocity form a^gamma = a + gamma*(div u, div v). In matrix
/// terms a + gamma * B^T W^{-1} B with W the cell-area weights.
inline SparseMat assemble_augmented(const SparseMat& mass, const SparseMat& div,
                                    const Eigen::VectorXd& areas,
                                    double gamma) {
  require(gamma >= 0.0, "augmented form: gamma must be nonnegative");
  require(div.rows() == areas.size() && div.cols() == mass.cols(),
          "augmented form: dimension mismatch");
  if (gamma == 0.0) return mass;
  Eigen::VectorXd inv_areas = areas.cwiseInverse();
  SparseMat weighted = inv_areas.asDiagonal() * div;
  SparseMat result = mass + gamma * SparseMat(div.transpose() * weighted);
  return result;
}

/// Load functional (f, q) over the region: entry per cell = f_K * |K|.
/// f is given as cell values on the whole mesh (midpoint sampling for
/// analytic sources happens upstream).
inline Eigen::VectorXd assemble_load(const Mesh& mesh,
                                     const Eigen::VectorXd& f_cells,
                                     const CellRegion& region) {
  require(f_cells.size() == mesh.n_cells(),
          "load: f must have one value per mesh cell");
  Eigen::VectorXd F(region.n_cells());
  for (int lc = 0; lc < region.n_cells(); ++lc) {
    int c = region.cells()[lc];
    F[lc] = f_cells[c] * mesh.cell_area(c);
  }
  return F;
}

/// Edge functional v -> b(v, f) for a cell-wise f on the region, used for
/// the gamma-weighted source term of the augmented system.
inline Eigen::VectorXd divergence_load(const SparseMat& div,
                                       const Eigen::VectorXd& f_cells_local) {
  require(div.rows() == f_cells_local.size(), "divergence load: size mismatch");
  return div.transpose() * f_cells_local;
}

/// Cell-wise divergence values (B u) / |K|.
inline Eigen::VectorXd cellwise_divergence(const SparseMat& div,
                                           const Eigen::VectorXd& areas,
                                           const Eigen::VectorXd& u) {
  return (div * u).cwiseQuotient(areas);
}

/// Raviart-Thomas interpolation of chi*u for a nodal bilinear chi and an RT0
/// field u: per edge, the mean of (chi*u).normal is the edge flux times the
/// mean of chi's two endpoint values (the trace of chi along an axis edge is
/// linear, so the midpoint/trapezoid rule is exact).
inline Eigen::VectorXd rt_interpolate_scaled(const Mesh& mesh,
                                             const Eigen::VectorXd& chi_nodes,
                                             const Eigen::VectorXd& u,
                                             const CellRegion& region) {
  require(chi_nodes.size() == mesh.n_nodes(),
          "interpolation: chi must be a full nodal field");
  require(u.size() == region.n_edges(),
          "interpolation: u must live on region edges");
  Eigen::VectorXd out(region.n_edges());
  for (int le = 0; le < region.n_edges(); ++le) {
    auto nodes = mesh.edge_nodes(region.edges()[le]);
    out[le] = u[le] * 0.5 * (chi_nodes[nodes[0]] + chi_nodes[nodes[1]]);
  }
  return out;
}

/// Incidence matrix of the discrete curl: maps region-local nodal stream
/// values to region-local edge fluxes. For a vertical edge (normal +x) the
/// flux is the tangential difference along +y divided by the length;
/// horizontal edges (normal +y) pick up the opposite sign. The composition
/// div . curl vanishes identically.
inline SparseMat curl_matrix(const Mesh& mesh, const CellRegion& region) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(region.n_edges()) * 2);
  for (int le = 0; le < region.n_edges(); ++le) {
    int e = region.edges()[le];
    auto nodes = mesh.edge_nodes(e);
    int la = region.local_node(nodes[0]);
    int lb = region.local_node(nodes[1]);
    double inv_len = 1.0 / mesh.edge_length(e);
    if (mesh.edge_is_vertical(e)) {
      trip.emplace_back(le, lb, inv_len);
      trip.emplace_back(le, la, -inv_len);
    } else {
      trip.emplace_back(le, la, inv_len);
      trip.emplace_back(le, lb, -inv_len);
    }
  }
  SparseMat C(region.n_edges(), region.n_nodes());
  C.setFromTriplets(trip.begin(), trip.end());
  return C;
}

inline Eigen::VectorXd curl_of_stream(const Mesh& mesh,
                                      const Eigen::VectorXd& phi_nodes,
                                      const CellRegion& region) {
  require(phi_nodes.size() == region.n_nodes(),
          "curl: phi must live on region nodes");
  return curl_matrix(mesh, region) * phi_nodes;
}

/// Bilinear nodal stiffness with coefficient 1/A over the region's cells,
/// indexed by region-local nodes. For curls of bilinear stream functions
/// this equals the velocity form: a(curl p, curl q) = int (1/A) grad p .
/// grad q, which is what the local eigenproblems are posed in.
inline SparseMat assemble_stream_stiffness_cells(const Mesh& mesh,
                                                 const CoefficientField& A,
                                                 const CellRegion& index_region,
                                                 const std::vector<int>& cells) {
  double hx = mesh.hx(), hy = mesh.hy();
  double rx = hy / (6.0 * hx), ry = hx / (6.0 * hy);
  // Node order {(0,0), (1,0), (0,1), (1,1)}; exact element integrals of
  // grad(N_i).grad(N_j) on a rectangle.
  const double Kxx[4][4] = {{2, -2, 1, -1}, {-2, 2, -1, 1}, {1, -1, 2, -2},
                            {-1, 1, -2, 2}};
  const double Kyy[4][4] = {{2, 1, -2, -1}, {1, 2, -1, -2}, {-2, -1, 2, 1},
                            {-1, -2, 1, 2}};
  std::vector<Triplet> trip;
  trip.reserve(cells.size() * 16);
  for (int c : cells) {
    auto nodes = mesh.cell_nodes(c);
    std::array<int, 4> loc;
    for (int k = 0; k < 4; ++k) {
      loc[k] = index_region.local_node(nodes[k]);
      require(loc[k] >= 0, "stream stiffness: cell outside the index region");
    }
    double w = A.inverse(c);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        trip.emplace_back(loc[a], loc[b], w * (rx * Kxx[a][b] + ry * Kyy[a][b]));
  }
  SparseMat S(index_region.n_nodes(), index_region.n_nodes());
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

inline SparseMat assemble_stream_stiffness(const Mesh& mesh,
                                           const CoefficientField& A,
                                           const CellRegion& region) {
  return assemble_stream_stiffness_cells(mesh, A, region, region.cells());
}

}  // namespace msgfem

#endif  // MSGFEM_ASSEMBLY_HPP
