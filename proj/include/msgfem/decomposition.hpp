#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "core.hpp"
#include "mesh.hpp"

namespace msgfem {

/// Overlapping domain decomposition of the unit square into m x m blocks:
/// omega0 partitions the cells, omega extends each block by a fixed number
/// of fine layers, omega_star adds ell more for oversampling; all regions
/// are clipped at the domain boundary. chi holds one global nodal field per
/// subdomain forming a partition of unity supported on omega.
struct Decomposition {
  const Mesh* mesh = nullptr;
  int m = 0;
  int ell = 0;
  int overlap_layers = 0;
  std::vector<CellRegion> omega0;
  std::vector<CellRegion> omega;
  std::vector<CellRegion> omega_star;
  std::vector<Eigen::VectorXd> chi;
  int kappa = 0;       // max number of omega covering one cell
  int kappa_star = 0;  // same for omega_star

  int n_subdomains() const { return m * m; }
};

namespace detail {

struct BlockExtent {
  int i0, i1, j0, j1;  // cell index ranges [i0, i1) x [j0, j1)
};

inline BlockExtent clip_extend(const Mesh& mesh, BlockExtent e, int layers) {
  return {std::max(0, e.i0 - layers), std::min(mesh.nx(), e.i1 + layers),
          std::max(0, e.j0 - layers), std::min(mesh.ny(), e.j1 + layers)};
}

inline CellRegion extent_region(const Mesh& mesh, const BlockExtent& e) {
  return CellRegion::rectangle(mesh, e.i0, e.j0, e.i1 - e.i0, e.j1 - e.j0);
}

}  // namespace detail

inline Decomposition build_decomposition(const Mesh& mesh, int m, int ell,
                                         int overlap_layers = 2) {
  require(m >= 1, "decomposition: m must be at least 1");
  require(mesh.nx() % m == 0 && mesh.ny() % m == 0,
          "decomposition: m = " + std::to_string(m) +
              " must divide the mesh resolution " + std::to_string(mesh.nx()) +
              "x" + std::to_string(mesh.ny()));
  require(ell >= 1, "decomposition: oversampling ell must be at least 1 "
                    "(ell = 0 makes the local eigenproblem singular)");
  require(overlap_layers >= 1, "decomposition: overlap must be at least 1 layer");
  const int bw = mesh.nx() / m, bh = mesh.ny() / m;
  if (m > 1)
    require(bw > 2 * overlap_layers && bh > 2 * overlap_layers,
            "decomposition: blocks of " + std::to_string(bw) + "x" +
                std::to_string(bh) +
                " cells are too small for the overlap width " +
                std::to_string(2 * overlap_layers));

  Decomposition d;
  d.mesh = &mesh;
  d.m = m;
  d.ell = ell;
  d.overlap_layers = overlap_layers;

  std::vector<detail::BlockExtent> ext_omega;
  for (int bj = 0; bj < m; ++bj)
    for (int bi = 0; bi < m; ++bi) {
      detail::BlockExtent e0{bi * bw, (bi + 1) * bw, bj * bh, (bj + 1) * bh};
      detail::BlockExtent e1 = detail::clip_extend(mesh, e0, overlap_layers);
      detail::BlockExtent e2 = detail::clip_extend(mesh, e1, ell);
      d.omega0.push_back(detail::extent_region(mesh, e0));
      d.omega.push_back(detail::extent_region(mesh, e1));
      d.omega_star.push_back(detail::extent_region(mesh, e2));
      ext_omega.push_back(e1);
    }

  // Partition of unity: per subdomain a linear ramp in the layer distance to
  // the boundary of omega_i (infinite toward sides clipped at the domain
  // boundary), capped at 1 over the overlap width, then normalized nodewise.
  const double width = 2.0 * overlap_layers;
  const int inf = mesh.nx() + mesh.ny() + 8;
  Eigen::VectorXd total = Eigen::VectorXd::Zero(mesh.n_nodes());
  for (int s = 0; s < d.n_subdomains(); ++s) {
    const auto& e = ext_omega[s];
    Eigen::VectorXd raw = Eigen::VectorXd::Zero(mesh.n_nodes());
    for (int vj = e.j0; vj <= e.j1; ++vj)
      for (int vi = e.i0; vi <= e.i1; ++vi) {
        int dx = std::min(e.i0 > 0 ? vi - e.i0 : inf,
                          e.i1 < mesh.nx() ? e.i1 - vi : inf);
        int dy = std::min(e.j0 > 0 ? vj - e.j0 : inf,
                          e.j1 < mesh.ny() ? e.j1 - vj : inf);
        raw[mesh.node_id(vi, vj)] =
            std::min(1.0, static_cast<double>(std::min(dx, dy)) / width);
      }
    total += raw;
    d.chi.push_back(std::move(raw));
  }
  for (int v = 0; v < mesh.n_nodes(); ++v)
    require_numeric(total[v] > 0.25,
                    "decomposition: node " + std::to_string(v) +
                        " not covered by any ramp (unexpected geometry)");
  for (auto& chi : d.chi) chi.array() /= total.array();

  auto max_cover = [&](const std::vector<CellRegion>& regions) {
    std::vector<int> count(mesh.n_cells(), 0);
    for (const auto& r : regions)
      for (int c : r.cells()) ++count[c];
    return *std::max_element(count.begin(), count.end());
  };
  d.kappa = max_cover(d.omega);
  d.kappa_star = max_cover(d.omega_star);
  return d;
}

/// Largest gradient magnitude of any chi_i, evaluated exactly from the
/// bilinear representation (the maximum over a cell is attained at a corner
/// because each derivative depends on one reference coordinate only).
inline double pou_gradient_bound(const Decomposition& d) {
  const Mesh& mesh = *d.mesh;
  double best = 0.0;
  for (int s = 0; s < d.n_subdomains(); ++s) {
    const Eigen::VectorXd& chi = d.chi[s];
    for (int c : d.omega[s].cells()) {
      auto nodes = mesh.cell_nodes(c);
      double v00 = chi[nodes[0]], v10 = chi[nodes[1]], v01 = chi[nodes[2]],
             v11 = chi[nodes[3]];
      for (double eta : {0.0, 1.0})
        for (double xi : {0.0, 1.0}) {
          double dx = ((v10 - v00) * (1 - eta) + (v11 - v01) * eta) / mesh.hx();
          double dy = ((v01 - v00) * (1 - xi) + (v11 - v10) * xi) / mesh.hy();
          best = std::max(best, std::hypot(dx, dy));
        }
    }
  }
  return best;
}

}  // namespace msgfem
