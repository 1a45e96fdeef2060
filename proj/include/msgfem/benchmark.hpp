#pragma once

// Closed-form smooth benchmark on the unit square with A = 1:
//   p(x,y) = cos(pi x) cos(pi y),  u = grad p,  div u = -f,
//   f(x,y) = 2 pi^2 cos(pi x) cos(pi y),  u . nu = 0 on the boundary.
// Drives the fine-solver convergence check and the example1 source option.

#include <cmath>

#include "msgfem/assembly.hpp"
#include "msgfem/mesh.hpp"

namespace msgfem::benchmark {

inline double exact_pressure(double x, double y) {
  return std::cos(M_PI * x) * std::cos(M_PI * y);
}

inline double exact_ux(double x, double y) {
  return -M_PI * std::sin(M_PI * x) * std::cos(M_PI * y);
}

inline double exact_uy(double x, double y) {
  return -M_PI * std::cos(M_PI * x) * std::sin(M_PI * y);
}

inline double smooth_source(double x, double y) {
  return 2.0 * M_PI * M_PI * std::cos(M_PI * x) * std::cos(M_PI * y);
}

inline Eigen::VectorXd smooth_source_cells(const Mesh& mesh) {
  Eigen::VectorXd f(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c)
    f[c] = smooth_source(mesh.cell_center_x(c), mesh.cell_center_y(c));
  return f;
}

/// L2 distance between the lowest-order Raviart-Thomas field given by edge
/// DOFs `u` (whole-mesh numbering) and the closed-form velocity, by 3x3 Gauss
/// quadrature per cell; exact for the polynomial part of the integrand.
inline double l2_error_vs_exact_velocity(const Mesh& mesh,
                                         const Eigen::VectorXd& u) {
  const double a = std::sqrt(3.0 / 5.0);
  const double pts[3] = {0.5 * (1 - a), 0.5, 0.5 * (1 + a)};
  const double wts[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  double total = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    auto e = mesh.cell_edges(c);
    double uL = u[e[0]], uR = u[e[1]], uB = u[e[2]], uT = u[e[3]];
    double x0 = mesh.cell_center_x(c) - 0.5 * mesh.hx();
    double y0 = mesh.cell_center_y(c) - 0.5 * mesh.hy();
    double cell = 0.0;
    for (int ix = 0; ix < 3; ++ix)
      for (int iy = 0; iy < 3; ++iy) {
        double sx = pts[ix], sy = pts[iy];
        double x = x0 + sx * mesh.hx(), y = y0 + sy * mesh.hy();
        double uhx = uL * (1 - sx) + uR * sx;
        double uhy = uB * (1 - sy) + uT * sy;
        double dx = uhx - exact_ux(x, y);
        double dy = uhy - exact_uy(x, y);
        cell += wts[ix] * wts[iy] * (dx * dx + dy * dy);
      }
    total += cell * mesh.cell_area(c);
  }
  return std::sqrt(total);
}

/// ||grad p||_{L2} for the closed form: pi / sqrt(2).
inline double exact_velocity_norm() { return M_PI / std::sqrt(2.0); }

}  // namespace msgfem::benchmark
