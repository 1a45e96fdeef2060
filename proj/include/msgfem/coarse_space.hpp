#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "msgfem/local_basis.hpp"

namespace msgfem {

/// Global multiscale trial pair, stored column-wise in fine DOFs. Velocity
/// columns: partition-of-unity-glued spectral modes, zero-extended enrichment
/// fields, and the interior coarse Raviart-Thomas edge functions. Pressure
/// columns: zero-extended spectral pressures and the subdomain indicators
/// (their rank-1 constant overlap is absorbed by a mean-zero multiplier in
/// the coarse solve). The particular pair rides along since every solve
/// needs it.
struct CoarseSpaces {
  SparseMat velocity;  // n_edges x (n_spectral + n_enrich + n_coarse_rt)
  SparseMat pressure;  // n_cells x (n_spectral_p + n_indicator)
  int n_spectral = 0;
  int n_enrich = 0;
  int n_coarse_rt = 0;
  int n_spectral_p = 0;
  int n_indicator = 0;
  Eigen::VectorXd u_par;  // global particular velocity
  Eigen::VectorXd p_par;  // global particular pressure, mean zero

  int n_velocity() const { return n_spectral + n_enrich + n_coarse_rt; }
  int n_pressure() const { return n_spectral_p + n_indicator; }
};

/// Solution of the coarse Galerkin problem lifted back to fine DOFs.
struct GfemSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd p;
  int coarse_dof_count = 0;
  double residual_rel = 0.0;
  int n_system = 0;
};

/// Relative errors of a coarse solution against a fine reference: velocity in
/// the A^{-1}-weighted L2 norm, pressure in plain L2, divergence in L2 of the
/// cell-wise divergences.
struct ErrorReport {
  double velocity = 0.0;
  double pressure = 0.0;
  double divergence = 0.0;
};

/// Glue the local source-lifting solves into the global particular pair:
/// velocity through the flux interpolant of the partition-of-unity products,
/// pressure by placing each interior-subdomain piece on its disjoint block
/// and shifting the result to global mean zero.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> assemble_global_particular(
    const Mesh& mesh, const Decomposition& d,
    const std::vector<SubdomainBasis>& locals) {
  require(static_cast<int>(locals.size()) == d.n_subdomains(),
          "global particular: one local basis per subdomain required");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(mesh.n_edges());
  Eigen::VectorXd p = Eigen::VectorXd::Zero(mesh.n_cells());
  for (int i = 0; i < d.n_subdomains(); ++i) {
    const CellRegion& omega = d.omega[i];
    Eigen::VectorXd glued =
        rt_interpolate_scaled(mesh, d.chi[i], locals[i].particular.u, omega);
    for (int le = 0; le < omega.n_edges(); ++le)
      u[omega.edges()[le]] += glued[le];
    const CellRegion& omega0 = d.omega0[i];
    for (int lc = 0; lc < omega0.n_cells(); ++lc)
      p[omega0.cells()[lc]] = locals[i].particular.p[lc];
  }
  double area_total = mesh.nx() * mesh.ny() * mesh.cell_area(0);
  double mean = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) mean += p[c] * mesh.cell_area(c);
  p.array() -= mean / area_total;
  return {std::move(u), std::move(p)};
}

namespace detail {

/// Append one coarse Raviart-Thomas edge function as fine-DOF triplets: a
/// normal-flux ramp across the two coarse cells sharing the edge, exactly
/// representable in the fine space. `vertical` selects the edge orientation.
inline void append_coarse_rt_column(const Mesh& mesh, int m, int bi, int bj,
                                    bool vertical, int col,
                                    std::vector<Eigen::Triplet<double>>& out) {
  int nbx = mesh.nx() / m, nby = mesh.ny() / m;
  if (vertical) {
    // Edge between blocks (bi, bj) and (bi+1, bj); flux density ramps in x.
    for (int ix = bi * nbx + 1; ix < (bi + 2) * nbx; ++ix) {
      double val = 1.0 - std::abs(ix - (bi + 1) * nbx) / static_cast<double>(nbx);
      for (int jc = bj * nby; jc < (bj + 1) * nby; ++jc)
        out.emplace_back(mesh.vertical_edge_id(ix, jc), col, val);
    }
  } else {
    for (int jy = bj * nby + 1; jy < (bj + 2) * nby; ++jy) {
      double val = 1.0 - std::abs(jy - (bj + 1) * nby) / static_cast<double>(nby);
      for (int ic = bi * nbx; ic < (bi + 1) * nbx; ++ic)
        out.emplace_back(mesh.horizontal_edge_id(ic, jy), col, val);
    }
  }
}

}  // namespace detail

/// Assemble the multiscale spaces from the per-subdomain bases. Spectral
/// velocity columns are normalized in the weighted L2 norm; the two flags
/// drop the enrichment and coarse Raviart-Thomas blocks for ablation runs.
inline CoarseSpaces assemble_coarse_spaces(const Mesh& mesh,
                                           const CoefficientField& A,
                                           const Decomposition& d,
                                           const std::vector<SubdomainBasis>& locals,
                                           bool with_enrichment = true,
                                           bool with_coarse_rt = true) {
  require(static_cast<int>(locals.size()) == d.n_subdomains(),
          "coarse spaces: one local basis per subdomain required");
  const int M = d.n_subdomains();
  const int n_loc = static_cast<int>(locals[0].velocity.modes.size());
  for (const auto& b : locals)
    require(static_cast<int>(b.velocity.modes.size()) == n_loc,
            "coarse spaces: inconsistent mode count across subdomains");

  CoarseSpaces out;
  out.n_spectral = M * n_loc;
  out.n_enrich = with_enrichment ? M * n_loc : 0;
  out.n_coarse_rt = with_coarse_rt ? 2 * d.m * (d.m - 1) : 0;
  out.n_spectral_p = M * n_loc;
  out.n_indicator = M;

  std::vector<Eigen::Triplet<double>> vt, qt;
  int col = 0;
  for (int i = 0; i < M; ++i) {
    const CellRegion& omega = d.omega[i];
    SparseMat mass = assemble_mass(mesh, A, omega);
    for (int k = 0; k < n_loc; ++k, ++col) {
      Eigen::VectorXd glued = rt_interpolate_scaled(
          mesh, d.chi[i], locals[i].velocity.modes[k], omega);
      double norm = std::sqrt(glued.dot(mass * glued));
      require(norm > 1e-14, "coarse spaces: glued mode " + std::to_string(k) +
                                " of subdomain " + std::to_string(i) +
                                " vanished");
      for (int le = 0; le < omega.n_edges(); ++le)
        if (glued[le] != 0.0)
          vt.emplace_back(omega.edges()[le], col, glued[le] / norm);
    }
  }
  if (with_enrichment) {
    for (int i = 0; i < M; ++i) {
      const CellRegion& omega0 = d.omega0[i];
      for (int k = 0; k < n_loc; ++k, ++col) {
        const Eigen::VectorXd& u = locals[i].enrichment.fields[k];
        for (int le = 0; le < omega0.n_edges(); ++le)
          if (u[le] != 0.0) vt.emplace_back(omega0.edges()[le], col, u[le]);
      }
    }
  }
  if (with_coarse_rt) {
    for (int bi = 0; bi + 1 < d.m; ++bi)
      for (int bj = 0; bj < d.m; ++bj, ++col)
        detail::append_coarse_rt_column(mesh, d.m, bi, bj, true, col, vt);
    for (int bi = 0; bi < d.m; ++bi)
      for (int bj = 0; bj + 1 < d.m; ++bj, ++col)
        detail::append_coarse_rt_column(mesh, d.m, bi, bj, false, col, vt);
  }
  out.velocity.resize(mesh.n_edges(), out.n_velocity());
  out.velocity.setFromTriplets(vt.begin(), vt.end());

  col = 0;
  for (int i = 0; i < M; ++i) {
    const CellRegion& omega0 = d.omega0[i];
    for (int k = 0; k < n_loc; ++k, ++col) {
      const Eigen::VectorXd& p = locals[i].pressure.pressures[k];
      for (int lc = 0; lc < omega0.n_cells(); ++lc)
        if (p[lc] != 0.0) qt.emplace_back(omega0.cells()[lc], col, p[lc]);
    }
  }
  for (int i = 0; i < M; ++i, ++col)
    for (int c : d.omega0[i].cells()) qt.emplace_back(c, col, 1.0);
  out.pressure.resize(mesh.n_cells(), out.n_pressure());
  out.pressure.setFromTriplets(qt.begin(), qt.end());

  auto par = assemble_global_particular(mesh, d, locals);
  out.u_par = std::move(par.first);
  out.p_par = std::move(par.second);
  return out;
}

/// Galerkin projection of the augmented fine problem onto the coarse columns
/// around the particular pair. The coarse saddle system carries one Lagrange
/// multiplier pinning the pressure update to mean zero (the indicator columns
/// overlap the constants). Residual checked against `tol`; a failed solve
/// reports the column rank to point at missing enrichment or duplicates.
inline GfemSolution solve_gfem(const Mesh& mesh, const CoefficientField& A,
                               const Eigen::VectorXd& f, double gamma,
                               const CoarseSpaces& spaces, double tol = 1e-8) {
  require(f.size() == mesh.n_cells(), "gfem: f must hold one value per cell");
  require(gamma >= 0.0, "gfem: augmentation weight must be nonnegative");
  const int nv = spaces.n_velocity();
  const int nq = spaces.n_pressure();
  if (nv == 0) throw ConfigError("gfem: coarse velocity space is empty");

  CellRegion whole = CellRegion::whole(mesh);
  SparseMat Mw = assemble_mass(mesh, A, whole);
  SparseMat B = assemble_div(mesh, whole);
  Eigen::VectorXd areas = region_cell_areas(whole);
  SparseMat Ag = assemble_augmented(Mw, B, areas, gamma);

  const SparseMat& V = spaces.velocity;
  const SparseMat& Q = spaces.pressure;
  SparseMat AgV = Ag * V;
  SparseMat BV = B * V;
  Eigen::MatrixXd Avv = Eigen::MatrixXd(SparseMat(V.transpose() * AgV));
  Eigen::MatrixXd C = Eigen::MatrixXd(SparseMat(Q.transpose() * BV));

  Eigen::VectorXd F = f.cwiseProduct(areas);
  Eigen::VectorXd r1 =
      V.transpose() *
      Eigen::VectorXd(-gamma * (B.transpose() * f) - Ag * spaces.u_par -
                      B.transpose() * spaces.p_par);
  Eigen::VectorXd r2 = Q.transpose() * Eigen::VectorXd(-F - B * spaces.u_par);
  Eigen::VectorXd c = Q.transpose() * areas;

  const int n = nv + nq + 1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  K.topLeftCorner(nv, nv) = Avv;
  K.block(0, nv, nv, nq) = C.transpose();
  K.block(nv, 0, nq, nv) = C;
  K.block(nv, nv + nq, nq, 1) = c;
  K.block(nv + nq, nv, 1, nq) = c.transpose();
  Eigen::VectorXd rhs(n);
  rhs << r1, r2, 0.0;

  Eigen::VectorXd z = Eigen::PartialPivLU<Eigen::MatrixXd>(K).solve(rhs);
  double residual = (K * z - rhs).norm() / std::max(1.0, rhs.norm());
  if (!z.allFinite() || residual > tol) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    throw NumericalError(
        "gfem: coarse solve residual " + std::to_string(residual) +
        " exceeds tolerance; column rank " + std::to_string(lu.rank()) +
        " of " + std::to_string(n) +
        " (missing enrichment or duplicate columns?)");
  }

  GfemSolution sol;
  sol.u = spaces.u_par + V * z.head(nv);
  sol.p = spaces.p_par + Q * z.segment(nv, nq);
  sol.p.array() -= sol.p.dot(areas) / areas.sum();
  sol.coarse_dof_count = nv + nq;
  sol.residual_rel = residual;
  sol.n_system = n;
  return sol;
}

/// Discrete inf-sup constant of the coarse pair: smallest singular value of
/// the divergence coupling whitened by the velocity H(div)-energy and the
/// pressure L2 Gramians, restricted to mean-zero pressures (the constant
/// pairs with nothing because every coarse velocity has zero boundary flux).
/// Dense computation; refuses oversized spaces rather than approximating.
inline double estimate_infsup(const Mesh& mesh, const CoefficientField& A,
                              const CoarseSpaces& spaces) {
  const int nv = spaces.n_velocity();
  const int nq = spaces.n_pressure();
  require(nv > 0 && nq > 0, "infsup: empty coarse space");
  if (nv + nq > 2000)
    throw ConfigError("infsup: coarse space too large for the dense estimate (" +
                      std::to_string(nv + nq) + " columns, limit 2000)");
  if (nq < 2)
    throw ConfigError("infsup: pressure space holds only the constant");

  CellRegion whole = CellRegion::whole(mesh);
  SparseMat Mw = assemble_mass(mesh, A, whole);
  SparseMat B = assemble_div(mesh, whole);
  Eigen::VectorXd areas = region_cell_areas(whole);

  const SparseMat& V = spaces.velocity;
  const SparseMat& Q = spaces.pressure;
  SparseMat BV = B * V;
  Eigen::MatrixXd Gv = Eigen::MatrixXd(SparseMat(V.transpose() * (Mw * V))) +
                       Eigen::MatrixXd(SparseMat(
                           BV.transpose() * areas.cwiseInverse().asDiagonal() * BV));
  Eigen::MatrixXd Gq =
      Eigen::MatrixXd(SparseMat(Q.transpose() * areas.asDiagonal() * Q));
  Eigen::MatrixXd C = Eigen::MatrixXd(SparseMat(Q.transpose() * BV));

  Eigen::LLT<Eigen::MatrixXd> lv(Gv);
  if (lv.info() != Eigen::Success)
    throw NumericalError(
        "infsup: velocity Gramian not positive definite (duplicate columns?)");
  Eigen::LLT<Eigen::MatrixXd> lq(Gq);
  if (lq.info() != Eigen::Success)
    throw NumericalError("infsup: pressure Gramian not positive definite");

  // Whiten: rows by the pressure Gramian, columns by the velocity energy.
  Eigen::MatrixXd W = lq.matrixL().solve(
      Eigen::MatrixXd(lv.matrixL().solve(C.transpose()).transpose()));

  // Deflate the mean-zero constraint: admissible coefficients satisfy
  // c^T y = 0 with c the column means, i.e. whitened vectors orthogonal to
  // L_q^{-1} c. Formulating it through c keeps the estimate exactly
  // invariant under rescaling of individual columns.
  Eigen::VectorXd c = Q.transpose() * areas;
  Eigen::VectorXd w = lq.matrixL().solve(c);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(nq, nq);
  Eigen::MatrixXd Z = qr.householderQ() * id.rightCols(nq - 1);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(Z.transpose() * W));
  return nq - 1 > nv ? 0.0 : svd.singularValues().minCoeff();
}

/// Relative errors of a coarse pair against the fine reference.
inline ErrorReport compute_errors(const Mesh& mesh, const CoefficientField& A,
                                  const Eigen::VectorXd& u_ref,
                                  const Eigen::VectorXd& p_ref,
                                  const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& p) {
  CellRegion whole = CellRegion::whole(mesh);
  SparseMat Mw = assemble_mass(mesh, A, whole);
  SparseMat B = assemble_div(mesh, whole);
  Eigen::VectorXd areas = region_cell_areas(whole);

  auto weighted = [&](const Eigen::VectorXd& v) {
    return std::sqrt(v.dot(Mw * v));
  };
  auto l2_cells = [&](const Eigen::VectorXd& q) {
    return std::sqrt(q.cwiseAbs2().dot(areas));
  };
  double nu = weighted(u_ref);
  double np = l2_cells(p_ref);
  Eigen::VectorXd div_ref = cellwise_divergence(B, areas, u_ref);
  double nd = l2_cells(div_ref);
  if (nu <= 0.0 || np <= 0.0 || nd <= 0.0)
    throw ConfigError("errors: reference solution has a zero norm");

  ErrorReport rep;
  rep.velocity = weighted(u - u_ref) / nu;
  rep.pressure = l2_cells(p - p_ref) / np;
  rep.divergence = l2_cells(cellwise_divergence(B, areas, u) - div_ref) / nd;
  return rep;
}

}  // namespace msgfem
