#pragma once

#include <Eigen/SparseCholesky>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "assembly.hpp"
#include "coefficient.hpp"
#include "core.hpp"
#include "decomposition.hpp"
#include "saddle.hpp"

namespace msgfem {

/// Interior boundary condition of the local particular problem: either a
/// natural zero-pressure condition (free interface fluxes) or a prescribed
/// constant compatible flux density on the interface.
enum class BcVariant { dirichlet_pressure, constant_flux };

inline BcVariant parse_bc_variant(const std::string& s) {
  if (s == "dirichlet_pressure") return BcVariant::dirichlet_pressure;
  if (s == "constant_flux") return BcVariant::constant_flux;
  throw ConfigError("unknown bc variant '" + s +
                    "' (expected dirichlet_pressure or constant_flux)");
}

inline const char* bc_variant_name(BcVariant v) {
  return v == BcVariant::dirichlet_pressure ? "dirichlet_pressure"
                                            : "constant_flux";
}

/// +1 if the global edge normal points out of the region, -1 otherwise.
inline double region_outward_sign(const Mesh& mesh, const CellRegion& region,
                                  int edge) {
  int ahead = mesh.edge_cells(edge)[1];
  return (ahead < 0 || region.local_cell(ahead) < 0) ? 1.0 : -1.0;
}

struct LocalParticular {
  Eigen::VectorXd u;       // fluxes on omega_i edges (region-local)
  Eigen::VectorXd u_star;  // fluxes on omega_i^* edges, before restriction
  Eigen::VectorXd p;       // pressure on omega_i^0 cells, mean zero
};

/// Local source-lifting solve on the oversampling region. `f` holds cell
/// values of the source on the whole mesh.
inline LocalParticular solve_particular(const Mesh& mesh,
                                        const CoefficientField& A,
                                        const Eigen::VectorXd& f,
                                        const Decomposition& d, int i,
                                        BcVariant variant, double gamma,
                                        double tol = 1e-10) {
  require(f.size() == mesh.n_cells(), "particular: f must hold all cell values");
  const CellRegion& star = d.omega_star[i];
  SparseMat M = assemble_mass(mesh, A, star);
  SparseMat B = assemble_div(mesh, star);
  Eigen::VectorXd areas = region_cell_areas(star);
  SparseMat Ag = assemble_augmented(M, B, areas, gamma);

  Eigen::VectorXd f_local(star.n_cells());
  for (int lc = 0; lc < star.n_cells(); ++lc) f_local[lc] = f[star.cells()[lc]];
  Eigen::VectorXd rhs_u = -gamma * (B.transpose() * f_local);
  Eigen::VectorXd rhs_p = -f_local.cwiseProduct(areas);

  const auto& domain = star.boundary_edges_domain();
  const auto& interface = star.boundary_edges_interface();
  std::vector<int> constrained;
  Eigen::VectorXd values;
  PressureGauge gauge;
  if (variant == BcVariant::dirichlet_pressure) {
    for (int e : domain) constrained.push_back(star.local_edge(e));
    values = Eigen::VectorXd::Zero(static_cast<int>(constrained.size()));
    // Free interface fluxes act as a natural zero-pressure condition and
    // make the system nonsingular; if the region has no interface (the
    // whole domain), fall back to the pure-Neumann mean-zero gauge.
    gauge = interface.empty() ? PressureGauge::mean_zero_lagrange
                              : PressureGauge::none;
  } else {
    for (int e : domain) constrained.push_back(star.local_edge(e));
    int n_domain = static_cast<int>(constrained.size());
    for (int e : interface) constrained.push_back(star.local_edge(e));
    values = Eigen::VectorXd::Zero(static_cast<int>(constrained.size()));
    if (!interface.empty()) {
      double interface_len = 0.0;
      for (int e : interface) interface_len += mesh.edge_length(e);
      // Outflux balances the source: integral of div u = -integral of f.
      double flux_density = -f_local.dot(areas) / interface_len;
      for (size_t k = 0; k < interface.size(); ++k)
        values[n_domain + static_cast<int>(k)] =
            flux_density * region_outward_sign(mesh, star, interface[k]);
    }
    gauge = PressureGauge::mean_zero_lagrange;
  }

  SaddleSolver solver(std::move(Ag), B, areas, constrained, gauge, tol);
  auto [u_star, p_star, report] = solver.solve(rhs_u, rhs_p, values);

  LocalParticular out;
  out.u_star = std::move(u_star);
  const CellRegion& omega = d.omega[i];
  out.u.resize(omega.n_edges());
  for (int le = 0; le < omega.n_edges(); ++le)
    out.u[le] = out.u_star[star.local_edge(omega.edges()[le])];
  const CellRegion& omega0 = d.omega0[i];
  out.p.resize(omega0.n_cells());
  double area_total = 0.0, mean = 0.0;
  for (int lc = 0; lc < omega0.n_cells(); ++lc) {
    int sc = star.local_cell(omega0.cells()[lc]);
    out.p[lc] = p_star[sc];
    mean += out.p[lc] * areas[sc];
    area_total += areas[sc];
  }
  out.p.array() -= mean / area_total;
  return out;
}

/// Basis of the discretely harmonic stream space on an oversampling region:
/// one column per free data node (interface nodes; for regions not touching
/// the domain boundary one interface node is pinned to quotient out the
/// constant streams). Domain-boundary nodes always carry zero. Columns hold
/// full region-local nodal vectors with the interior harmonically extended
/// in the 1/A-weighted form.
struct HarmonicStreamSpace {
  Eigen::MatrixXd basis;
  std::vector<int> data_nodes;  // global node id behind each column
  int dim() const { return static_cast<int>(basis.cols()); }
};

inline HarmonicStreamSpace build_harmonic_stream_space(const Mesh& mesh,
                                                       const CoefficientField& A,
                                                       const CellRegion& star) {
  RegionNodeSplit split = region_node_split(star);
  std::vector<int> data = split.interface;
  if (split.domain_boundary.empty() && !data.empty()) data.erase(data.begin());

  HarmonicStreamSpace out;
  out.data_nodes = std::move(data);
  const int dim = static_cast<int>(out.data_nodes.size());
  out.basis = Eigen::MatrixXd::Zero(star.n_nodes(), dim);
  if (dim == 0) return out;

  SparseMat S = assemble_stream_stiffness(mesh, A, star);
  std::vector<int> interior_index(star.n_nodes(), -1);
  for (size_t k = 0; k < split.interior.size(); ++k)
    interior_index[star.local_node(split.interior[k])] = static_cast<int>(k);
  const int ni = static_cast<int>(split.interior.size());

  Eigen::SimplicialLDLT<SparseMat> interior_solver;
  if (ni > 0) {
    std::vector<Triplet> trip;
    for (int k = 0; k < S.outerSize(); ++k)
      for (SparseMat::InnerIterator it(S, k); it; ++it) {
        int r = interior_index[it.row()], c = interior_index[it.col()];
        if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
      }
    SparseMat Sii(ni, ni);
    Sii.setFromTriplets(trip.begin(), trip.end());
    interior_solver.compute(Sii);
    require_numeric(interior_solver.info() == Eigen::Success,
                    "harmonic space: interior stiffness factorization failed");
  }

  for (int col = 0; col < dim; ++col) {
    int dl = star.local_node(out.data_nodes[col]);
    out.basis(dl, col) = 1.0;
    if (ni == 0) continue;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
    for (SparseMat::InnerIterator it(S, dl); it; ++it) {
      int r = interior_index[it.row()];
      if (r >= 0) rhs[r] = -it.value();
    }
    Eigen::VectorXd x = interior_solver.solve(rhs);
    for (int ln = 0; ln < star.n_nodes(); ++ln)
      if (interior_index[ln] >= 0) out.basis(ln, col) = x[interior_index[ln]];
  }
  return out;
}

struct LocalVelocityBasis {
  std::vector<Eigen::VectorXd> modes;       // on omega_i edges
  std::vector<Eigen::VectorXd> modes_star;  // on omega_i^* edges
  Eigen::VectorXd eigenvalues;              // ascending, may hold n_loc+1 entries
  Eigen::VectorXd n_widths;  // n_widths[n-1] = eigenvalues[n]^{-1/2}
  int n_loc = 0;
  int harmonic_dim = 0;
};

/// Spectral velocity basis of a subdomain: the two energy forms (over the
/// oversampling region and over the overlapped subdomain) are projected onto
/// the harmonic stream basis, the pencil is solved ascending, and the chosen
/// eigenvectors are mapped through the discrete curl. One extra eigenvalue
/// beyond n_loc is computed when available so the n-width of the selected
/// space can be reported.
inline LocalVelocityBasis solve_local_eigen(const Mesh& mesh,
                                            const CoefficientField& A,
                                            const Decomposition& d, int i,
                                            const HarmonicStreamSpace& hspace,
                                            int n_loc) {
  const CellRegion& star = d.omega_star[i];
  const CellRegion& omega = d.omega[i];
  const int dim = hspace.dim();
  require(n_loc >= 0, "eigen: n_loc must be nonnegative");
  require(n_loc <= dim,
          "eigen: n_loc = " + std::to_string(n_loc) +
              " exceeds the harmonic space dimension " + std::to_string(dim) +
              " of subdomain " + std::to_string(i));

  LocalVelocityBasis out;
  out.n_loc = n_loc;
  out.harmonic_dim = dim;
  if (n_loc == 0) return out;

  SparseMat S_star = assemble_stream_stiffness(mesh, A, star);
  SparseMat S_omega =
      assemble_stream_stiffness_cells(mesh, A, star, omega.cells());
  Eigen::MatrixXd K_big = hspace.basis.transpose() * (S_star * hspace.basis);
  Eigen::MatrixXd K_small = hspace.basis.transpose() * (S_omega * hspace.basis);

  int count = std::min(n_loc + 1, dim);
  auto pairs = solve_generalized_eig(K_big, K_small, count);

  out.eigenvalues.resize(count);
  for (int k = 0; k < count; ++k) out.eigenvalues[k] = pairs[k].lambda;
  out.n_widths.resize(count - 1);
  for (int n = 1; n < count; ++n)
    out.n_widths[n - 1] = 1.0 / std::sqrt(out.eigenvalues[n]);

  for (int k = 0; k < n_loc; ++k) {
    Eigen::VectorXd phi = hspace.basis * pairs[k].coeffs;
    Eigen::VectorXd u_star = curl_of_stream(mesh, phi, star);
    Eigen::VectorXd u(omega.n_edges());
    for (int le = 0; le < omega.n_edges(); ++le)
      u[le] = u_star[star.local_edge(omega.edges()[le])];
    out.modes_star.push_back(std::move(u_star));
    out.modes.push_back(std::move(u));
  }
  return out;
}

struct LocalPressureBasis {
  std::vector<Eigen::VectorXd> pressures;  // on omega_i^0 cells, mean zero,
                                           // unit L2 norm
};

struct LocalEnrichment {
  std::vector<Eigen::VectorXd> fields;  // on omega_i^0 edges, zero trace
  Eigen::VectorXd stability;            // ||u||_{H(div;a)} per unit pressure
};

/// Mixed solver on the interior subdomain with every boundary flux
/// prescribed; shared by pressure reconstruction and enrichment, which
/// differ only in boundary values and divergence data.
class InteriorCellSolver {
 public:
  InteriorCellSolver(const Mesh& mesh, const CoefficientField& A,
                     const CellRegion& omega0, double tol = 1e-10)
      : mesh_(&mesh), region_(&omega0) {
    mass_ = assemble_mass(mesh, A, omega0);
    div_ = assemble_div(mesh, omega0);
    areas_ = region_cell_areas(omega0);
    for (int e : omega0.boundary_edges_domain())
      boundary_.push_back(omega0.local_edge(e));
    for (int e : omega0.boundary_edges_interface())
      boundary_.push_back(omega0.local_edge(e));
    std::sort(boundary_.begin(), boundary_.end());
    solver_ = std::make_unique<SaddleSolver>(
        mass_, div_, areas_, boundary_, PressureGauge::mean_zero_lagrange, tol);
  }

  const std::vector<int>& boundary() const { return boundary_; }
  const Eigen::VectorXd& areas() const { return areas_; }
  const SparseMat& mass() const { return mass_; }
  const SparseMat& div() const { return div_; }
  const CellRegion& region() const { return *region_; }

  std::pair<Eigen::VectorXd, Eigen::VectorXd> solve(
      const Eigen::VectorXd& rhs_p, const Eigen::VectorXd& boundary_values) const {
    auto [u, p, rep] = solver_->solve(
        Eigen::VectorXd::Zero(region_->n_edges()), rhs_p, boundary_values);
    return {std::move(u), std::move(p)};
  }

 private:
  const Mesh* mesh_;
  const CellRegion* region_;
  SparseMat mass_, div_;
  Eigen::VectorXd areas_;
  std::vector<int> boundary_;
  std::unique_ptr<SaddleSolver> solver_;
};

/// Pressure partners of the velocity modes: solve the zero-divergence mixed
/// problem on the interior subdomain with the mode's normal trace prescribed;
/// the recovered velocity must reproduce the mode (checked), the pressure is
/// kept mean-zero and scaled to unit L2 norm.
inline LocalPressureBasis reconstruct_pressures(
    const InteriorCellSolver& solver, const Decomposition& d, int i,
    const LocalVelocityBasis& basis) {
  const CellRegion& omega = d.omega[i];
  const CellRegion& omega0 = d.omega0[i];
  LocalPressureBasis out;
  for (size_t k = 0; k < basis.modes.size(); ++k) {
    const Eigen::VectorXd& mode = basis.modes[k];
    Eigen::VectorXd values(solver.boundary().size());
    for (size_t b = 0; b < solver.boundary().size(); ++b) {
      int global_edge = omega0.edges()[solver.boundary()[b]];
      values[static_cast<int>(b)] = mode[omega.local_edge(global_edge)];
    }
    auto [u, p] =
        solver.solve(Eigen::VectorXd::Zero(omega0.n_cells()), values);

    double scale = std::max(1.0, mode.cwiseAbs().maxCoeff());
    double defect = 0.0;
    for (int le = 0; le < omega0.n_edges(); ++le) {
      int ge = omega0.edges()[le];
      defect = std::max(defect, std::abs(u[le] - mode[omega.local_edge(ge)]));
    }
    require_numeric(defect <= 1e-10 * scale,
                    "pressure reconstruction: recovered velocity deviates "
                    "from the mode by " + std::to_string(defect));

    double norm = std::sqrt(p.cwiseAbs2().dot(solver.areas()));
    require_numeric(norm > 1e-13,
                    "pressure reconstruction: degenerate (numerically zero) "
                    "pressure for mode " + std::to_string(k));
    p /= norm;
    out.pressures.push_back(std::move(p));
  }
  return out;
}

/// Inf-sup enrichment: for each pressure basis function solve the zero-flux
/// Neumann problem whose divergence datum is that pressure; the divergence
/// identity div u = p holds cell-wise exactly and is asserted.
inline LocalEnrichment build_enrichment(const InteriorCellSolver& solver,
                                        const LocalPressureBasis& pressures) {
  LocalEnrichment out;
  out.stability.resize(static_cast<int>(pressures.pressures.size()));
  Eigen::VectorXd zero_values =
      Eigen::VectorXd::Zero(static_cast<int>(solver.boundary().size()));
  for (size_t k = 0; k < pressures.pressures.size(); ++k) {
    const Eigen::VectorXd& pk = pressures.pressures[k];
    double mean = pk.dot(solver.areas());
    require(std::abs(mean) <= 1e-10 * solver.areas().sum(),
            "enrichment: divergence datum is not mean-zero (incompatible "
            "Neumann data)");
    Eigen::VectorXd rhs_p = pk.cwiseProduct(solver.areas());
    auto [u, p_aux] = solver.solve(rhs_p, zero_values);

    Eigen::VectorXd divergence =
        cellwise_divergence(solver.div(), solver.areas(), u);
    double defect = (divergence - pk).cwiseAbs().maxCoeff();
    require_numeric(defect <= 1e-10 * std::max(1.0, pk.cwiseAbs().maxCoeff()),
                    "enrichment: divergence identity violated by " +
                        std::to_string(defect));

    double energy = u.dot(solver.mass() * u) + pk.cwiseAbs2().dot(solver.areas());
    double pnorm = std::sqrt(pk.cwiseAbs2().dot(solver.areas()));
    out.stability[static_cast<int>(k)] = std::sqrt(energy) / pnorm;
    out.fields.push_back(std::move(u));
  }
  return out;
}

struct LocalOptions {
  int n_loc = 8;
  double gamma = 1.0;
  BcVariant bc_variant = BcVariant::dirichlet_pressure;
  double tol = 1e-10;
};

struct SubdomainBasis {
  LocalParticular particular;
  LocalVelocityBasis velocity;
  LocalPressureBasis pressure;
  LocalEnrichment enrichment;
  double wall_ms = 0.0;
};

/// Full per-subdomain pipeline: particular solve, harmonic stream space,
/// spectral modes, pressure partners, enrichment.
inline SubdomainBasis build_subdomain_basis(const Mesh& mesh,
                                            const CoefficientField& A,
                                            const Eigen::VectorXd& f,
                                            const Decomposition& d, int i,
                                            const LocalOptions& opts) {
  Stopwatch watch;
  SubdomainBasis out;
  out.particular =
      solve_particular(mesh, A, f, d, i, opts.bc_variant, opts.gamma, opts.tol);
  HarmonicStreamSpace hspace =
      build_harmonic_stream_space(mesh, A, d.omega_star[i]);
  out.velocity = solve_local_eigen(mesh, A, d, i, hspace, opts.n_loc);
  if (!out.velocity.modes.empty()) {
    InteriorCellSolver solver(mesh, A, d.omega0[i], opts.tol);
    out.pressure = reconstruct_pressures(solver, d, i, out.velocity);
    out.enrichment = build_enrichment(solver, out.pressure);
  }
  out.wall_ms = watch.elapsed_ms();
  return out;
}

/// Keep only the first `n_loc` modes of every subdomain basis (eigenpairs are
/// ordered, so a truncation is again an optimal basis). Lets a mode-count
/// sweep reuse one expensive eigensolve at the largest count.
inline std::vector<SubdomainBasis> truncate_local_bases(
    const std::vector<SubdomainBasis>& bases, int n_loc) {
  std::vector<SubdomainBasis> out;
  out.reserve(bases.size());
  for (const auto& b : bases) {
    require(n_loc <= static_cast<int>(b.velocity.modes.size()),
            "truncate: requested more modes than were built");
    SubdomainBasis t;
    t.particular = b.particular;
    t.velocity.modes.assign(b.velocity.modes.begin(),
                            b.velocity.modes.begin() + n_loc);
    t.velocity.modes_star.assign(b.velocity.modes_star.begin(),
                                 b.velocity.modes_star.begin() + n_loc);
    int keep = std::min<int>(n_loc + 1, static_cast<int>(b.velocity.eigenvalues.size()));
    t.velocity.eigenvalues = b.velocity.eigenvalues.head(keep);
    t.velocity.n_widths = b.velocity.n_widths.head(n_loc);
    t.velocity.n_loc = n_loc;
    t.velocity.harmonic_dim = b.velocity.harmonic_dim;
    t.pressure.pressures.assign(b.pressure.pressures.begin(),
                                b.pressure.pressures.begin() + n_loc);
    t.enrichment.fields.assign(b.enrichment.fields.begin(),
                               b.enrichment.fields.begin() + n_loc);
    t.enrichment.stability = b.enrichment.stability.head(n_loc);
    t.wall_ms = b.wall_ms;
    out.push_back(std::move(t));
  }
  return out;
}

/// Build every subdomain's basis; the per-subdomain tasks are independent
/// and run on the shared thread pool.
inline std::vector<SubdomainBasis> build_all_local_bases(
    const Mesh& mesh, const CoefficientField& A, const Eigen::VectorXd& f,
    const Decomposition& d, const LocalOptions& opts) {
  std::vector<SubdomainBasis> out(d.n_subdomains());
  parallel_for(d.n_subdomains(), [&](int i) {
    out[i] = build_subdomain_basis(mesh, A, f, d, i, opts);
  });
  return out;
}

}  // namespace msgfem
