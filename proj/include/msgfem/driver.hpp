#pragma once

/// Experiment driver: run configuration, the single-run pipeline
/// (fine reference, local bases, coarse solve, error report), parameter
/// sweeps with work reuse, the enrichment ablation, and CSV/plot output.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "msgfem/benchmark.hpp"
#include "msgfem/coarse_space.hpp"
#include "msgfem/raster_io.hpp"

namespace msgfem {

/// Full description of one experiment. Every field has a config-file key and
/// a CLI flag of the same name, and results.csv echoes all of them per row.
struct RunConfig {
  int n = 32;             ///< fine cells per side (the mesh is n x n)
  int m = 4;              ///< coarse blocks per side; m must divide n
  int overlap_layers = 2; ///< fine layers glued onto each block
  int ell = 3;            ///< extra oversampling layers for the eigenproblems
  int n_loc = 4;          ///< spectral modes per subdomain (0 = none)
  std::string gamma = "1";  ///< augmentation weight: a number >= 0, or
                            ///< "auto" for 1/alpha1
  std::string bc_variant = "dirichlet_pressure";  ///< local solve variant
  std::string coefficient = "uniform";  ///< uniform | file:PATH |
                                        ///< gen:PATTERN:CONTRAST
  std::string source = "example1";      ///< example1 | wells | file:PATH
  bool with_enrichment = true;  ///< include divergence enrichment fields
  bool with_coarse_rt = true;   ///< include coarse Raviart-Thomas fields
  double tol = 1e-8;            ///< relative residual accepted by the solvers
  std::string output_dir = "."; ///< where results.csv and plot scripts land
  int seed = 1;                 ///< seed for gen: coefficient fields
};

/// Outcome of one run: the config echo, resolved gamma, problem sizes,
/// relative errors against the fine reference, the optional inf-sup
/// estimate, and wall-clock per phase. `solve_status` stays "ok" unless the
/// coarse solve failed and the caller asked for failures to be reported
/// instead of thrown (the enrichment ablation does).
struct RunResult {
  RunConfig config;
  double gamma_value = 0.0;
  int dofs_fine = 0;
  int dofs_coarse = 0;
  ErrorReport errors{};
  double beta_estimate = std::numeric_limits<double>::quiet_NaN();
  std::string solve_status = "ok";
  double fine_ms = 0.0;
  double local_ms = 0.0;
  double coarse_ms = 0.0;
};

namespace detail {

class PhaseTimer {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

/// Re-throws module errors with the pipeline phase prepended, preserving the
/// error type so the CLI can still map it to the right exit code.
template <typename Fn>
auto with_phase(const char* phase, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("[") + phase + "] " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("[") + phase + "] " + e.what());
  }
}

inline std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline int parse_int_value(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(text, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  require(pos == text.size() && !text.empty(),
          "config: key '" + key + "' expects an integer, got '" + text + "'");
  return value;
}

inline double parse_real_value(const std::string& key,
                               const std::string& text) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  require(pos == text.size() && !text.empty(),
          "config: key '" + key + "' expects a number, got '" + text + "'");
  return value;
}

inline bool parse_bool_value(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on")
    return true;
  if (text == "false" || text == "0" || text == "no" || text == "off")
    return false;
  throw ConfigError("config: key '" + key + "' expects true/false, got '" +
                    text + "'");
}

/// Round-trip formatting for reals in CSV output.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_ms(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

/// Keeps failure notes CSV-safe: one line, no field separators.
inline std::string sanitize_csv_field(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace detail

/// Checks the config-level invariants; deeper geometric checks (block size
/// versus overlap width, eigenmode counts versus subdomain size) live in the
/// modules that own them and surface with a phase label.
inline void validate_config(const RunConfig& c) {
  require(c.n >= 1, "config: n must be positive");
  require(c.m >= 1, "config: m must be at least 1");
  require(c.n % c.m == 0, "config: m = " + std::to_string(c.m) +
                              " must divide n = " + std::to_string(c.n));
  require(c.overlap_layers >= 1, "config: overlap_layers must be at least 1");
  require(c.ell >= 1, "config: ell must be at least 1");
  require(c.n_loc >= 0, "config: n_loc must be nonnegative");
  require(c.tol > 0.0, "config: tol must be positive");
  require(c.seed >= 0, "config: seed must be nonnegative");
  parse_bc_variant(c.bc_variant);
  if (c.gamma != "auto")
    require(detail::parse_real_value("gamma", c.gamma) >= 0.0,
            "config: gamma must be nonnegative (or 'auto')");
  if (c.coefficient != "uniform" && !c.coefficient.starts_with("file:")) {
    require(c.coefficient.starts_with("gen:"),
            "config: coefficient must be uniform, file:PATH, or "
            "gen:PATTERN:CONTRAST, got '" + c.coefficient + "'");
    std::string rest = c.coefficient.substr(4);
    auto colon = rest.find(':');
    require(colon != std::string::npos,
            "config: generator spec needs gen:PATTERN:CONTRAST, got '" +
                c.coefficient + "'");
    parse_raster_pattern(rest.substr(0, colon));
    detail::parse_real_value("coefficient contrast", rest.substr(colon + 1));
  }
  require(c.source == "example1" || c.source == "wells" ||
              c.source.starts_with("file:"),
          "config: source must be example1, wells, or file:PATH, got '" +
              c.source + "'");
}

/// Applies one key=value entry onto a config; unknown keys are rejected so
/// typos in config files fail loudly.
inline void apply_config_entry(RunConfig& c, const std::string& key,
                               const std::string& value) {
  using detail::parse_bool_value;
  using detail::parse_int_value;
  using detail::parse_real_value;
  if (key == "n")
    c.n = parse_int_value(key, value);
  else if (key == "m")
    c.m = parse_int_value(key, value);
  else if (key == "overlap_layers")
    c.overlap_layers = parse_int_value(key, value);
  else if (key == "ell")
    c.ell = parse_int_value(key, value);
  else if (key == "n_loc")
    c.n_loc = parse_int_value(key, value);
  else if (key == "gamma")
    c.gamma = value;
  else if (key == "bc_variant")
    c.bc_variant = value;
  else if (key == "coefficient")
    c.coefficient = value;
  else if (key == "source")
    c.source = value;
  else if (key == "with_enrichment")
    c.with_enrichment = parse_bool_value(key, value);
  else if (key == "with_coarse_rt")
    c.with_coarse_rt = parse_bool_value(key, value);
  else if (key == "tol")
    c.tol = parse_real_value(key, value);
  else if (key == "output_dir")
    c.output_dir = value;
  else if (key == "seed")
    c.seed = parse_int_value(key, value);
  else
    throw ConfigError("config: unknown key '" + key + "'");
}

/// Reads a flat key=value config file ('#' starts a comment line) on top of
/// `base`, so CLI flags given before --config act as defaults and flags
/// given after it win.
inline RunConfig load_config_file(const std::string& path,
                                  RunConfig base = RunConfig()) {
  std::ifstream in(path);
  require(in.good(), "config: cannot open '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string entry = detail::trim(line);
    if (entry.empty() || entry[0] == '#') continue;
    auto eq = entry.find('=');
    require(eq != std::string::npos,
            "config: " + path + ":" + std::to_string(lineno) +
                " is not a key=value line: '" + entry + "'");
    std::string key = detail::trim(entry.substr(0, eq));
    std::string value = detail::trim(entry.substr(eq + 1));
    require(!key.empty(), "config: " + path + ":" + std::to_string(lineno) +
                              " has an empty key");
    try {
      apply_config_entry(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

/// Builds the cell-wise coefficient from its spec string.
inline CoefficientField make_coefficient(const Mesh& mesh,
                                         const std::string& spec, int seed) {
  if (spec == "uniform") return CoefficientField::uniform(mesh);
  if (spec.starts_with("file:")) {
    std::string path = spec.substr(5);
    require(!path.empty(), "coefficient: file: spec has an empty path");
    return coefficient_from_raster(mesh, load_raster(path));
  }
  if (spec.starts_with("gen:")) {
    std::string rest = spec.substr(4);
    auto colon = rest.find(':');
    require(colon != std::string::npos,
            "coefficient: generator spec needs gen:PATTERN:CONTRAST, got '" +
                spec + "'");
    RasterPattern pattern = parse_raster_pattern(rest.substr(0, colon));
    double contrast =
        detail::parse_real_value("coefficient contrast", rest.substr(colon + 1));
    RasterField field = generate_highcontrast(
        mesh.nx(), mesh.ny(), pattern, contrast, static_cast<uint64_t>(seed));
    return coefficient_from_raster(mesh, field);
  }
  throw ConfigError("coefficient: unknown spec '" + spec +
                    "' (use uniform | file:PATH | gen:PATTERN:CONTRAST)");
}

/// Builds the cell-wise source from its spec string. `example1` is the
/// smooth benchmark source, `wells` puts a balanced injector/producer pair
/// in opposite corner cells, `file:` reads cell values from a raster.
inline Eigen::VectorXd make_source(const Mesh& mesh, const std::string& spec) {
  if (spec == "example1") return benchmark::smooth_source_cells(mesh);
  if (spec == "wells") {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.n_cells());
    double area = mesh.hx() * mesh.hy();
    f[mesh.cell_id(0, 0)] = 1.0 / area;
    f[mesh.cell_id(mesh.nx() - 1, mesh.ny() - 1)] = -1.0 / area;
    return f;
  }
  if (spec.starts_with("file:")) {
    std::string path = spec.substr(5);
    require(!path.empty(), "source: file: spec has an empty path");
    return raster_to_cells(mesh, load_raster(path, false));
  }
  throw ConfigError("source: unknown spec '" + spec +
                    "' (use example1 | wells | file:PATH)");
}

/// Resolves the gamma spec against the coefficient: "auto" scales the
/// divergence penalty by the inverse of the largest coefficient value.
inline double resolve_gamma(const std::string& spec,
                            const CoefficientField& A) {
  if (spec == "auto") return 1.0 / A.alpha1();
  return detail::parse_real_value("gamma", spec);
}

/// Everything that depends only on (n, coefficient, source, gamma): the mesh,
/// the data fields, and the fine reference solution. Sweeps over n_loc and
/// ell share one of these.
struct FineContext {
  RunConfig config;
  Mesh mesh;
  CoefficientField A;
  Eigen::VectorXd f;
  double gamma = 0.0;
  Eigen::VectorXd u, p;  ///< empty when built with solve = false
  double residual_rel = 0.0;
  double wall_ms = 0.0;
};

namespace detail {

/// Fine reference: the augmented mixed system on the whole mesh with zero
/// normal flux and mean-zero pressure.
inline std::tuple<Eigen::VectorXd, Eigen::VectorXd, double> solve_fine(
    const Mesh& mesh, const CoefficientField& A, const Eigen::VectorXd& f,
    double gamma, double tol) {
  CellRegion whole = CellRegion::whole(mesh);
  SparseMat M = assemble_mass(mesh, A, whole);
  SparseMat B = assemble_div(mesh, whole);
  Eigen::VectorXd areas = region_cell_areas(whole);
  SparseMat Ag = assemble_augmented(M, B, areas, gamma);
  SaddleSolver solver(Ag, B, areas, mesh.boundary_edges(),
                      PressureGauge::mean_zero_lagrange, tol);
  auto [u, p, report] = solver.solve(
      -gamma * (B.transpose() * f), -f.cwiseProduct(areas),
      Eigen::VectorXd::Zero(static_cast<int>(mesh.boundary_edges().size())));
  return {std::move(u), std::move(p), report.residual_rel};
}

/// Absolute energy/L2 norms of a coarse pair, used in place of relative
/// errors when the fine reference is exactly zero (zero-source runs).
inline ErrorReport absolute_errors(const Mesh& mesh, const CoefficientField& A,
                                   const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& p) {
  CellRegion whole = CellRegion::whole(mesh);
  SparseMat M = assemble_mass(mesh, A, whole);
  SparseMat B = assemble_div(mesh, whole);
  Eigen::VectorXd areas = region_cell_areas(whole);
  Eigen::VectorXd div = (B * u).cwiseQuotient(areas);
  ErrorReport r;
  r.velocity = std::sqrt(u.dot(M * u));
  r.pressure = std::sqrt(p.cwiseAbs2().dot(areas));
  r.divergence = std::sqrt(div.cwiseAbs2().dot(areas));
  return r;
}

}  // namespace detail

/// Validates the config and runs everything up to (optionally) the fine
/// reference solve.
inline FineContext build_fine_context(const RunConfig& c, bool solve = true) {
  detail::with_phase("config", [&] { validate_config(c); });
  Mesh mesh(c.n, c.n);
  CoefficientField A = detail::with_phase(
      "coefficient", [&] { return make_coefficient(mesh, c.coefficient, c.seed); });
  Eigen::VectorXd f =
      detail::with_phase("source", [&] { return make_source(mesh, c.source); });
  double gamma = resolve_gamma(c.gamma, A);
  FineContext fc{c,     std::move(mesh), std::move(A), std::move(f),
                 gamma, {},              {},           0.0};
  if (solve) {
    detail::PhaseTimer timer;
    std::tie(fc.u, fc.p, fc.residual_rel) = detail::with_phase("fine solve", [&] {
      return detail::solve_fine(fc.mesh, fc.A, fc.f, fc.gamma, c.tol);
    });
    fc.wall_ms = timer.ms();
  }
  return fc;
}

/// The decomposition and local bases for one (m, overlap, ell, n_loc)
/// choice. Holds views into the FineContext mesh, which must outlive it.
struct LocalContext {
  Decomposition decomp;
  std::vector<SubdomainBasis> locals;
  int n_loc_built = 0;
  double wall_ms = 0.0;
};

inline LocalContext build_local_context(const FineContext& fc, int ell,
                                        int n_loc) {
  LocalContext lc;
  detail::PhaseTimer timer;
  lc.decomp = detail::with_phase("decomposition", [&] {
    return build_decomposition(fc.mesh, fc.config.m, ell,
                               fc.config.overlap_layers);
  });
  LocalOptions opts;
  opts.n_loc = n_loc;
  opts.gamma = fc.gamma;
  opts.bc_variant = parse_bc_variant(fc.config.bc_variant);
  opts.tol = fc.config.tol;
  lc.locals = detail::with_phase("local bases", [&] {
    return build_all_local_bases(fc.mesh, fc.A, fc.f, lc.decomp, opts);
  });
  lc.n_loc_built = n_loc;
  lc.wall_ms = timer.ms();
  return lc;
}

/// Coarse assembly, Galerkin solve, and error report for one row. `row`
/// carries the per-row config echo (its n_loc may be below the built count;
/// the stored bases are then truncated, which matches a fresh build
/// exactly). With `tolerate_solve_failure`, a numerically failed coarse
/// solve becomes a reported row (infinite errors, failure note in
/// solve_status) instead of an exception; the inf-sup estimate is a property
/// of the spaces and is still computed.
inline RunResult finish_run(const FineContext& fc, const LocalContext& lc,
                            const RunConfig& row, bool with_beta = false,
                            bool tolerate_solve_failure = false) {
  RunResult r;
  r.config = row;
  r.gamma_value = fc.gamma;
  r.dofs_fine = fc.mesh.n_edges() + fc.mesh.n_cells();
  r.fine_ms = fc.wall_ms;
  r.local_ms = lc.wall_ms;

  const std::vector<SubdomainBasis>* locals = &lc.locals;
  std::vector<SubdomainBasis> truncated;
  if (row.n_loc != lc.n_loc_built) {
    truncated = detail::with_phase(
        "local bases", [&] { return truncate_local_bases(lc.locals, row.n_loc); });
    locals = &truncated;
  }

  detail::PhaseTimer timer;
  CoarseSpaces spaces = detail::with_phase("coarse assembly", [&] {
    return assemble_coarse_spaces(fc.mesh, fc.A, lc.decomp, *locals,
                                  row.with_enrichment, row.with_coarse_rt);
  });
  r.dofs_coarse = spaces.n_velocity() + spaces.n_pressure();
  try {
    GfemSolution sol = detail::with_phase("coarse solve", [&] {
      return solve_gfem(fc.mesh, fc.A, fc.f, fc.gamma, spaces, row.tol);
    });
    r.coarse_ms = timer.ms();
    r.errors = detail::with_phase("error evaluation", [&] {
      if (fc.u.norm() == 0.0 && fc.p.norm() == 0.0)
        return detail::absolute_errors(fc.mesh, fc.A, sol.u, sol.p);
      return compute_errors(fc.mesh, fc.A, fc.u, fc.p, sol.u, sol.p);
    });
  } catch (const NumericalError& e) {
    if (!tolerate_solve_failure) throw;
    r.coarse_ms = timer.ms();
    double inf = std::numeric_limits<double>::infinity();
    r.errors = {inf, inf, inf};
    r.solve_status = detail::sanitize_csv_field(e.what());
  }
  if (with_beta)
    r.beta_estimate = detail::with_phase(
        "inf-sup estimate", [&] { return estimate_infsup(fc.mesh, fc.A, spaces); });
  return r;
}

/// One full experiment: fine solve, local bases, coarse solve, errors.
inline RunResult run_single(const RunConfig& c, bool with_beta = false) {
  FineContext fc = build_fine_context(c);
  LocalContext lc = build_local_context(fc, c.ell, c.n_loc);
  return finish_run(fc, lc, c, with_beta);
}

/// Sweeps one axis, reusing work that the axis cannot touch: n_loc sweeps
/// share the fine solve and one local build at the largest value (smaller
/// rows truncate, which matches fresh builds exactly); ell sweeps share the
/// fine solve; gamma changes every phase, so those rows rebuild everything.
inline std::vector<RunResult> cmd_sweep(const RunConfig& base,
                                        const std::string& axis,
                                        const std::vector<double>& values,
                                        bool with_beta = false) {
  require(!values.empty(), "sweep: no values given");
  auto as_int = [&](double v, int at_least, const char* what) {
    require(v == std::floor(v) && v >= at_least,
            std::string("sweep: ") + what + " values must be integers >= " +
                std::to_string(at_least));
    return static_cast<int>(v);
  };

  std::vector<RunResult> rows;
  rows.reserve(values.size());
  if (axis == "n_loc") {
    int n_max = 0;
    for (double v : values) n_max = std::max(n_max, as_int(v, 0, "n_loc"));
    RunConfig built = base;
    built.n_loc = n_max;
    FineContext fc = build_fine_context(built);
    LocalContext lc = build_local_context(fc, built.ell, n_max);
    for (double v : values) {
      RunConfig row = base;
      row.n_loc = as_int(v, 0, "n_loc");
      rows.push_back(finish_run(fc, lc, row, with_beta));
    }
  } else if (axis == "ell") {
    FineContext fc = build_fine_context(base);
    for (double v : values) {
      RunConfig row = base;
      row.ell = as_int(v, 1, "ell");
      detail::with_phase("config", [&] { validate_config(row); });
      LocalContext lc = build_local_context(fc, row.ell, row.n_loc);
      rows.push_back(finish_run(fc, lc, row, with_beta));
    }
  } else if (axis == "gamma") {
    for (double v : values) {
      require(v >= 0.0, "sweep: gamma values must be nonnegative");
      RunConfig row = base;
      row.gamma = detail::format_real(v);
      rows.push_back(run_single(row, with_beta));
    }
  } else {
    throw ConfigError("sweep: unknown axis '" + axis +
                      "' (use n_loc | ell | gamma)");
  }
  return rows;
}

/// Runs the same config with and without the enrichment fields, reporting
/// the inf-sup estimate for both rows. The no-enrichment coarse solve is
/// allowed to fail numerically; that outcome is a result, not a crash.
inline std::pair<RunResult, RunResult> cmd_ablate(const RunConfig& base) {
  RunConfig with = base;
  with.with_enrichment = true;
  FineContext fc = build_fine_context(with);
  LocalContext lc = build_local_context(fc, with.ell, with.n_loc);
  RunResult row_with = finish_run(fc, lc, with, true);
  RunConfig without = base;
  without.with_enrichment = false;
  RunResult row_without = finish_run(fc, lc, without, true, true);
  return {std::move(row_with), std::move(row_without)};
}

/// The stable results.csv schema: full config echo, then sizes, errors, the
/// optional inf-sup estimate, the solve status, and the wall-clock columns
/// last (they are the only nondeterministic fields).
inline std::string results_csv_header() {
  return "n,m,overlap_layers,ell,n_loc,gamma,bc_variant,coefficient,source,"
         "with_enrichment,with_coarse_rt,tol,seed,dofs_fine,dofs_coarse,"
         "error_v,error_p,error_div,beta_estimate,solve_status,"
         "fine_ms,local_ms,coarse_ms";
}

inline void write_results_csv(std::ostream& out,
                              const std::vector<RunResult>& rows) {
  using detail::format_ms;
  using detail::format_real;
  out << results_csv_header() << "\n";
  for (const RunResult& r : rows) {
    const RunConfig& c = r.config;
    out << c.n << ',' << c.m << ',' << c.overlap_layers << ',' << c.ell << ','
        << c.n_loc << ',' << format_real(r.gamma_value) << ',' << c.bc_variant
        << ',' << detail::sanitize_csv_field(c.coefficient) << ','
        << detail::sanitize_csv_field(c.source) << ','
        << (c.with_enrichment ? "true" : "false") << ','
        << (c.with_coarse_rt ? "true" : "false") << ',' << format_real(c.tol)
        << ',' << c.seed << ',' << r.dofs_fine << ',' << r.dofs_coarse << ','
        << format_real(r.errors.velocity) << ','
        << format_real(r.errors.pressure) << ','
        << format_real(r.errors.divergence) << ','
        << (std::isnan(r.beta_estimate) ? std::string()
                                        : format_real(r.beta_estimate))
        << ',' << r.solve_status << ',' << format_ms(r.fine_ms) << ','
        << format_ms(r.local_ms) << ',' << format_ms(r.coarse_ms) << "\n";
  }
}

inline void write_results_csv(const std::string& path,
                              const std::vector<RunResult>& rows) {
  std::ofstream out(path);
  require(out.good(), "results: cannot write '" + path + "'");
  write_results_csv(out, rows);
}

/// 1-based column index of a results.csv field, for plot scripts.
inline int csv_column_index(const std::string& name) {
  std::stringstream header(results_csv_header());
  std::string field;
  int index = 0;
  while (std::getline(header, field, ',')) {
    ++index;
    if (field == name) return index;
  }
  throw ConfigError("results: no column named '" + name + "'");
}

/// Companion gnuplot script: log2 of the relative errors against the swept
/// axis, reading the CSV by column index.
inline void write_plot_script(const std::string& path,
                              const std::string& csv_name,
                              const std::string& axis) {
  int ax = csv_column_index(axis);
  int cv = csv_column_index("error_v");
  int cp = csv_column_index("error_p");
  int cd = csv_column_index("error_div");
  std::ofstream out(path);
  require(out.good(), "plot: cannot write '" + path + "'");
  out << "# Error decay against " << axis << ". Render from the directory\n"
      << "# containing " << csv_name << " with: gnuplot -persist <script>\n"
      << "set datafile separator ','\n"
      << "set grid\n"
      << "set key left bottom\n"
      << "set xlabel '" << axis << "'\n"
      << "set ylabel 'log2(relative error)'\n";
  if (axis == "gamma") out << "set logscale x 10\n";
  out << "plot '" << csv_name << "' every ::1 using " << ax << ":(log(column("
      << cv << "))/log(2)) with linespoints title 'velocity', \\\n"
      << "     '' every ::1 using " << ax << ":(log(column(" << cp
      << "))/log(2)) with linespoints title 'pressure', \\\n"
      << "     '' every ::1 using " << ax << ":(log(column(" << cd
      << "))/log(2)) with linespoints title 'divergence'\n";
}

/// Per-subdomain eigenvalue dump: one row per computed eigenvalue, with the
/// derived width d_k = lambda_{k+1}^{-1/2} where available.
inline void write_eigenvalue_dump(const std::string& path,
                                  const LocalContext& lc) {
  std::ofstream out(path);
  require(out.good(), "dump: cannot write '" + path + "'");
  out << "subdomain,k,lambda,n_width\n";
  for (std::size_t i = 0; i < lc.locals.size(); ++i) {
    const LocalVelocityBasis& basis = lc.locals[i].velocity;
    for (int k = 0; k < basis.eigenvalues.size(); ++k) {
      out << i << ',' << k << ',' << detail::format_real(basis.eigenvalues[k])
          << ',';
      if (k >= 1 && k - 1 < basis.n_widths.size())
        out << detail::format_real(basis.n_widths[k - 1]);
      out << "\n";
    }
  }
}

}  // namespace msgfem
