/// Command-line driver for the mixed multiscale solver. Subcommands:
///
///   fine       solve the fine reference problem and report its size/timing
///   run        one full multiscale run, written to results.csv
///   sweep      vary n_loc, ell, or gamma; emits results.csv + a plot script
///   ablate     the same run with and without enrichment, side by side
///   infsup     assemble the coarse spaces and report the inf-sup estimate
///   gen-field  write a synthetic high-contrast coefficient raster
///
/// Flags mirror the config-file keys; --config loads a key=value file first
/// and explicit flags override it. Exit codes: 0 success, 2 config error,
/// 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "msgfem/driver.hpp"

namespace {

using namespace msgfem;

std::string short_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// The shared config surface: one string-valued flag per config key, parsed
/// through the same code path as config files so errors read the same.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "key=value config file, applied before other flags");
    static const std::vector<std::pair<const char*, const char*>> keys = {
        {"n", "fine cells per side"},
        {"m", "coarse blocks per side (must divide n)"},
        {"overlap_layers", "fine layers glued onto each block"},
        {"ell", "extra oversampling layers"},
        {"n_loc", "spectral modes per subdomain"},
        {"gamma", "augmentation weight (number or 'auto')"},
        {"bc_variant", "local solve variant"},
        {"coefficient", "uniform | file:PATH | gen:PATTERN:CONTRAST"},
        {"source", "example1 | wells | file:PATH"},
        {"with_enrichment", "true/false"},
        {"with_coarse_rt", "true/false"},
        {"tol", "relative residual tolerance"},
        {"output_dir", "directory for results.csv and plots"},
        {"seed", "seed for generated coefficients"},
    };
    for (const auto& [key, help] : keys)
      options[key] = cmd->add_option("--" + std::string(key), values[key], help);
  }

  RunConfig build() const {
    RunConfig c;
    if (!config_path.empty()) c = load_config_file(config_path);
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) apply_config_entry(c, key, values.at(key));
    return c;
  }
};

std::string prepare_output_dir(const RunConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.output_dir, ec);
  require(!ec, "output: cannot create directory '" + c.output_dir + "': " +
                   ec.message());
  return c.output_dir;
}

void print_row(const RunResult& r) {
  std::cout << "n=" << r.config.n << " m=" << r.config.m
            << " ell=" << r.config.ell << " n_loc=" << r.config.n_loc
            << " gamma=" << short_real(r.gamma_value)
            << " enrichment=" << (r.config.with_enrichment ? "on" : "off")
            << "\n  dofs: fine=" << r.dofs_fine << " coarse=" << r.dofs_coarse
            << "\n  errors: v=" << short_real(r.errors.velocity)
            << " p=" << short_real(r.errors.pressure)
            << " div=" << short_real(r.errors.divergence);
  if (!std::isnan(r.beta_estimate))
    std::cout << "\n  inf-sup estimate: " << short_real(r.beta_estimate);
  if (r.solve_status != "ok") std::cout << "\n  status: " << r.solve_status;
  std::cout << "\n  wall ms: fine=" << short_real(r.fine_ms)
            << " local=" << short_real(r.local_ms)
            << " coarse=" << short_real(r.coarse_ms) << "\n";
}

int cmd_fine(const ConfigFlags& flags) {
  RunConfig c = flags.build();
  FineContext fc = build_fine_context(c);
  std::cout << "n=" << c.n << " gamma=" << short_real(fc.gamma)
            << " dofs_fine=" << fc.mesh.n_edges() + fc.mesh.n_cells()
            << "\nresidual_rel=" << short_real(fc.residual_rel)
            << "\nfine_ms=" << short_real(fc.wall_ms) << "\n";
  if (c.coefficient == "uniform" && c.source == "example1") {
    double err = benchmark::l2_error_vs_exact_velocity(fc.mesh, fc.u) /
                 benchmark::exact_velocity_norm();
    std::cout << "error_v_vs_closed_form=" << short_real(err) << "\n";
  }
  return 0;
}

int cmd_run_cli(const ConfigFlags& flags, bool with_beta, bool dump_eigs) {
  RunConfig c = flags.build();
  FineContext fc = build_fine_context(c);
  LocalContext lc = build_local_context(fc, c.ell, c.n_loc);
  RunResult r = finish_run(fc, lc, c, with_beta);
  std::string dir = prepare_output_dir(c);
  write_results_csv(dir + "/results.csv", {r});
  if (dump_eigs) write_eigenvalue_dump(dir + "/eigenvalues.csv", lc);
  print_row(r);
  std::cout << "wrote " << dir << "/results.csv\n";
  return 0;
}

int cmd_sweep_cli(const ConfigFlags& flags, const std::string& axis,
                  const std::string& values_text, bool with_beta) {
  std::vector<double> values;
  std::stringstream stream(values_text);
  std::string item;
  while (std::getline(stream, item, ','))
    values.push_back(detail::parse_real_value("values", detail::trim(item)));
  RunConfig c = flags.build();
  std::vector<RunResult> rows = cmd_sweep(c, axis, values, with_beta);
  std::string dir = prepare_output_dir(c);
  write_results_csv(dir + "/results.csv", rows);
  std::string plot = dir + "/plot_" + axis + ".gp";
  write_plot_script(plot, "results.csv", axis);
  for (const RunResult& r : rows) print_row(r);
  std::cout << "wrote " << dir << "/results.csv and " << plot << "\n";
  return 0;
}

int cmd_ablate_cli(const ConfigFlags& flags) {
  RunConfig c = flags.build();
  auto [row_with, row_without] = cmd_ablate(c);
  std::string dir = prepare_output_dir(c);
  write_results_csv(dir + "/results.csv", {row_with, row_without});
  std::cout << "-- with enrichment --\n";
  print_row(row_with);
  std::cout << "-- without enrichment --\n";
  print_row(row_without);
  std::cout << "velocity error ratio (without/with) = "
            << short_real(row_without.errors.velocity /
                          row_with.errors.velocity)
            << "\ninf-sup ratio (with/without) = "
            << short_real(row_with.beta_estimate / row_without.beta_estimate)
            << "\nwrote " << dir << "/results.csv\n";
  return 0;
}

int cmd_infsup_cli(const ConfigFlags& flags) {
  RunConfig c = flags.build();
  FineContext fc = build_fine_context(c, false);
  LocalContext lc = build_local_context(fc, c.ell, c.n_loc);
  CoarseSpaces spaces = detail::with_phase("coarse assembly", [&] {
    return assemble_coarse_spaces(fc.mesh, fc.A, lc.decomp, lc.locals,
                                  c.with_enrichment, c.with_coarse_rt);
  });
  double beta = detail::with_phase(
      "inf-sup estimate", [&] { return estimate_infsup(fc.mesh, fc.A, spaces); });
  std::cout << "dofs_coarse=" << spaces.n_velocity() + spaces.n_pressure()
            << " (velocity=" << spaces.n_velocity()
            << ", pressure=" << spaces.n_pressure() << ")\n"
            << "beta=" << short_real(beta) << "\n";
  return 0;
}

int cmd_gen_field(int nx, int ny, const std::string& pattern, double contrast,
                  int seed, const std::string& out) {
  require(seed >= 0, "gen-field: seed must be nonnegative");
  RasterField field = generate_highcontrast(nx, ny, parse_raster_pattern(pattern),
                                            contrast, static_cast<uint64_t>(seed));
  save_raster(out, field);
  std::cout << "wrote " << out << " (" << nx << "x" << ny
            << ", contrast=" << short_real(field.max() / field.min()) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed multiscale finite element driver"};
  app.require_subcommand(1);

  ConfigFlags fine_flags;
  CLI::App* fine = app.add_subcommand("fine", "solve the fine reference only");
  fine_flags.attach(fine);

  ConfigFlags run_flags;
  bool run_beta = false, run_dump = false;
  CLI::App* run = app.add_subcommand("run", "one full multiscale run");
  run_flags.attach(run);
  run->add_flag("--beta", run_beta, "also report the inf-sup estimate");
  run->add_flag("--dump-eigenvalues", run_dump,
                "write per-subdomain eigenvalues.csv");

  ConfigFlags sweep_flags;
  std::string sweep_axis, sweep_values;
  bool sweep_beta = false;
  CLI::App* sweep = app.add_subcommand("sweep", "vary one axis");
  sweep_flags.attach(sweep);
  sweep->add_option("--axis", sweep_axis, "n_loc | ell | gamma")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required();
  sweep->add_flag("--beta", sweep_beta, "also report inf-sup estimates");

  ConfigFlags ablate_flags;
  CLI::App* ablate =
      app.add_subcommand("ablate", "run with and without enrichment");
  ablate_flags.attach(ablate);

  ConfigFlags infsup_flags;
  CLI::App* infsup =
      app.add_subcommand("infsup", "inf-sup estimate of the coarse pair");
  infsup_flags.attach(infsup);

  int gen_nx = 0, gen_ny = 0, gen_seed = 1;
  double gen_contrast = 0.0;
  std::string gen_pattern, gen_out;
  CLI::App* gen =
      app.add_subcommand("gen-field", "write a synthetic coefficient raster");
  gen->add_option("--nx", gen_nx, "raster width")->required();
  gen->add_option("--ny", gen_ny, "raster height")->required();
  gen->add_option("--pattern", gen_pattern, "channels | inclusions | checkerboard")
      ->required();
  gen->add_option("--contrast", gen_contrast, "max/min value ratio, >= 1")
      ->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output raster path")->required();

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(fine)) return cmd_fine(fine_flags);
    if (app.got_subcommand(run)) return cmd_run_cli(run_flags, run_beta, run_dump);
    if (app.got_subcommand(sweep))
      return cmd_sweep_cli(sweep_flags, sweep_axis, sweep_values, sweep_beta);
    if (app.got_subcommand(ablate)) return cmd_ablate_cli(ablate_flags);
    if (app.got_subcommand(infsup)) return cmd_infsup_cli(infsup_flags);
    if (app.got_subcommand(gen))
      return cmd_gen_field(gen_nx, gen_ny, gen_pattern, gen_contrast, gen_seed,
                           gen_out);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const msgfem::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const msgfem::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
