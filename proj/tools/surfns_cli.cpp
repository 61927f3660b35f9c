#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <thread>

#include "surfns/runner.hpp"

namespace {

void add_common_options(CLI::App* cmd, surfns::RunConfig& cfg) {
  cmd->add_option("--surface", cfg.surface, "Surface: sphere or varying");
  cmd->add_option("--ku", cfg.ku, "Velocity degree k_u");
  cmd->add_option("--kpr", cfg.kpr, "Pressure degree k_pr (= k_u - 1)");
  cmd->add_option("--klambda", cfg.klambda, "Multiplier degree k_lambda");
  cmd->add_option("--kg", cfg.kg, "Geometric degree k_g in {1,2,3}");
  cmd->add_option("--base-refine", cfg.base_refine, "Icosphere refinements at the first level");
  cmd->add_option("--levels", cfg.levels, "Number of refinement levels");
  cmd->add_option("--dt0", cfg.dt0, "Time step at the first level (divided by 4 per level)");
  cmd->add_option("--t-end", cfg.t_end, "Final time");
  cmd->add_option("--mu", cfg.mu, "Viscosity");
  cmd->add_option("--tau-alpha", cfg.tau_alpha, "Penalty coefficient: tau = tau_alpha / h^2");
  cmd->add_option("--formulation", cfg.formulation, "lagrange or penalty");
  cmd->add_option("--inertia", cfg.inertia, "plain or skew");
  cmd->add_option("--initial-condition", cfg.initial_condition, "ritz or nodal");
  cmd->add_option("--forcing-mode", cfg.forcing_mode, "full or tangential");
  cmd->add_option("--normal-mode", cfg.normal_mode, "improved or discrete (penalty normal)");
  cmd->add_option("--problem", cfg.problem, "auto (surface-matched) or zero");
  cmd->add_option("--out", cfg.out_path, "Output file path");
  cmd->add_option("--seed", cfg.seed, "Seed for randomized property tooling");
  cmd->add_option("--quad-degree", cfg.quad_degree, "Quadrature degree (default 2 k_u + k_g)");
  cmd->add_option("--threads", cfg.threads, "Assembly threads");
  cmd->add_option("--step", cfg.vtk_step, "Time step index for export-vtk");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw surfns::Error("cannot open output file: " + path);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface Navier-Stokes finite element studies"};
  app.require_subcommand(1);

  surfns::RunConfig cfg;
  cfg.threads = static_cast<int>(std::thread::hardware_concurrency());
  if (cfg.threads < 1) cfg.threads = 1;

  // Options live on the main app (configurable through a key=value file,
  // flags taking precedence); the subcommands pass unmatched flags up.
  app.set_config("--config");
  add_common_options(&app, cfg);

  CLI::App* converge = app.add_subcommand("converge", "Unsteady convergence study (CSV)");
  CLI::App* compare = app.add_subcommand("compare", "Penalty vs Lagrange comparison (CSV)");
  CLI::App* geomcheck = app.add_subcommand("geomcheck", "Geometric error rates (CSV)");
  CLI::App* infsup = app.add_subcommand("infsup", "Discrete inf-sup constants (CSV)");
  CLI::App* export_vtk = app.add_subcommand("export-vtk", "Export fields at a time step (VTK)");
  for (CLI::App* cmd : {converge, compare, geomcheck, infsup, export_vtk}) {
    cmd->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (converge->parsed()) {
      const auto runs = surfns::run_convergence_study(cfg);
      auto out = open_output(cfg.out_path);
      surfns::write_converge_csv(out, runs);
    } else if (compare->parsed()) {
      auto out = open_output(cfg.out_path);
      surfns::run_compare(cfg, out);
    } else if (geomcheck->parsed()) {
      const auto levels = surfns::run_geomcheck(cfg);
      auto out = open_output(cfg.out_path);
      surfns::write_geomcheck_csv(out, levels);
    } else if (infsup->parsed()) {
      const auto levels = surfns::run_infsup(cfg);
      auto out = open_output(cfg.out_path);
      surfns::write_infsup_csv(out, levels);
    } else if (export_vtk->parsed()) {
      auto out = open_output(cfg.out_path);
      surfns::run_export_vtk(cfg, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
