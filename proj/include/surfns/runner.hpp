#pragma once

#include <iosfwd>
#include <optional>

#include "surfns/analysis.hpp"
#include "surfns/io.hpp"

namespace surfns {

/// Configuration of one study; accepted from CLI flags and/or a key=value
/// config file. Refinement policy: per level the mesh is refined once (h
/// halves) and dt is divided by four.
struct RunConfig {
  std::string surface = "sphere";  // sphere | varying
  int ku = 2;
  int kpr = 1;
  int klambda = 1;
  int kg = 3;
  int base_refine = 1;
  int levels = 3;
  double dt0 = 0.5;
  double t_end = 1.0;
  double mu = 0.5;
  double tau_alpha = 2.5;
  std::string formulation = "lagrange";       // lagrange | penalty
  std::string inertia = "plain";              // plain | skew
  std::string initial_condition = "ritz";     // ritz | nodal
  std::string forcing_mode = "full";          // full | tangential
  std::string normal_mode = "improved";       // improved | discrete
  std::string problem = "auto";               // auto (surface-matched) | zero
  std::string out_path = "out.csv";
  long seed = 0;
  int quad_degree = -1;
  int threads = 1;
  int vtk_step = 0;

  void validate() const;
  Surface make_surface() const;
  ProblemSpec make_problem() const;
  TimeConfig make_time_config(double dt) const;
};

struct LevelRun {
  int refinements = 0;
  ErrorReport report;
  double max_constraint_residual = 0.0;
  double max_pressure_mean = 0.0;
  double max_linear_residual = 0.0;
};

std::vector<LevelRun> run_convergence_study(const RunConfig& config);

void write_converge_csv(std::ostream& out, const std::vector<LevelRun>& runs);

/// Penalty vs Lagrange comparison on the sphere problem with the standard
/// settings (P.M.: k_g=2, tau = tau_alpha/h^2, improved normal; L.M.: k_g=3,
/// k_lambda=1); side-by-side error columns.
void run_compare(const RunConfig& config, std::ostream& out);

struct GeomLevel {
  int refinements = 0;
  double h = 0.0;
  GeometricErrors errors;
};

std::vector<GeomLevel> run_geomcheck(const RunConfig& config);
void write_geomcheck_csv(std::ostream& out, const std::vector<GeomLevel>& levels);

struct InfSupLevel {
  int refinements = 0;
  double h = 0.0;
  int ndof_u = 0, ndof_p = 0, ndof_lambda = 0;
  InfSupResult betas;
};

std::vector<InfSupLevel> run_infsup(const RunConfig& config);
void write_infsup_csv(std::ostream& out, const std::vector<InfSupLevel>& levels);

/// Runs `vtk_step` time steps (none for step 0) and exports the fields at
/// that step.
void run_export_vtk(const RunConfig& config, std::ostream& out);

}  // namespace surfns
