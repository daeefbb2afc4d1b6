#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dengue/analysis.hpp"
#include "dengue/integrate.hpp"
#include "dengue/params.hpp"
#include "dengue/state.hpp"

namespace dengue {

// Initial compartment counts. V_h is ignored unless the scenario is SVIR.
struct InitialConditions {
  double S_h = 0.0;
  double V_h = 0.0;
  double I_h = 0.0;
  double R_h = 0.0;
  double A_m = 0.0;
  double S_m = 0.0;
  double I_m = 0.0;

  bool operator==(const InitialConditions&) const = default;
};

// The outbreak initialization used in every published run: ten index cases,
// larvae at carrying-capacity scale, mosquitoes at m per human, no infected vectors.
InitialConditions outbreak_baseline_initial(const EpiParams& p);

struct Scenario {
  std::string name = "baseline";
  EpiParams params;
  ControlPolicy controls;
  std::optional<VaccineParams> vac;      // present -> SVIR system
  std::optional<InitialConditions> y0;   // absent -> outbreak baseline rule
  double t0 = 0.0;
  double t_f = 365.0;
  IntegratorConfig integrator = default_scenario_integrator();

  bool is_svir() const { return vac.has_value(); }
  static IntegratorConfig default_scenario_integrator();
};

struct RunSummary {
  double peak_I_h = 0.0;
  double t_peak_I_h = 0.0;
  double peak_I_m = 0.0;
  double t_peak_I_m = 0.0;
  double final_R_h = 0.0;
  double total_infected_proxy = 0.0;  // R_h(t_f) + I_h(t_f)
  double r0 = 0.0;
  double M = 0.0;

  bool operator==(const RunSummary&) const = default;
};

struct ScenarioResult {
  Trajectory trajectory;
  RunSummary summary;
};

// Integrates the appropriate system and summarizes the sampled trajectory.
// Peaks use 3-point parabolic refinement around the grid argmax. An empty
// integrator atol vector is materialized as population-scaled tolerances
// (humans 1e-8*N_h, mosquito compartments 1e-8*m*N_h). Feasible-region exits
// are appended to the trajectory events.
ScenarioResult run_scenario(const Scenario& s);

enum class SweepAxis {
  Adulticide,             // c_m
  Larvicide,              // c_A
  Mechanical,             // alpha
  Combined,               // c_A = c_m = 1 - alpha jointly
  VaccineEfficacyLinked,  // sigma = 1 - w jointly
  VaccineCoverage,        // psi
};

const char* to_string(SweepAxis a);
std::optional<SweepAxis> sweep_axis_from_string(const std::string& s);

struct SweepSpec {
  Scenario base;
  SweepAxis axis = SweepAxis::Adulticide;
  std::vector<double> values;
};

struct SweepRun {
  double level = 0.0;
  bool ok = false;
  std::string error;  // set when ok is false
  RunSummary summary;
  Trajectory trajectory;
};

// One run per level, in the given order; a failing level is recorded and the
// sweep continues.
std::vector<SweepRun> run_sweep(const SweepSpec& spec);

struct FigureEntry {
  std::string name;
  std::string description;
  std::vector<std::string> files;   // paths relative to the suite directory
  std::vector<double> levels;       // empty for the no-control pair
};

struct FigureManifest {
  std::vector<FigureEntry> entries;
};

// Reproduces every figure experiment at the published sweep levels and writes
// one data file per figure (plus manifest.json) under out_dir.
FigureManifest figure_data_suite(const std::string& out_dir, const std::string& format = "csv");

}  // namespace dengue
