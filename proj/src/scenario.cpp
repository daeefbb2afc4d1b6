#include "dengue/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <span>
#include <utility>

#include "dengue/io.hpp"
#include "dengue/model.hpp"

namespace dengue {

InitialConditions outbreak_baseline_initial(const EpiParams& p) {
  InitialConditions ic;
  ic.S_h = p.N_h - 10.0;
  ic.V_h = 0.0;
  ic.I_h = 10.0;
  ic.R_h = 0.0;
  ic.A_m = p.k * p.N_h;
  ic.S_m = p.m * p.N_h;
  ic.I_m = 0.0;
  return ic;
}

IntegratorConfig Scenario::default_scenario_integrator() {
  IntegratorConfig cfg;
  cfg.atol.clear();  // materialized as population-scaled tolerances at run time
  return cfg;
}

namespace {

std::vector<double> scaled_atol(const EpiParams& p, bool svir) {
  const double human = 1e-8 * p.N_h;
  const double mosquito = 1e-8 * p.m * p.N_h;
  std::vector<double> atol(svir ? 7 : 6, human);
  for (std::size_t i = svir ? 4 : 3; i < atol.size(); ++i) atol[i] = mosquito;
  return atol;
}

void validate_initial(const InitialConditions& ic, const EpiParams& p, bool svir) {
  std::vector<ValidationIssue> issues;
  const std::array<std::pair<const char*, double>, 7> fields{{{"S_h", ic.S_h},
                                                              {"V_h", ic.V_h},
                                                              {"I_h", ic.I_h},
                                                              {"R_h", ic.R_h},
                                                              {"A_m", ic.A_m},
                                                              {"S_m", ic.S_m},
                                                              {"I_m", ic.I_m}}};
  for (const auto& [name, v] : fields) {
    if (!std::isfinite(v) || v < 0.0) issues.push_back({name, "must be finite and non-negative"});
  }
  if (issues.empty()) {
    const double humans = svir ? ic.S_h + ic.V_h + ic.I_h + ic.R_h : ic.S_h + ic.I_h + ic.R_h;
    const double slack = 1e-6 * p.N_h;
    if (std::abs(humans - p.N_h) > slack) {
      issues.push_back({"initial_conditions", "human compartments must sum to N_h"});
    }
    if (!svir && ic.V_h != 0.0) {
      issues.push_back({"V_h", "set but the scenario has no vaccine section"});
    }
    if (ic.A_m > p.k * p.N_h + slack) issues.push_back({"A_m", "exceeds the k*N_h habitat cap"});
    if (ic.S_m + ic.I_m > p.m * p.N_h + slack) {
      issues.push_back({"S_m", "adult total exceeds the m*N_h cap"});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

struct Peak {
  double value = 0.0;
  double t = 0.0;
};

// Grid argmax with a 3-point parabolic pass for sub-sample peak location.
Peak refined_peak(const Trajectory& traj, std::size_t comp) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    if (traj.states[i][comp] > traj.states[arg][comp]) arg = i;
  }
  Peak peak{traj.states[arg][comp], traj.times[arg]};
  if (arg == 0 || arg + 1 == traj.times.size()) return peak;

  const double x1 = traj.times[arg - 1], x2 = traj.times[arg], x3 = traj.times[arg + 1];
  const double y1 = traj.states[arg - 1][comp], y2 = traj.states[arg][comp],
               y3 = traj.states[arg + 1][comp];
  const double d1 = (y2 - y1) / (x2 - x1);
  const double c2 = ((y3 - y2) / (x3 - x2) - d1) / (x3 - x1);
  if (!(c2 < 0.0)) return peak;  // not concave; keep the grid point
  const double xv = 0.5 * (x1 + x2) - d1 / (2.0 * c2);
  if (xv < x1 || xv > x3) return peak;
  const double yv = y1 + d1 * (xv - x1) + c2 * (xv - x1) * (xv - x2);
  if (yv >= y2) peak = {yv, xv};
  return peak;
}

void append_omega_events(Trajectory& traj, const EpiParams& p, bool svir,
                         const std::vector<double>& atol) {
  const std::size_t human_end = svir ? 4u : 3u;
  const double human_cap = p.N_h + atol[0];
  const double aquatic_cap = p.k * p.N_h + atol[human_end];
  const double adult_cap = p.m * p.N_h + atol[human_end + 1];
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& s = traj.states[i];
    double humans = 0.0;
    for (std::size_t c = 0; c < human_end; ++c) humans += s[c];
    if (humans > human_cap) {
      traj.events.push_back({EventKind::OmegaExit, traj.times[i], 0, humans});
    }
    if (s[human_end] > aquatic_cap) {
      traj.events.push_back({EventKind::OmegaExit, traj.times[i], human_end, s[human_end]});
    }
    const double adults = s[human_end + 1] + s[human_end + 2];
    if (adults > adult_cap) {
      traj.events.push_back({EventKind::OmegaExit, traj.times[i], human_end + 1, adults});
    }
  }
}

std::string format_level(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s) {
  const bool svir = s.is_svir();
  if (svir) {
    validate_params(s.params, s.controls, *s.vac);
  } else {
    validate_params(s.params, s.controls);
  }
  if (!(s.t_f > s.t0)) throw ValidationError(ValidationIssue{"t_f", "scenario horizon must satisfy t_f > t0"});

  const InitialConditions ic = s.y0 ? *s.y0 : outbreak_baseline_initial(s.params);
  validate_initial(ic, s.params, svir);

  IntegratorConfig cfg = s.integrator;
  if (cfg.atol.empty()) cfg.atol = scaled_atol(s.params, svir);

  Trajectory traj;
  try {
    if (svir) {
      const SvirState y0{ic.S_h, ic.V_h, ic.I_h, ic.R_h, ic.A_m, ic.S_m, ic.I_m};
      traj = integrate(SvirSystem{s.params, s.controls, *s.vac}, y0.to_array(), s.t0, s.t_f, cfg);
    } else {
      const SystemState y0{ic.S_h, ic.I_h, ic.R_h, ic.A_m, ic.S_m, ic.I_m};
      traj = integrate(SirAsiSystem{s.params, s.controls}, y0.to_array(), s.t0, s.t_f, cfg);
    }
  } catch (const IntegrationError& e) {
    throw IntegrationError(e.kind(), e.t(), e.state(),
                           "scenario '" + s.name + "': " + e.what());
  }
  append_omega_events(traj, s.params, svir, cfg.atol);

  const std::size_t i_h = svir ? 2u : 1u;
  const std::size_t r_h = svir ? 3u : 2u;
  const std::size_t i_m = svir ? 6u : 5u;
  const Peak ph = refined_peak(traj, i_h);
  const Peak pm = refined_peak(traj, i_m);
  const ThresholdSet thr = compute_thresholds(s.params, s.controls);

  RunSummary sum;
  sum.peak_I_h = ph.value;
  sum.t_peak_I_h = ph.t;
  sum.peak_I_m = pm.value;
  sum.t_peak_I_m = pm.t;
  sum.final_R_h = traj.states.back()[r_h];
  sum.total_infected_proxy = traj.states.back()[r_h] + traj.states.back()[i_h];
  sum.r0 = thr.r0;
  sum.M = thr.M;
  return {std::move(traj), sum};
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Adulticide: return "c_m";
    case SweepAxis::Larvicide: return "c_A";
    case SweepAxis::Mechanical: return "alpha";
    case SweepAxis::Combined: return "combined";
    case SweepAxis::VaccineEfficacyLinked: return "sigma_w_linked";
    case SweepAxis::VaccineCoverage: return "psi";
  }
  return "?";
}

std::optional<SweepAxis> sweep_axis_from_string(const std::string& s) {
  if (s == "c_m") return SweepAxis::Adulticide;
  if (s == "c_A") return SweepAxis::Larvicide;
  if (s == "alpha") return SweepAxis::Mechanical;
  if (s == "combined") return SweepAxis::Combined;
  if (s == "sigma_w_linked") return SweepAxis::VaccineEfficacyLinked;
  if (s == "psi") return SweepAxis::VaccineCoverage;
  return std::nullopt;
}

namespace {

Scenario scenario_at_level(const SweepSpec& spec, double v) {
  Scenario s = spec.base;
  switch (spec.axis) {
    case SweepAxis::Adulticide:
      s.controls.c_m = v;
      break;
    case SweepAxis::Larvicide:
      s.controls.c_A = v;
      break;
    case SweepAxis::Mechanical:
      s.controls.alpha = v;
      break;
    case SweepAxis::Combined:
      s.controls.c_A = v;
      s.controls.c_m = v;
      s.controls.alpha = 1.0 - v;
      break;
    case SweepAxis::VaccineEfficacyLinked:
      if (!s.vac) s.vac = VaccineParams{};
      s.vac->sigma = v;
      s.vac->w = 1.0 - v;
      break;
    case SweepAxis::VaccineCoverage:
      if (!s.vac) s.vac = VaccineParams{};
      s.vac->psi = v;
      break;
  }
  s.name = spec.base.name + "_" + to_string(spec.axis) + "_" + format_level(v);
  return s;
}

}  // namespace

std::vector<SweepRun> run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw ValidationError(ValidationIssue{"values", "sweep needs at least one level"});
  std::vector<SweepRun> out;
  out.reserve(spec.values.size());
  for (double v : spec.values) {
    SweepRun run;
    run.level = v;
    try {
      ScenarioResult res = run_scenario(scenario_at_level(spec, v));
      run.ok = true;
      run.summary = res.summary;
      run.trajectory = std::move(res.trajectory);
    } catch (const std::exception& e) {
      run.ok = false;
      run.error = e.what();
    }
    out.push_back(std::move(run));
  }
  return out;
}

namespace {

Trajectory column_subset(const Trajectory& traj, std::span<const std::size_t> comps) {
  Trajectory out;
  out.times = traj.times;
  out.states.reserve(traj.states.size());
  for (const auto& s : traj.states) {
    std::vector<double> row;
    row.reserve(comps.size());
    for (std::size_t c : comps) row.push_back(s[c]);
    out.states.push_back(std::move(row));
  }
  return out;
}

// One column per sweep level, all levels sampled on the shared daily grid.
Trajectory overlay_of(const std::vector<SweepRun>& runs, std::size_t comp) {
  Trajectory out;
  for (const auto& run : runs) {
    if (!run.ok) continue;
    if (out.times.empty()) {
      out.times = run.trajectory.times;
      out.states.assign(out.times.size(), {});
    }
    for (std::size_t i = 0; i < out.times.size(); ++i) {
      out.states[i].push_back(run.trajectory.states[i][comp]);
    }
  }
  return out;
}

std::vector<std::string> level_labels(const std::string& axis,
                                      const std::vector<double>& levels) {
  std::vector<std::string> out;
  out.reserve(levels.size());
  for (double v : levels) out.push_back(axis + "=" + format_level(v));
  return out;
}

}  // namespace

FigureManifest figure_data_suite(const std::string& out_dir, const std::string& format) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string ext = "." + format;
  FigureManifest manifest;

  Scenario baseline;  // uncontrolled outbreak defaults

  {  // The uncontrolled outbreak, humans and mosquitoes.
    ScenarioResult res = run_scenario(baseline);
    const std::vector<std::string> human_labels{"S_h", "I_h", "R_h"};
    const std::vector<std::string> mosq_labels{"A_m", "S_m", "I_m"};
    const std::array<std::size_t, 3> human_cols{0, 1, 2};
    const std::array<std::size_t, 3> mosq_cols{3, 4, 5};
    const std::string f1 = "01_no_control_humans" + ext;
    const std::string f2 = "01_no_control_mosquitoes" + ext;
    write_timeseries(column_subset(res.trajectory, human_cols), human_labels,
                     fs::path(out_dir) / f1, format);
    write_timeseries(column_subset(res.trajectory, mosq_cols), mosq_labels,
                     fs::path(out_dir) / f2, format);
    manifest.entries.push_back(
        {"no_control", "uncontrolled outbreak, human and mosquito compartments", {f1, f2}, {}});
  }

  struct SweepFigure {
    std::string name;
    std::string description;
    SweepAxis axis;
    std::vector<double> levels;
    std::optional<VaccineParams> vac;
    std::string file_tag;
  };
  const std::vector<double> quarters{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<SweepFigure> figures{
      {"adulticide", "infected humans under adulticide levels", SweepAxis::Adulticide, quarters,
       std::nullopt, "02_adulticide"},
      {"larvicide", "infected humans under larvicide levels", SweepAxis::Larvicide, quarters,
       std::nullopt, "03_larvicide"},
      {"mechanical", "infected humans under mechanical control levels", SweepAxis::Mechanical,
       {0.01, 0.25, 0.5, 0.75, 1.0}, std::nullopt, "04_mechanical"},
      {"combined", "infected humans under combined controls c_A = c_m = 1 - alpha",
       SweepAxis::Combined, {0.0, 0.01, 0.05, 0.1, 0.15}, std::nullopt, "05_combined"},
      {"vaccine_efficacy", "infected humans for vaccine efficacy sigma = 1 - w",
       SweepAxis::VaccineEfficacyLinked, quarters, VaccineParams{0.8, 0.8, 0.0, 1.0},
       "06_vaccine_efficacy"},
      {"vaccine_coverage", "infected humans for vaccination coverage psi",
       SweepAxis::VaccineCoverage, quarters, VaccineParams{0.0, 0.0, 0.15, 0.85},
       "07_vaccine_coverage"},
  };

  for (const auto& fig : figures) {
    SweepSpec spec;
    spec.base = baseline;
    spec.base.vac = fig.vac;
    spec.axis = fig.axis;
    spec.values = fig.levels;
    const std::vector<SweepRun> runs = run_sweep(spec);
    const std::size_t i_h = fig.vac ? 2u : 1u;
    const std::string file = fig.file_tag + "_I_h" + ext;
    write_timeseries(overlay_of(runs, i_h), level_labels(to_string(fig.axis), fig.levels),
                     fs::path(out_dir) / file, format);
    manifest.entries.push_back({fig.name, fig.description, {file}, fig.levels});
  }

  write_figure_manifest(manifest, fs::path(out_dir) / "manifest.json");
  return manifest;
}

}  // namespace dengue
