#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dengue/analysis.hpp"
#include "dengue/io.hpp"
#include "dengue/scenario.hpp"
#include "dengue/version.hpp"

namespace fs = std::filesystem;
using namespace dengue;

namespace {

struct CommonOpts {
  std::string config = "baseline";
  std::string out_dir;
  std::string format = "csv";
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config, "config file, or 'baseline' for built-in defaults")
      ->capture_default_str();
  cmd->add_option("--out", o.out_dir, "output directory (default: $DENGUESIM_OUT or ./out)");
  cmd->add_option("--format", o.format, "data file format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--set", o.sets, "override a config value, key=value (repeatable)");
}

fs::path resolve_out(const CommonOpts& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("DENGUESIM_OUT"); env && *env) return env;
  return "out";
}

ConfigDocument resolve_config(const CommonOpts& o) {
  ConfigDocument doc = (o.config == "baseline") ? default_config() : load_config(o.config);
  if (!o.sets.empty()) apply_overrides(doc, o.sets);
  return doc;
}

std::string format_level(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

int cmd_simulate(const CommonOpts& o) {
  const ConfigDocument doc = resolve_config(o);
  const Scenario s = make_scenario(doc);
  const ScenarioResult res = run_scenario(s);

  const fs::path out = resolve_out(o);
  fs::create_directories(out);
  const auto labels = s.is_svir() ? svir_labels() : sir_labels();
  const fs::path series = out / (s.name + "_timeseries." + o.format);
  write_timeseries(res.trajectory, labels, series, o.format);
  const Provenance prov{config_hash_hex(doc), kArtifactVersion, res.trajectory.stats};
  const fs::path bundle = out / (s.name + "_result.json");
  write_result_bundle(res.trajectory, labels, res.summary,
                      compute_thresholds(s.params, s.controls), prov, s.name, bundle);

  const RunSummary& r = res.summary;
  std::printf("scenario    %s (%s)\n", s.name.c_str(), s.is_svir() ? "SVIR" : "SIR-ASI");
  std::printf("R0          %.10g    M  %.10g\n", r.r0, r.M);
  std::printf("peak I_h    %.6g at day %.4g\n", r.peak_I_h, r.t_peak_I_h);
  std::printf("peak I_m    %.6g at day %.4g\n", r.peak_I_m, r.t_peak_I_m);
  std::printf("final R_h   %.6g    infected proxy  %.6g\n", r.final_R_h, r.total_infected_proxy);
  std::printf("steps       %zu accepted, %zu rejected, %zu rhs evaluations\n",
              res.trajectory.stats.accepted, res.trajectory.stats.rejected,
              res.trajectory.stats.rhs_evaluations);
  std::printf("wrote       %s\n", series.string().c_str());
  std::printf("wrote       %s\n", bundle.string().c_str());
  return 0;
}

int cmd_analyze(const CommonOpts& o) {
  const ConfigDocument doc = resolve_config(o);
  const Scenario s = make_scenario(doc);
  const EquilibriumReport rep = equilibria_closed_form(s.params, s.controls);

  // NGM R0 is evaluated at the mosquito-bearing DFE when it exists, else at E1.
  const Equilibrium* dfe = nullptr;
  for (const Equilibrium& e : rep.equilibria) {
    if (e.kind == EquilibriumKind::DfeBiotic) dfe = &e;
  }
  if (!dfe) dfe = &rep.equilibria.front();
  double r0_ngm = 0.0;
  bool ngm_ok = true;
  std::string ngm_err;
  try {
    r0_ngm = compute_r0_ngm(s.params, s.controls, dfe->state);
  } catch (const std::exception& e) {
    ngm_ok = false;
    ngm_err = e.what();
  }

  const fs::path out = resolve_out(o);
  fs::create_directories(out);
  const fs::path report = out / (s.name + "_report." + o.format);
  write_report(rep, report, o.format);

  const ThresholdSet& t = rep.thresholds;
  std::printf("thresholds  M %.10g   xi %.10g   chi %.10g\n", t.M, t.xi, t.chi);
  if (t.r0_defined) {
    std::printf("R0          %.10g closed form\n", t.r0);
  } else {
    std::printf("R0          undefined (chi < 0), reported as 0\n");
  }
  if (ngm_ok) {
    std::printf("R0          %.10g next-generation matrix at %s\n", r0_ngm,
                to_string(dfe->kind));
  } else {
    std::printf("R0          NGM unavailable: %s\n", ngm_err.c_str());
  }
  std::printf("case        %s -> %zu equilibria\n", to_string(rep.trichotomy_case),
              rep.equilibria.size());
  for (const Equilibrium& e : rep.equilibria) {
    std::printf("  %-11s S_h %.6g  I_h %.6g  R_h %.6g  A_m %.6g  S_m %.6g  I_m %.6g\n",
                to_string(e.kind), e.state.S_h, e.state.I_h, e.state.R_h, e.state.A_m,
                e.state.S_m, e.state.I_m);
    std::printf("              residual %.3g  in_omega %s%s\n", e.residual,
                e.in_omega ? "yes" : "no",
                e.refinement_failed ? "  (refinement failed, seed shown)" : "");
  }
  std::printf("wrote       %s\n", report.string().c_str());
  return 0;
}

std::vector<double> parse_levels(const std::string& csv) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string tok =
        csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end == tok.c_str() || *end != '\0') {
      throw ConfigError("--values " + csv, "expected comma-separated numbers");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

int cmd_sweep(const CommonOpts& o, const std::string& axis_str, const std::string& values_str) {
  const auto axis = sweep_axis_from_string(axis_str);
  if (!axis) {
    throw ConfigError("--axis " + axis_str,
                      "expected one of c_m, c_A, alpha, combined, sigma_w_linked, psi");
  }
  SweepSpec spec;
  spec.base = make_scenario(resolve_config(o));
  spec.axis = *axis;
  spec.values = parse_levels(values_str);
  const std::vector<SweepRun> runs = run_sweep(spec);

  const fs::path out = resolve_out(o) / ("sweep_" + axis_str);
  fs::create_directories(out);
  for (const SweepRun& run : runs) {
    if (!run.ok) continue;
    const bool svir = !run.trajectory.states.empty() && run.trajectory.states.front().size() == 7;
    const auto labels = svir ? svir_labels() : sir_labels();
    const std::string stem =
        spec.base.name + "_" + axis_str + "_" + format_level(run.level) + "_timeseries";
    write_timeseries(run.trajectory, labels, out / (stem + "." + o.format), o.format);
  }

  {
    std::string text =
        "level,ok,error,peak_I_h,t_peak_I_h,peak_I_m,t_peak_I_m,final_R_h,"
        "total_infected_proxy,r0,M\n";
    char buf[64];
    for (const SweepRun& run : runs) {
      std::snprintf(buf, sizeof buf, "%.17g", run.level);
      text += buf;
      text += run.ok ? ",1," : ",0,";
      text += csv_escape(run.error);
      const RunSummary& r = run.summary;
      for (const double v : {r.peak_I_h, r.t_peak_I_h, r.peak_I_m, r.t_peak_I_m, r.final_R_h,
                             r.total_infected_proxy, r.r0, r.M}) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        text += buf;
      }
      text += '\n';
    }
    std::FILE* f = std::fopen((out / "summary.csv").string().c_str(), "wb");
    if (!f) throw ConfigError((out / "summary.csv").string(), "cannot open for writing");
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
  }
  {
    nlohmann::ordered_json j;
    j["kind"] = "sweep_summary";
    j["axis"] = axis_str;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const SweepRun& run : runs) {
      nlohmann::ordered_json row;
      row["level"] = run.level;
      row["ok"] = run.ok;
      if (!run.ok) {
        row["error"] = run.error;
      } else {
        const RunSummary& r = run.summary;
        row["summary"] = {{"peak_I_h", r.peak_I_h},
                          {"t_peak_I_h", r.t_peak_I_h},
                          {"peak_I_m", r.peak_I_m},
                          {"t_peak_I_m", r.t_peak_I_m},
                          {"final_R_h", r.final_R_h},
                          {"total_infected_proxy", r.total_infected_proxy},
                          {"r0", r.r0},
                          {"M", r.M}};
      }
      rows.push_back(row);
    }
    j["runs"] = rows;
    std::ofstream jf(out / "summary.json", std::ios::binary);
    jf << j.dump(2) << '\n';
  }

  std::printf("%-10s %-4s %-14s %-12s %-14s %s\n", "level", "ok", "peak_I_h", "R0", "final_R_h",
              "error");
  for (const SweepRun& run : runs) {
    if (run.ok) {
      std::printf("%-10g %-4s %-14.6g %-12.6g %-14.6g\n", run.level, "yes", run.summary.peak_I_h,
                  run.summary.r0, run.summary.final_R_h);
    } else {
      std::printf("%-10g %-4s %-14s %-12s %-14s %s\n", run.level, "no", "-", "-", "-",
                  run.error.c_str());
    }
  }
  std::printf("wrote      %s\n", (out / "summary.csv").string().c_str());
  return 0;
}

int cmd_figures(const CommonOpts& o) {
  const fs::path out = resolve_out(o) / "figures";
  const FigureManifest manifest = figure_data_suite(out.string(), o.format);
  for (const FigureEntry& e : manifest.entries) {
    std::string files;
    for (const std::string& f : e.files) {
      if (!files.empty()) files += ", ";
      files += f;
    }
    std::printf("%-18s %s\n", e.name.c_str(), files.c_str());
  }
  std::printf("%zu figure entries under %s\n", manifest.entries.size(), out.string().c_str());
  return 0;
}

int cmd_validate(const CommonOpts& o) {
  const ConfigDocument doc = resolve_config(o);
  std::printf("config ok: %s scenario '%s', %s\n", doc.vaccine ? "SVIR" : "SIR-ASI",
              doc.scenario.name.c_str(), config_hash_hex(doc).c_str());
  return 0;
}

void err_json(const char* type, const std::string& message) {
  nlohmann::json j{{"error", type}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dengue transmission simulator: coupled human SIR / mosquito ASI dynamics "
               "with vector controls and vaccination"};
  app.set_version_flag("--version", kArtifactVersion);
  app.require_subcommand(1);

  CommonOpts sim_o, ana_o, swp_o, fig_o, val_o;
  CLI::App* sim = app.add_subcommand("simulate", "integrate a scenario and write its trajectory");
  add_common(sim, sim_o);
  CLI::App* ana = app.add_subcommand("analyze", "thresholds, R0 and equilibria of a configuration");
  add_common(ana, ana_o);
  CLI::App* swp = app.add_subcommand("sweep", "rerun a scenario over a grid of control levels");
  add_common(swp, swp_o);
  std::string axis, values;
  swp->add_option("--axis", axis, "c_m | c_A | alpha | combined | sigma_w_linked | psi")
      ->required();
  swp->add_option("--values", values, "comma-separated levels")->required();
  CLI::App* fig = app.add_subcommand("figures", "write the figure data suite");
  add_common(fig, fig_o);
  CLI::App* val = app.add_subcommand("validate", "parse a configuration and report its hash");
  add_common(val, val_o);

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return cmd_simulate(sim_o);
    if (ana->parsed()) return cmd_analyze(ana_o);
    if (swp->parsed()) return cmd_sweep(swp_o, axis, values);
    if (fig->parsed()) return cmd_figures(fig_o);
    if (val->parsed()) return cmd_validate(val_o);
    return 2;
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    err_json("usage", e.what());
    return 2;
  } catch (const ConfigError& e) {
    err_json("config", e.what());
    return 2;
  } catch (const ValidationError& e) {
    err_json("validation", e.what());
    return 2;
  } catch (const IntegrationError& e) {
    err_json("integration", e.what());
    return 1;
  } catch (const NewtonError& e) {
    err_json("newton", e.what());
    return 1;
  } catch (const std::exception& e) {
    err_json("internal", e.what());
    return 1;
  }
}
