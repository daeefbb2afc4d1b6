#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dengue/analysis.hpp"
#include "dengue/integrate.hpp"
#include "dengue/params.hpp"
#include "dengue/scenario.hpp"

namespace dengue {

// Serializable integrator settings. atol is a single optional scalar here:
// absent means "use the population-scaled per-class defaults" worked out at
// run time by run_scenario.
struct IntegratorSettings {
  double rtol = 1e-8;
  std::optional<double> atol;
  double h_init = 1e-2;
  double h_min = 1e-10;
  double h_max = 10.0;
  std::uint64_t max_steps = 2000000;
  double dense_output_dt = 1.0;

  bool operator==(const IntegratorSettings&) const = default;
};

struct ScenarioMeta {
  std::string name = "baseline";
  double t0 = 0.0;
  double t_f = 365.0;

  bool operator==(const ScenarioMeta&) const = default;
};

// Fully resolved configuration document. Section and key names are the
// normative schema; unknown keys are rejected at parse time.
struct ConfigDocument {
  EpiParams parameters;
  ControlPolicy controls;
  std::optional<VaccineParams> vaccine;
  std::optional<InitialConditions> initial_conditions;
  IntegratorSettings integrator;
  ScenarioMeta scenario;

  bool operator==(const ConfigDocument&) const = default;
};

ConfigDocument default_config();

// Parse + default-merge + validate. Errors: ConfigError (syntax, unknown key),
// ValidationError (domain bounds).
ConfigDocument load_config(const std::filesystem::path& path);
ConfigDocument load_config_text(const std::string& text, const std::string& origin);

// Canonical (sorted-key) JSON serialization; load(serialize(doc)) == doc.
std::string serialize_config(const ConfigDocument& doc);

// Apply "key=value" overrides: dotted paths ("controls.c_m=0.25") or bare leaf
// names when unambiguous ("c_m=0.25"). Values are numbers except scenario.name.
// Re-validates afterwards.
void apply_overrides(ConfigDocument& doc, std::span<const std::string> overrides);

// FNV-1a 64 over the canonical serialization.
std::uint64_t config_hash(const ConfigDocument& doc);
std::string config_hash_hex(const ConfigDocument& doc);

Scenario make_scenario(const ConfigDocument& doc);

// Column labels for trajectory serialization.
std::vector<std::string> sir_labels();
std::vector<std::string> svir_labels();

// CSV: header "t,<labels...>", 17-significant-digit values. JSON: one object
// with a "times" array and one array per compartment.
void write_timeseries(const Trajectory& traj, std::span<const std::string> labels,
                      const std::filesystem::path& path, const std::string& format);

void write_report(const EquilibriumReport& report, const std::filesystem::path& path,
                  const std::string& format);
void write_report(const RunSummary& summary, const std::string& scenario_name,
                  const std::filesystem::path& path, const std::string& format);

std::string report_json(const EquilibriumReport& report);
std::string report_json(const RunSummary& summary, const std::string& scenario_name);

void write_figure_manifest(const FigureManifest& manifest, const std::filesystem::path& path);

struct Provenance {
  std::string config_hash;
  std::string artifact_version;
  StepStats solver_stats;
};

// Single JSON document bundling trajectory, summary, thresholds and provenance.
void write_result_bundle(const Trajectory& traj, std::span<const std::string> labels,
                         const RunSummary& summary, const ThresholdSet& thresholds,
                         const Provenance& prov, const std::string& scenario_name,
                         const std::filesystem::path& path);

}  // namespace dengue
