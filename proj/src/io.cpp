#include "dengue/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <utility>

#include <json.hpp>

namespace dengue {
namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;  // human-facing outputs keep insertion order

struct NumField {
  const char* key;
  double* dst;
};

std::vector<NumField> param_fields(EpiParams& p) {
  return {{"N_h", &p.N_h},   {"B", &p.B},         {"beta_mh", &p.beta_mh},
          {"beta_hm", &p.beta_hm}, {"mu_h", &p.mu_h}, {"eta_h", &p.eta_h},
          {"mu_m", &p.mu_m}, {"phi", &p.phi},     {"mu_A", &p.mu_A},
          {"eta_A", &p.eta_A}, {"m", &p.m},       {"k", &p.k}};
}

std::vector<NumField> control_fields(ControlPolicy& c) {
  return {{"c_A", &c.c_A}, {"c_m", &c.c_m}, {"alpha", &c.alpha}};
}

std::vector<NumField> vaccine_fields(VaccineParams& v) {
  return {{"p", &v.p}, {"psi", &v.psi}, {"sigma", &v.sigma}, {"w", &v.w}};
}

std::vector<NumField> ic_fields(InitialConditions& ic) {
  return {{"S_h", &ic.S_h}, {"V_h", &ic.V_h}, {"I_h", &ic.I_h}, {"R_h", &ic.R_h},
          {"A_m", &ic.A_m}, {"S_m", &ic.S_m}, {"I_m", &ic.I_m}};
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where, "expected a number");
  return v.get<double>();
}

void merge_numbers(const json& sec, const std::string& path, const std::vector<NumField>& fields) {
  if (!sec.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : sec.items()) {
    const std::string where = path + "." + key;
    auto it = std::find_if(fields.begin(), fields.end(),
                           [&](const NumField& f) { return key == f.key; });
    if (it == fields.end()) throw ConfigError(where, "unknown key");
    *it->dst = as_number(value, where);
  }
}

void merge_integrator(const json& sec, IntegratorSettings& it) {
  const std::string path = "$.integrator";
  if (!sec.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : sec.items()) {
    const std::string where = path + "." + key;
    if (key == "rtol") {
      it.rtol = as_number(value, where);
    } else if (key == "atol") {
      it.atol = as_number(value, where);
    } else if (key == "h_init") {
      it.h_init = as_number(value, where);
    } else if (key == "h_min") {
      it.h_min = as_number(value, where);
    } else if (key == "h_max") {
      it.h_max = as_number(value, where);
    } else if (key == "max_steps") {
      if (!value.is_number_integer()) throw ConfigError(where, "expected an integer");
      const auto v = value.get<std::int64_t>();
      if (v < 0) throw ConfigError(where, "expected a non-negative integer");
      it.max_steps = static_cast<std::uint64_t>(v);
    } else if (key == "dense_output_dt") {
      it.dense_output_dt = as_number(value, where);
    } else {
      throw ConfigError(where, "unknown key");
    }
  }
}

void merge_scenario(const json& sec, ScenarioMeta& meta) {
  const std::string path = "$.scenario";
  if (!sec.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : sec.items()) {
    const std::string where = path + "." + key;
    if (key == "name") {
      if (!value.is_string()) throw ConfigError(where, "expected a string");
      meta.name = value.get<std::string>();
    } else if (key == "t0") {
      meta.t0 = as_number(value, where);
    } else if (key == "t_f") {
      meta.t_f = as_number(value, where);
    } else {
      throw ConfigError(where, "unknown key");
    }
  }
}

void validate_document(const ConfigDocument& doc) {
  if (doc.vaccine) {
    validate_params(doc.parameters, doc.controls, *doc.vaccine);
  } else {
    validate_params(doc.parameters, doc.controls);
  }
  std::vector<ValidationIssue> issues;
  const IntegratorSettings& it = doc.integrator;
  if (!(it.rtol > 0.0 && it.rtol < 1.0)) issues.push_back({"integrator.rtol", "out of (0, 1)"});
  if (it.atol && !(*it.atol > 0.0)) issues.push_back({"integrator.atol", "must be positive"});
  if (!(it.h_min > 0.0 && it.h_min <= it.h_init && it.h_init <= it.h_max)) {
    issues.push_back({"integrator.h_init", "needs 0 < h_min <= h_init <= h_max"});
  }
  if (it.max_steps < 1) issues.push_back({"integrator.max_steps", "must be at least 1"});
  if (!(it.dense_output_dt > 0.0)) {
    issues.push_back({"integrator.dense_output_dt", "must be positive"});
  }
  if (!(doc.scenario.t_f > doc.scenario.t0)) issues.push_back({"scenario.t_f", "must exceed t0"});
  if (doc.scenario.name.empty()) issues.push_back({"scenario.name", "must be non-empty"});
  if (doc.initial_conditions) {
    ConfigDocument copy = doc;
    for (const NumField& f : ic_fields(*copy.initial_conditions)) {
      if (!std::isfinite(*f.dst) || *f.dst < 0.0) {
        issues.push_back({std::string("initial_conditions.") + f.key,
                          "must be finite and non-negative"});
      }
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

}  // namespace

ConfigDocument default_config() { return {}; }

ConfigDocument load_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ConfigError(origin, msg);
  }
  if (!j.is_object()) throw ConfigError(origin, "top level must be an object");

  static constexpr const char* kSections[] = {"parameters", "controls",   "vaccine",
                                              "initial_conditions", "integrator", "scenario"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(kSections), std::end(kSections),
                     [&](const char* s) { return key == s; }) == std::end(kSections)) {
      throw ConfigError("$." + key, "unknown section");
    }
  }

  ConfigDocument doc = default_config();
  if (j.contains("parameters")) {
    merge_numbers(j["parameters"], "$.parameters", param_fields(doc.parameters));
  }
  if (j.contains("controls")) {
    merge_numbers(j["controls"], "$.controls", control_fields(doc.controls));
  }
  if (j.contains("vaccine")) {
    doc.vaccine = VaccineParams{};
    merge_numbers(j["vaccine"], "$.vaccine", vaccine_fields(*doc.vaccine));
  }
  if (j.contains("initial_conditions")) {
    // Keys omitted by the user stay at the outbreak baseline for the (possibly
    // overridden) parameters, so a partial section must still sum consistently.
    doc.initial_conditions = outbreak_baseline_initial(doc.parameters);
    merge_numbers(j["initial_conditions"], "$.initial_conditions",
                  ic_fields(*doc.initial_conditions));
  }
  if (j.contains("integrator")) merge_integrator(j["integrator"], doc.integrator);
  if (j.contains("scenario")) merge_scenario(j["scenario"], doc.scenario);
  validate_document(doc);
  return doc;
}

ConfigDocument load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "config not found");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_config_text(text, path.string());
}

std::string serialize_config(const ConfigDocument& doc) {
  ConfigDocument d = doc;  // field tables want mutable access
  auto section = [](const std::vector<NumField>& fields) {
    json s;
    for (const NumField& f : fields) s[f.key] = *f.dst;
    return s;
  };
  json j;
  j["parameters"] = section(param_fields(d.parameters));
  j["controls"] = section(control_fields(d.controls));
  if (d.vaccine) j["vaccine"] = section(vaccine_fields(*d.vaccine));
  if (d.initial_conditions) {
    j["initial_conditions"] = section(ic_fields(*d.initial_conditions));
  }
  json it;
  it["rtol"] = d.integrator.rtol;
  if (d.integrator.atol) it["atol"] = *d.integrator.atol;
  it["h_init"] = d.integrator.h_init;
  it["h_min"] = d.integrator.h_min;
  it["h_max"] = d.integrator.h_max;
  it["max_steps"] = d.integrator.max_steps;
  it["dense_output_dt"] = d.integrator.dense_output_dt;
  j["integrator"] = it;
  j["scenario"] = {{"name", d.scenario.name}, {"t0", d.scenario.t0}, {"t_f", d.scenario.t_f}};
  return j.dump(2) + "\n";
}

namespace {

const char* section_of_leaf(const std::string& leaf, const std::string& where) {
  static const std::map<std::string, const char*> table = {
      {"N_h", "parameters"},   {"B", "parameters"},     {"beta_mh", "parameters"},
      {"beta_hm", "parameters"}, {"mu_h", "parameters"}, {"eta_h", "parameters"},
      {"mu_m", "parameters"},  {"phi", "parameters"},   {"mu_A", "parameters"},
      {"eta_A", "parameters"}, {"m", "parameters"},     {"k", "parameters"},
      {"c_A", "controls"},     {"c_m", "controls"},     {"alpha", "controls"},
      {"p", "vaccine"},        {"psi", "vaccine"},      {"sigma", "vaccine"},
      {"w", "vaccine"},        {"S_h", "initial_conditions"},
      {"V_h", "initial_conditions"}, {"I_h", "initial_conditions"},
      {"R_h", "initial_conditions"}, {"A_m", "initial_conditions"},
      {"S_m", "initial_conditions"}, {"I_m", "initial_conditions"},
      {"rtol", "integrator"},  {"atol", "integrator"},  {"h_init", "integrator"},
      {"h_min", "integrator"}, {"h_max", "integrator"}, {"max_steps", "integrator"},
      {"dense_output_dt", "integrator"}, {"name", "scenario"},
      {"t0", "scenario"},      {"t_f", "scenario"}};
  const auto it = table.find(leaf);
  if (it == table.end()) throw ConfigError(where, "unknown key '" + leaf + "'");
  return it->second;
}

void set_number(const std::vector<NumField>& fields, const std::string& leaf, double v,
                const std::string& where) {
  for (const NumField& f : fields) {
    if (leaf == f.key) {
      *f.dst = v;
      return;
    }
  }
  throw ConfigError(where, "unknown key '" + leaf + "'");
}

double parse_number(const std::string& value, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') throw ConfigError(where, "expected a numeric value");
  return v;
}

void apply_one(ConfigDocument& doc, const std::string& section, const std::string& leaf,
               const std::string& value, const std::string& where) {
  if (section == "parameters") {
    set_number(param_fields(doc.parameters), leaf, parse_number(value, where), where);
  } else if (section == "controls") {
    set_number(control_fields(doc.controls), leaf, parse_number(value, where), where);
  } else if (section == "vaccine") {
    if (!doc.vaccine) doc.vaccine = VaccineParams{};
    set_number(vaccine_fields(*doc.vaccine), leaf, parse_number(value, where), where);
  } else if (section == "initial_conditions") {
    if (!doc.initial_conditions) {
      doc.initial_conditions = outbreak_baseline_initial(doc.parameters);
    }
    set_number(ic_fields(*doc.initial_conditions), leaf, parse_number(value, where), where);
  } else if (section == "integrator") {
    if (leaf == "atol") {
      doc.integrator.atol = parse_number(value, where);
    } else if (leaf == "max_steps") {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
      if (end == value.c_str() || *end != '\0' || value.front() == '-') {
        throw ConfigError(where, "expected a non-negative integer");
      }
      doc.integrator.max_steps = v;
    } else if (leaf == "rtol") {
      doc.integrator.rtol = parse_number(value, where);
    } else if (leaf == "h_init") {
      doc.integrator.h_init = parse_number(value, where);
    } else if (leaf == "h_min") {
      doc.integrator.h_min = parse_number(value, where);
    } else if (leaf == "h_max") {
      doc.integrator.h_max = parse_number(value, where);
    } else if (leaf == "dense_output_dt") {
      doc.integrator.dense_output_dt = parse_number(value, where);
    } else {
      throw ConfigError(where, "unknown key '" + leaf + "'");
    }
  } else if (section == "scenario") {
    if (leaf == "name") {
      doc.scenario.name = value;
    } else if (leaf == "t0") {
      doc.scenario.t0 = parse_number(value, where);
    } else if (leaf == "t_f") {
      doc.scenario.t_f = parse_number(value, where);
    } else {
      throw ConfigError(where, "unknown key '" + leaf + "'");
    }
  } else {
    throw ConfigError(where, "unknown section '" + section + "'");
  }
}

}  // namespace

void apply_overrides(ConfigDocument& doc, std::span<const std::string> overrides) {
  for (const std::string& ov : overrides) {
    const std::string where = "--set " + ov;
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(where, "expected key=value");
    const std::string key = ov.substr(0, eq);
    const std::string value = ov.substr(eq + 1);
    std::string section, leaf;
    if (const auto dot = key.find('.'); dot != std::string::npos) {
      section = key.substr(0, dot);
      leaf = key.substr(dot + 1);
    } else {
      leaf = key;
      section = section_of_leaf(leaf, where);
    }
    apply_one(doc, section, leaf, value, where);
  }
  validate_document(doc);
}

std::uint64_t config_hash(const ConfigDocument& doc) {
  const std::string s = serialize_config(doc);
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(const ConfigDocument& doc) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, config_hash(doc));
  return buf;
}

Scenario make_scenario(const ConfigDocument& doc) {
  Scenario s;
  s.name = doc.scenario.name;
  s.params = doc.parameters;
  s.controls = doc.controls;
  s.vac = doc.vaccine;
  s.y0 = doc.initial_conditions;
  s.t0 = doc.scenario.t0;
  s.t_f = doc.scenario.t_f;
  IntegratorConfig cfg;
  cfg.rtol = doc.integrator.rtol;
  if (doc.integrator.atol) {
    cfg.atol = {*doc.integrator.atol};
  } else {
    cfg.atol.clear();  // run_scenario fills in the population-scaled defaults
  }
  cfg.h_init = doc.integrator.h_init;
  cfg.h_min = doc.integrator.h_min;
  cfg.h_max = doc.integrator.h_max;
  cfg.max_steps = static_cast<std::size_t>(doc.integrator.max_steps);
  cfg.dense_output_dt = doc.integrator.dense_output_dt;
  s.integrator = cfg;
  return s;
}

std::vector<std::string> sir_labels() { return {"S_h", "I_h", "R_h", "A_m", "S_m", "I_m"}; }

std::vector<std::string> svir_labels() {
  return {"S_h", "V_h", "I_h", "R_h", "A_m", "S_m", "I_m"};
}

namespace {

void format_value(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

ojson columns_json(const Trajectory& traj, std::span<const std::string> labels) {
  ojson j;
  j["times"] = traj.times;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    std::vector<double> col;
    col.reserve(traj.states.size());
    for (const auto& row : traj.states) col.push_back(row[c]);
    j[labels[c]] = std::move(col);
  }
  return j;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path.string(), "cannot open for writing");
  return out;
}

}  // namespace

void write_timeseries(const Trajectory& traj, std::span<const std::string> labels,
                      const std::filesystem::path& path, const std::string& format) {
  if (!traj.states.empty() && traj.states.front().size() != labels.size()) {
    throw std::invalid_argument("write_timeseries: label count does not match state width");
  }
  std::ofstream out = open_out(path);
  if (format == "csv") {
    std::string line = "t";
    for (const std::string& label : labels) {
      line += ',';
      line += label;
    }
    line += '\n';
    out << line;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      line.clear();
      format_value(line, traj.times[i]);
      for (const double v : traj.states[i]) {
        line += ',';
        format_value(line, v);
      }
      line += '\n';
      out << line;
    }
  } else if (format == "json") {
    out << columns_json(traj, labels).dump(2) << '\n';
  } else {
    throw ConfigError("format", "expected csv or json, got '" + format + "'");
  }
}

namespace {

ojson state_json(const SystemState& s) {
  return {{"S_h", s.S_h}, {"I_h", s.I_h}, {"R_h", s.R_h},
          {"A_m", s.A_m}, {"S_m", s.S_m}, {"I_m", s.I_m}};
}

ojson thresholds_json(const ThresholdSet& t) {
  return {{"M", t.M}, {"xi", t.xi}, {"chi", t.chi}, {"r0", t.r0}, {"r0_defined", t.r0_defined}};
}

ojson summary_json(const RunSummary& s) {
  return {{"peak_I_h", s.peak_I_h},
          {"t_peak_I_h", s.t_peak_I_h},
          {"peak_I_m", s.peak_I_m},
          {"t_peak_I_m", s.t_peak_I_m},
          {"final_R_h", s.final_R_h},
          {"total_infected_proxy", s.total_infected_proxy},
          {"r0", s.r0},
          {"M", s.M}};
}

const char* event_kind_name(EventKind k) {
  return k == EventKind::NegativityClamped ? "negativity_clamped" : "omega_exit";
}

}  // namespace

std::string report_json(const EquilibriumReport& report) {
  ojson j;
  j["kind"] = "equilibrium_report";
  j["thresholds"] = thresholds_json(report.thresholds);
  j["trichotomy_case"] = to_string(report.trichotomy_case);
  ojson eqs = ojson::array();
  for (const Equilibrium& e : report.equilibria) {
    eqs.push_back({{"kind", to_string(e.kind)},
                   {"state", state_json(e.state)},
                   {"residual", e.residual},
                   {"in_omega", e.in_omega},
                   {"refinement_failed", e.refinement_failed}});
  }
  j["equilibria"] = eqs;
  return j.dump(2) + "\n";
}

std::string report_json(const RunSummary& summary, const std::string& scenario_name) {
  ojson j;
  j["kind"] = "run_summary";
  j["scenario"] = scenario_name;
  j["summary"] = summary_json(summary);
  return j.dump(2) + "\n";
}

void write_report(const EquilibriumReport& report, const std::filesystem::path& path,
                  const std::string& format) {
  std::ofstream out = open_out(path);
  if (format == "json") {
    out << report_json(report);
  } else if (format == "csv") {
    out << "kind,S_h,I_h,R_h,A_m,S_m,I_m,residual,in_omega,refinement_failed\n";
    for (const Equilibrium& e : report.equilibria) {
      std::string line = to_string(e.kind);
      for (const double v : e.state.to_array()) {
        line += ',';
        format_value(line, v);
      }
      line += ',';
      format_value(line, e.residual);
      line += e.in_omega ? ",1" : ",0";
      line += e.refinement_failed ? ",1" : ",0";
      line += '\n';
      out << line;
    }
  } else {
    throw ConfigError("format", "expected csv or json, got '" + format + "'");
  }
}

void write_report(const RunSummary& summary, const std::string& scenario_name,
                  const std::filesystem::path& path, const std::string& format) {
  std::ofstream out = open_out(path);
  if (format == "json") {
    out << report_json(summary, scenario_name);
  } else if (format == "csv") {
    out << "scenario,peak_I_h,t_peak_I_h,peak_I_m,t_peak_I_m,final_R_h,total_infected_proxy,"
           "r0,M\n";
    std::string line = scenario_name;
    for (const double v : {summary.peak_I_h, summary.t_peak_I_h, summary.peak_I_m,
                           summary.t_peak_I_m, summary.final_R_h, summary.total_infected_proxy,
                           summary.r0, summary.M}) {
      line += ',';
      format_value(line, v);
    }
    line += '\n';
    out << line;
  } else {
    throw ConfigError("format", "expected csv or json, got '" + format + "'");
  }
}

void write_figure_manifest(const FigureManifest& manifest, const std::filesystem::path& path) {
  ojson entries = ojson::array();
  for (const FigureEntry& e : manifest.entries) {
    entries.push_back({{"name", e.name},
                       {"description", e.description},
                       {"files", e.files},
                       {"levels", e.levels}});
  }
  ojson j;
  j["kind"] = "figure_manifest";
  j["entries"] = entries;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_result_bundle(const Trajectory& traj, std::span<const std::string> labels,
                         const RunSummary& summary, const ThresholdSet& thresholds,
                         const Provenance& prov, const std::string& scenario_name,
                         const std::filesystem::path& path) {
  ojson j;
  j["kind"] = "result_bundle";
  j["scenario"] = scenario_name;
  j["provenance"] = {{"config_hash", prov.config_hash},
                     {"artifact_version", prov.artifact_version},
                     {"solver_stats",
                      {{"accepted", prov.solver_stats.accepted},
                       {"rejected", prov.solver_stats.rejected},
                       {"rhs_evaluations", prov.solver_stats.rhs_evaluations}}}};
  j["thresholds"] = thresholds_json(thresholds);
  j["summary"] = summary_json(summary);
  j["timeseries"] = columns_json(traj, labels);
  ojson events = ojson::array();
  for (const TrajectoryEvent& e : traj.events) {
    events.push_back({{"kind", event_kind_name(e.kind)},
                      {"t", e.t},
                      {"component", e.component},
                      {"value", e.value}});
  }
  j["events"] = events;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace dengue
