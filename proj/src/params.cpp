#include "dengue/params.hpp"

#include <cmath>
#include <string>

namespace dengue {

std::string ValidationError::format(const std::vector<ValidationIssue>& issues) {
  std::string out = "validation failed:";
  for (const auto& issue : issues) {
    out += " [" + issue.field + ": " + issue.message + "]";
  }
  return out;
}

namespace {

void require_finite(std::vector<ValidationIssue>& out, const char* field, double v) {
  if (!std::isfinite(v)) out.push_back({field, "must be finite"});
}

void require_positive(std::vector<ValidationIssue>& out, const char* field, double v) {
  require_finite(out, field, v);
  if (std::isfinite(v) && v <= 0.0) out.push_back({field, "must be strictly positive"});
}

void require_unit_interval(std::vector<ValidationIssue>& out, const char* field, double v) {
  require_finite(out, field, v);
  if (std::isfinite(v) && (v < 0.0 || v > 1.0)) out.push_back({field, "out of [0,1]"});
}

}  // namespace

std::vector<ValidationIssue> check_params(const EpiParams& p) {
  std::vector<ValidationIssue> out;
  require_positive(out, "N_h", p.N_h);
  require_positive(out, "B", p.B);
  require_unit_interval(out, "beta_mh", p.beta_mh);
  require_unit_interval(out, "beta_hm", p.beta_hm);
  require_positive(out, "mu_h", p.mu_h);
  require_positive(out, "eta_h", p.eta_h);
  require_positive(out, "mu_m", p.mu_m);
  // phi = 0 (oviposition shut off) is the standard probe for the
  // mosquito-collapse branch, so zero is allowed here.
  require_finite(out, "phi", p.phi);
  if (std::isfinite(p.phi) && p.phi < 0.0) out.push_back({"phi", "must be non-negative"});
  require_positive(out, "mu_A", p.mu_A);
  require_positive(out, "eta_A", p.eta_A);
  require_positive(out, "m", p.m);
  require_positive(out, "k", p.k);
  return out;
}

std::vector<ValidationIssue> check_controls(const ControlPolicy& c) {
  std::vector<ValidationIssue> out;
  require_unit_interval(out, "c_A", c.c_A);
  require_unit_interval(out, "c_m", c.c_m);
  require_finite(out, "alpha", c.alpha);
  if (std::isfinite(c.alpha) && (c.alpha <= 0.0 || c.alpha > 1.0)) {
    out.push_back({"alpha", c.alpha <= 0.0 ? "must be positive" : "out of (0,1]"});
  }
  return out;
}

std::vector<ValidationIssue> check_vaccine(const VaccineParams& v) {
  std::vector<ValidationIssue> out;
  require_unit_interval(out, "p", v.p);
  require_unit_interval(out, "sigma", v.sigma);
  require_finite(out, "psi", v.psi);
  if (std::isfinite(v.psi) && v.psi < 0.0) out.push_back({"psi", "must be non-negative"});
  require_finite(out, "w", v.w);
  if (std::isfinite(v.w) && v.w < 0.0) out.push_back({"w", "must be non-negative"});
  return out;
}

void validate_params(const EpiParams& p, const ControlPolicy& c) {
  auto issues = check_params(p);
  auto more = check_controls(c);
  issues.insert(issues.end(), more.begin(), more.end());
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

void validate_params(const EpiParams& p, const ControlPolicy& c, const VaccineParams& v) {
  auto issues = check_params(p);
  auto more = check_controls(c);
  issues.insert(issues.end(), more.begin(), more.end());
  auto vac = check_vaccine(v);
  issues.insert(issues.end(), vac.begin(), vac.end());
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

}  // namespace dengue
