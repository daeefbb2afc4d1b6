#pragma once

#include <vector>

#include "dengue/errors.hpp"

namespace dengue {

// Biological and demographic constants. Rates are per day.
// Defaults are the 2009 Cape Verde outbreak values.
struct EpiParams {
  double N_h = 480000.0;             // total human population
  double B = 0.8;                    // average daily biting rate
  double beta_mh = 0.375;            // transmission probability mosquito -> human, per bite
  double beta_hm = 0.375;            // transmission probability human -> mosquito, per bite
  double mu_h = 1.0 / (71.0 * 365.0);  // human mortality, 1/lifespan
  double eta_h = 1.0 / 3.0;          // human recovery, 1/viremic period
  double mu_m = 1.0 / 10.0;          // adult mosquito mortality
  double phi = 6.0;                  // eggs per deposit per capita
  double mu_A = 0.25;                // aquatic-phase natural mortality
  double eta_A = 0.08;               // maturation rate, aquatic -> adult
  double m = 3.0;                    // female mosquitoes per human (initialization and habitat cap)
  double k = 3.0;                    // larvae per human (carrying-capacity scale)

  bool operator==(const EpiParams&) const = default;
};

// Control pressures, constant over a scenario. alpha scales the larval
// carrying capacity (1 = no mechanical control, smaller = fewer breeding sites).
struct ControlPolicy {
  double c_A = 0.0;    // larvicide, added aquatic mortality
  double c_m = 0.0;    // adulticide, added adult mortality
  double alpha = 1.0;  // mechanical control factor

  bool operator==(const ControlPolicy&) const = default;
};

// SVIR vaccination layer: leaky vaccine with waning.
struct VaccineParams {
  double p = 0.0;      // proportion of newborns vaccinated
  double psi = 0.0;    // vaccination rate of susceptibles, 1/day
  double sigma = 0.0;  // residual infection factor of vaccinated (0 = perfect vaccine)
  double w = 0.0;      // waning rate, 1/day

  bool operator==(const VaccineParams&) const = default;
};

std::vector<ValidationIssue> check_params(const EpiParams& p);
std::vector<ValidationIssue> check_controls(const ControlPolicy& c);
std::vector<ValidationIssue> check_vaccine(const VaccineParams& v);

// Aggregate all violations and throw ValidationError if any.
void validate_params(const EpiParams& p, const ControlPolicy& c);
void validate_params(const EpiParams& p, const ControlPolicy& c, const VaccineParams& v);

}  // namespace dengue
