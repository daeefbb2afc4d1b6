#pragma once

#include <string>
#include <vector>

#include "dengue/params.hpp"
#include "dengue/state.hpp"

namespace dengue {

// Threshold quantities controlling mosquito persistence (M) and disease
// invasion (R0 = sqrt(chi/xi) when chi >= 0).
struct ThresholdSet {
  double M = 0.0;
  double xi = 0.0;
  double chi = 0.0;
  double r0 = 0.0;
  bool r0_defined = true;  // false when chi < 0 (mosquito population collapses)
};

enum class EquilibriumKind {
  DfeTrivial,  // E1: no mosquitoes, no disease
  DfeBiotic,   // E2: mosquitoes persist, no disease
  Endemic,     // E3: positive infected compartments
};

enum class TrichotomyCase {
  MosquitoCollapse,  // M <= 0: only E1
  DiseaseFreeOnly,   // M > 0, xi >= chi: E1 and E2
  EndemicPresent,    // M > 0, xi < chi: E1, E2 and E3
};

struct Equilibrium {
  SystemState state;
  EquilibriumKind kind = EquilibriumKind::DfeTrivial;
  double residual = 0.0;  // max-norm of the vector field at state
  bool in_omega = true;
  bool refinement_failed = false;
};

struct EquilibriumReport {
  ThresholdSet thresholds;
  TrichotomyCase trichotomy_case = TrichotomyCase::MosquitoCollapse;
  std::vector<Equilibrium> equilibria;
};

const char* to_string(EquilibriumKind k);
const char* to_string(TrichotomyCase c);

// M = phi*eta_A - (eta_A + mu_A + c_A)*(mu_m + c_m); positive iff the
// mosquito population sustains itself.
double compute_M(const EpiParams& p, const ControlPolicy& c);

// (eta_A + mu_A + c_A)(mu_m + c_m) / (phi * eta_A): expected offspring
// bookkeeping ratio; M > 0 exactly when this ratio is below 1.
double offspring_ratio(const EpiParams& p, const ControlPolicy& c);

ThresholdSet compute_thresholds(const EpiParams& p, const ControlPolicy& c);

// Disease-free equilibria in closed form.
SystemState dfe_trivial(const EpiParams& p);
SystemState dfe_biotic(const EpiParams& p, const ControlPolicy& c);  // requires M >= 0

// Endemic equilibrium in closed form (valid when M > 0 and xi < chi).
SystemState endemic_closed_form(const EpiParams& p, const ControlPolicy& c);

// Basic reproduction number as the spectral radius of the next-generation
// matrix J_F * J_V^-1 assembled at the given disease-free equilibrium.
// Throws std::invalid_argument if dfe is not disease-free (I_h or I_m nonzero
// beyond tolerance, or residual too large).
double compute_r0_ngm(const EpiParams& p, const ControlPolicy& c, const SystemState& dfe);

// The two directed half-cycles whose product is R0^2.
struct R0Split {
  double r_hm;  // human -> mosquito
  double r_mh;  // mosquito -> human
};
R0Split compute_r0_split(const EpiParams& p, const ControlPolicy& c, const SystemState& dfe);

// Damped Newton refinement of an equilibrium seed on the 6-dimensional root
// problem, with the analytic Jacobian. Throws NewtonError on non-convergence
// or a singular Jacobian. Kind is classified from (I_h, I_m) positivity.
Equilibrium refine_equilibrium(const SystemState& seed, const EpiParams& p,
                               const ControlPolicy& c, double tol);

// Residual tolerance used by default: 1e-10 scaled by the birth flow.
double default_newton_tol(const EpiParams& p);

// Equilibrium enumeration per the persistence/invasion trichotomy:
// M <= 0 -> {E1}; M > 0, xi >= chi -> {E1, E2}; M > 0, xi < chi -> {E1, E2, E3}.
// Each candidate is Newton-refined; a candidate whose refinement fails is still
// reported, flagged, never dropped.
EquilibriumReport equilibria_closed_form(const EpiParams& p, const ControlPolicy& c);

// Max relative discrepancy between the analytic Jacobians (full system and the
// F/V infection-block split) and central finite differences at the given state.
double jacobian_fd_check(const EpiParams& p, const ControlPolicy& c, const SystemState& y);

}  // namespace dengue
