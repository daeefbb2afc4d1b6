#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "dengue/params.hpp"
#include "dengue/state.hpp"

namespace dengue {

// Time derivative of the SIR+ASI system. Negative components are tolerated
// (the adaptive integrator probes slightly outside the positive cone); non-finite
// input throws. Transfer flows (infection, recovery, maturation) are computed once
// and moved between compartments so the human total is conserved to rounding.
SystemState sir_asi_rhs(const SystemState& y, const EpiParams& p, const ControlPolicy& c);

// SVIR extension: vaccinated compartment with leaky infection (factor sigma),
// newborn vaccination p, susceptible vaccination rate psi, waning w.
// The mosquito block is unchanged.
SvirState svir_rhs(const SvirState& y, const EpiParams& p, const ControlPolicy& c,
                   const VaccineParams& v);

// Analytic Jacobian of sir_asi_rhs, row i = d(dy_i/dt)/dy_j.
std::array<std::array<double, 6>, 6> sir_asi_jacobian(const SystemState& y, const EpiParams& p,
                                                      const ControlPolicy& c);

// Flat-array adapters for the integrator.
struct SirAsiSystem {
  EpiParams params;
  ControlPolicy controls;
  static constexpr std::size_t dim = SystemState::dim;
  void operator()(double t, std::span<const double> y, std::span<double> dydt) const;
};

struct SvirSystem {
  EpiParams params;
  ControlPolicy controls;
  VaccineParams vaccine;
  static constexpr std::size_t dim = SvirState::dim;
  void operator()(double t, std::span<const double> y, std::span<double> dydt) const;
};

}  // namespace dengue
