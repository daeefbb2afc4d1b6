#include "dengue/model.hpp"

#include <cmath>
#include <stdexcept>

namespace dengue {

namespace {

void check_finite6(const SystemState& y) {
  if (!(std::isfinite(y.S_h) && std::isfinite(y.I_h) && std::isfinite(y.R_h) &&
        std::isfinite(y.A_m) && std::isfinite(y.S_m) && std::isfinite(y.I_m))) {
    throw std::invalid_argument("sir_asi_rhs: non-finite state component");
  }
}

void check_finite7(const SvirState& y) {
  if (!(std::isfinite(y.S_h) && std::isfinite(y.V_h) && std::isfinite(y.I_h) &&
        std::isfinite(y.R_h) && std::isfinite(y.A_m) && std::isfinite(y.S_m) &&
        std::isfinite(y.I_m))) {
    throw std::invalid_argument("svir_rhs: non-finite state component");
  }
}

double carrying_capacity(const EpiParams& p, const ControlPolicy& c) {
  const double K = c.alpha * p.k * p.N_h;
  if (K <= 0.0) throw std::domain_error("larval carrying capacity alpha*k*N_h is zero");
  return K;
}

}  // namespace

// The transfer flows are shared between source and destination equations so the
// human total S_h+I_h+R_h obeys d/dt = mu_h*(N_h - total) with no spurious
// float source term.
SystemState sir_asi_rhs(const SystemState& y, const EpiParams& p, const ControlPolicy& c) {
  check_finite6(y);
  const double K = carrying_capacity(p, c);

  const double force_h = p.B * p.beta_mh * y.I_m / p.N_h;  // per susceptible human
  const double force_m = p.B * p.beta_hm * y.I_h / p.N_h;  // per susceptible mosquito
  const double births = p.mu_h * p.N_h;
  const double infection_h = force_h * y.S_h;
  const double recovery = p.eta_h * y.I_h;

  const double oviposition = p.phi * (1.0 - y.A_m / K) * (y.S_m + y.I_m);
  const double maturation = p.eta_A * y.A_m;
  const double infection_m = force_m * y.S_m;
  const double adult_death = p.mu_m + c.c_m;

  SystemState d;
  d.S_h = births - infection_h - p.mu_h * y.S_h;
  d.I_h = infection_h - recovery - p.mu_h * y.I_h;
  d.R_h = recovery - p.mu_h * y.R_h;
  d.A_m = oviposition - maturation - (p.mu_A + c.c_A) * y.A_m;
  d.S_m = maturation - infection_m - adult_death * y.S_m;
  d.I_m = infection_m - adult_death * y.I_m;
  return d;
}

SvirState svir_rhs(const SvirState& y, const EpiParams& p, const ControlPolicy& c,
                   const VaccineParams& v) {
  check_finite7(y);
  const double K = carrying_capacity(p, c);

  const double force_h = p.B * p.beta_mh * y.I_m / p.N_h;
  const double force_m = p.B * p.beta_hm * y.I_h / p.N_h;
  const double births = p.mu_h * p.N_h;
  const double infection_s = force_h * y.S_h;
  const double infection_v = v.sigma * force_h * y.V_h;
  const double vaccination = v.psi * y.S_h;
  const double waning = v.w * y.V_h;
  const double recovery = p.eta_h * y.I_h;

  const double oviposition = p.phi * (1.0 - y.A_m / K) * (y.S_m + y.I_m);
  const double maturation = p.eta_A * y.A_m;
  const double infection_m = force_m * y.S_m;
  const double adult_death = p.mu_m + c.c_m;

  SvirState d;
  d.S_h = (1.0 - v.p) * births + waning - infection_s - vaccination - p.mu_h * y.S_h;
  d.V_h = v.p * births + vaccination - waning - infection_v - p.mu_h * y.V_h;
  d.I_h = infection_s + infection_v - recovery - p.mu_h * y.I_h;
  d.R_h = recovery - p.mu_h * y.R_h;
  d.A_m = oviposition - maturation - (p.mu_A + c.c_A) * y.A_m;
  d.S_m = maturation - infection_m - adult_death * y.S_m;
  d.I_m = infection_m - adult_death * y.I_m;
  return d;
}

std::array<std::array<double, 6>, 6> sir_asi_jacobian(const SystemState& y, const EpiParams& p,
                                                      const ControlPolicy& c) {
  check_finite6(y);
  const double K = carrying_capacity(p, c);
  const double b_h = p.B * p.beta_mh / p.N_h;
  const double b_m = p.B * p.beta_hm / p.N_h;
  const double force_h = b_h * y.I_m;
  const double force_m = b_m * y.I_h;
  const double logistic = p.phi * (1.0 - y.A_m / K);
  const double adult_death = p.mu_m + c.c_m;

  std::array<std::array<double, 6>, 6> J{};
  // d(S_h')/...
  J[0][0] = -(force_h + p.mu_h);
  J[0][5] = -b_h * y.S_h;
  // d(I_h')/...
  J[1][0] = force_h;
  J[1][1] = -(p.eta_h + p.mu_h);
  J[1][5] = b_h * y.S_h;
  // d(R_h')/...
  J[2][1] = p.eta_h;
  J[2][2] = -p.mu_h;
  // d(A_m')/...
  J[3][3] = -p.phi * (y.S_m + y.I_m) / K - (p.eta_A + p.mu_A + c.c_A);
  J[3][4] = logistic;
  J[3][5] = logistic;
  // d(S_m')/...
  J[4][1] = -b_m * y.S_m;
  J[4][3] = p.eta_A;
  J[4][4] = -(force_m + adult_death);
  // d(I_m')/...
  J[5][1] = b_m * y.S_m;
  J[5][4] = force_m;
  J[5][5] = -adult_death;
  return J;
}

void SirAsiSystem::operator()(double, std::span<const double> y, std::span<double> dydt) const {
  const SystemState d = sir_asi_rhs(SystemState::from_span(y), params, controls);
  const auto a = d.to_array();
  for (std::size_t i = 0; i < dim; ++i) dydt[i] = a[i];
}

void SvirSystem::operator()(double, std::span<const double> y, std::span<double> dydt) const {
  const SvirState d = svir_rhs(SvirState::from_span(y), params, controls, vaccine);
  const auto a = d.to_array();
  for (std::size_t i = 0; i < dim; ++i) dydt[i] = a[i];
}

}  // namespace dengue
