#include "dengue/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dengue/errors.hpp"
#include "dengue/model.hpp"

namespace dengue {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

Vec6 to_vec(const SystemState& s) {
  Vec6 v;
  const auto a = s.to_array();
  for (int i = 0; i < 6; ++i) v[i] = a[static_cast<std::size_t>(i)];
  return v;
}

SystemState to_state(const Vec6& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

Vec6 field_at(const Vec6& x, const EpiParams& p, const ControlPolicy& c) {
  return to_vec(sir_asi_rhs(to_state(x), p, c));
}

Mat6 jacobian_at(const Vec6& x, const EpiParams& p, const ControlPolicy& c) {
  const auto J = sir_asi_jacobian(to_state(x), p, c);
  Mat6 m;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) m(i, j) = J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

// Positivity threshold for classifying infected compartments of a refined root.
double positivity_tol(const EpiParams& p) { return 1e-8 * std::max(1.0, p.N_h); }

bool state_in_omega(const SystemState& s, const EpiParams& p) {
  const double slack = 1e-9 * std::max(1.0, p.N_h);
  const auto a = s.to_array();
  for (double v : a) {
    if (v < -slack) return false;
  }
  if (s.S_h + s.I_h + s.R_h > p.N_h + slack) return false;
  if (s.A_m > p.k * p.N_h + slack) return false;
  if (s.S_m + s.I_m > p.m * p.N_h + slack) return false;
  return true;
}

EquilibriumKind classify(const SystemState& s, const EpiParams& p) {
  const double tol = positivity_tol(p);
  if (s.I_h > tol && s.I_m > tol) return EquilibriumKind::Endemic;
  if (s.A_m > tol || s.S_m > tol) return EquilibriumKind::DfeBiotic;
  return EquilibriumKind::DfeTrivial;
}

}  // namespace

const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::DfeTrivial: return "dfe_trivial";
    case EquilibriumKind::DfeBiotic: return "dfe_biotic";
    case EquilibriumKind::Endemic: return "endemic";
  }
  return "?";
}

const char* to_string(TrichotomyCase c) {
  switch (c) {
    case TrichotomyCase::MosquitoCollapse: return "M<=0";
    case TrichotomyCase::DiseaseFreeOnly: return "M>0,xi>=chi";
    case TrichotomyCase::EndemicPresent: return "M>0,xi<chi";
  }
  return "?";
}

double compute_M(const EpiParams& p, const ControlPolicy& c) {
  return p.phi * p.eta_A - (p.eta_A + p.mu_A + c.c_A) * (p.mu_m + c.c_m);
}

double offspring_ratio(const EpiParams& p, const ControlPolicy& c) {
  return (p.eta_A + p.mu_A + c.c_A) * (p.mu_m + c.c_m) / (p.phi * p.eta_A);
}

ThresholdSet compute_thresholds(const EpiParams& p, const ControlPolicy& c) {
  ThresholdSet t;
  t.M = compute_M(p, c);
  const double dm = p.mu_m + c.c_m;
  t.xi = p.phi * dm * dm * (p.eta_h + p.mu_h);
  t.chi = c.alpha * p.k * p.B * p.B * p.beta_hm * p.beta_mh * t.M;
  if (t.chi >= 0.0) {
    t.r0 = std::sqrt(t.chi / t.xi);
    t.r0_defined = true;
  } else {
    t.r0 = 0.0;
    t.r0_defined = false;
  }
  return t;
}

SystemState dfe_trivial(const EpiParams& p) { return {p.N_h, 0.0, 0.0, 0.0, 0.0, 0.0}; }

SystemState dfe_biotic(const EpiParams& p, const ControlPolicy& c) {
  const double M = compute_M(p, c);
  const double scale = c.alpha * p.k * p.N_h * M / p.phi;
  return {p.N_h, 0.0, 0.0, scale / p.eta_A, scale / (p.mu_m + c.c_m), 0.0};
}

// Derived route: the aquatic and total-adult levels coincide with the biotic
// DFE; the infected split follows from the human force-of-infection balance.
// Avoids the unstable printed S_m expression.
SystemState endemic_closed_form(const EpiParams& p, const ControlPolicy& c) {
  const ThresholdSet t = compute_thresholds(p, c);
  const double dm = p.mu_m + c.c_m;
  const double dh = p.eta_h + p.mu_h;
  const double b_h = p.B * p.beta_mh / p.N_h;

  const double A = c.alpha * p.k * p.N_h * t.M / (p.phi * p.eta_A);
  const double total_adults = c.alpha * p.k * p.N_h * t.M / (p.phi * dm);
  const double I_m =
      p.mu_h * p.N_h * (t.chi - t.xi) / (p.B * p.beta_mh * (t.xi + p.phi * p.B * p.beta_hm * p.mu_h * dm));
  const double S_m = total_adults - I_m;
  const double S_h = p.mu_h * p.N_h / (b_h * I_m + p.mu_h);
  const double I_h = b_h * I_m * S_h / dh;
  const double R_h = p.eta_h * I_h / p.mu_h;
  return {S_h, I_h, R_h, A, S_m, I_m};
}

double compute_r0_ngm(const EpiParams& p, const ControlPolicy& c, const SystemState& dfe) {
  const double tol = positivity_tol(p);
  if (std::abs(dfe.I_h) > tol || std::abs(dfe.I_m) > tol) {
    throw std::invalid_argument("compute_r0_ngm: state has infected compartments, not a DFE");
  }
  const Vec6 g = field_at(to_vec(dfe), p, c);
  const double res = g.cwiseAbs().maxCoeff();
  if (res > 1e-6 * std::max(1.0, p.mu_h * p.N_h)) {
    throw std::invalid_argument("compute_r0_ngm: state is not an equilibrium (residual " +
                                std::to_string(res) + ")");
  }

  // New-infection and transition Jacobians over (I_h, I_m) at the DFE.
  Eigen::Matrix2d jf, jv;
  jf << 0.0, p.B * p.beta_mh * dfe.S_h / p.N_h,
        p.B * p.beta_hm * dfe.S_m / p.N_h, 0.0;
  jv << p.eta_h + p.mu_h, 0.0,
        0.0, c.c_m + p.mu_m;
  const Eigen::Matrix2d ngm = jf * jv.inverse();
  const Eigen::Vector2cd ev = ngm.eigenvalues();
  return std::max(std::abs(ev[0]), std::abs(ev[1]));
}

R0Split compute_r0_split(const EpiParams& p, const ControlPolicy& c, const SystemState& dfe) {
  R0Split s;
  s.r_hm = p.B * p.beta_hm * dfe.S_m / (p.N_h * (p.eta_h + p.mu_h));
  s.r_mh = p.B * p.beta_mh * dfe.S_h / (p.N_h * (c.c_m + p.mu_m));
  return s;
}

double default_newton_tol(const EpiParams& p) { return 1e-10 * std::max(1.0, p.mu_h * p.N_h); }

Equilibrium refine_equilibrium(const SystemState& seed, const EpiParams& p,
                               const ControlPolicy& c, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("refine_equilibrium: tol must be positive");
  Vec6 x = to_vec(seed);
  if (!x.allFinite()) throw std::invalid_argument("refine_equilibrium: non-finite seed");

  Vec6 g = field_at(x, p, c);
  double res = g.cwiseAbs().maxCoeff();
  constexpr int kMaxIter = 50;

  for (int iter = 0; iter < kMaxIter && res >= tol; ++iter) {
    const Mat6 J = jacobian_at(x, p, c);
    Eigen::FullPivLU<Mat6> lu(J);
    if (!lu.isInvertible()) {
      throw NewtonError("refine_equilibrium: singular Jacobian", res, iter);
    }
    const Vec6 dx = lu.solve(-g);

    // Step-halving damping on the residual max-norm.
    double lambda = 1.0;
    bool moved = false;
    for (int halves = 0; halves < 12; ++halves, lambda *= 0.5) {
      const Vec6 x_try = x + lambda * dx;
      const Vec6 g_try = field_at(x_try, p, c);
      const double res_try = g_try.cwiseAbs().maxCoeff();
      if (res_try < res) {
        x = x_try;
        g = g_try;
        res = res_try;
        moved = true;
        break;
      }
    }
    if (!moved) {
      throw NewtonError("refine_equilibrium: damping failed to reduce the residual", res, iter);
    }
  }
  if (res >= tol) {
    throw NewtonError("refine_equilibrium: no convergence in 50 iterations", res, kMaxIter);
  }

  Equilibrium eq;
  eq.state = to_state(x);
  eq.kind = classify(eq.state, p);
  eq.residual = res;
  eq.in_omega = state_in_omega(eq.state, p);
  eq.refinement_failed = false;
  return eq;
}

EquilibriumReport equilibria_closed_form(const EpiParams& p, const ControlPolicy& c) {
  validate_params(p, c);
  EquilibriumReport report;
  report.thresholds = compute_thresholds(p, c);
  const auto& t = report.thresholds;
  report.trichotomy_case = t.M <= 0.0 ? TrichotomyCase::MosquitoCollapse
                           : t.xi >= t.chi ? TrichotomyCase::DiseaseFreeOnly
                                           : TrichotomyCase::EndemicPresent;
  const double tol = default_newton_tol(p);

  auto add_candidate = [&](const SystemState& seed, EquilibriumKind fallback_kind) {
    try {
      report.equilibria.push_back(refine_equilibrium(seed, p, c, tol));
    } catch (const NewtonError& e) {
      Equilibrium eq;
      eq.state = seed;
      eq.kind = fallback_kind;
      eq.residual = e.last_residual();
      eq.in_omega = state_in_omega(seed, p);
      eq.refinement_failed = true;
      report.equilibria.push_back(eq);
    }
  };

  add_candidate(dfe_trivial(p), EquilibriumKind::DfeTrivial);
  // M = 0 collapses the biotic DFE onto the trivial one; report the single DFE.
  if (t.M > 0.0) {
    add_candidate(dfe_biotic(p, c), EquilibriumKind::DfeBiotic);
    if (t.xi < t.chi) {
      add_candidate(endemic_closed_form(p, c), EquilibriumKind::Endemic);
    }
  }
  return report;
}

double jacobian_fd_check(const EpiParams& p, const ControlPolicy& c, const SystemState& y) {
  const Vec6 x = to_vec(y);
  if (!x.allFinite()) throw std::invalid_argument("jacobian_fd_check: non-finite state");
  const Mat6 J = jacobian_at(x, p, c);

  double worst = 0.0;
  auto track = [&worst](double analytic, double fd) {
    const double rel = std::abs(analytic - fd) / std::max(1.0, std::abs(analytic));
    worst = std::max(worst, rel);
  };

  // The field is at most quadratic in the state, so central differences have
  // no truncation term here; the step only has to beat subtractive rounding
  // against the largest flows, hence the floor at a fraction of the state norm.
  const double fd_step = std::cbrt(std::numeric_limits<double>::epsilon());
  const double scale_floor = std::max(1.0, 1e-2 * x.cwiseAbs().maxCoeff());

  for (int j = 0; j < 6; ++j) {
    const double hj = fd_step * std::max(std::abs(x[j]), scale_floor);
    Vec6 xp = x, xm = x;
    xp[j] += hj;
    xm[j] -= hj;
    const Vec6 gp = field_at(xp, p, c);
    const Vec6 gm = field_at(xm, p, c);
    for (int i = 0; i < 6; ++i) track(J(i, j), (gp[i] - gm[i]) / (2.0 * hj));
  }

  // F/V split over (I_h, I_m), susceptible pools frozen at y.
  const double dh = p.eta_h + p.mu_h;
  const double dm = c.c_m + p.mu_m;
  auto f_ops = [&](double ih, double im) {
    return std::array<double, 2>{p.B * p.beta_mh * im * y.S_h / p.N_h,
                                 p.B * p.beta_hm * ih * y.S_m / p.N_h};
  };
  auto v_ops = [&](double ih, double im) {
    return std::array<double, 2>{dh * ih, dm * im};
  };
  const double jf_analytic[2][2] = {{0.0, p.B * p.beta_mh * y.S_h / p.N_h},
                                    {p.B * p.beta_hm * y.S_m / p.N_h, 0.0}};
  const double jv_analytic[2][2] = {{dh, 0.0}, {0.0, dm}};
  const double infected[2] = {y.I_h, y.I_m};
  for (int j = 0; j < 2; ++j) {
    const double hj = fd_step * std::max(std::abs(infected[j]), scale_floor);
    double ihp = y.I_h, imp = y.I_m, ihm = y.I_h, imm = y.I_m;
    (j == 0 ? ihp : imp) += hj;
    (j == 0 ? ihm : imm) -= hj;
    const auto fp = f_ops(ihp, imp), fm = f_ops(ihm, imm);
    const auto vp = v_ops(ihp, imp), vm = v_ops(ihm, imm);
    for (int i = 0; i < 2; ++i) {
      track(jf_analytic[i][j], (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * hj));
      track(jv_analytic[i][j], (vp[static_cast<std::size_t>(i)] - vm[static_cast<std::size_t>(i)]) / (2.0 * hj));
    }
  }
  return worst;
}

}  // namespace dengue
