#include "dengue/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dengue {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
// Row 7 doubles as the 5th-order weights.
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// b(5th) - b(4th): the embedded error weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output quartic coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kGrowthMin = 0.2;
constexpr double kGrowthMax = 5.0;

struct Workspace {
  std::size_t n;
  std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, errv;

  explicit Workspace(std::size_t dim)
      : n(dim), k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), ytmp(dim),
        ynew(dim), errv(dim) {}
};

// One attempted step from (t, y) with size h: fills ynew (5th order) and errv.
// Seven fresh RHS evaluations per attempt; no first-same-as-last reuse.
void dopri_stages(const RhsFn& rhs, double t, const std::vector<double>& y, double h,
                  Workspace& w) {
  const std::size_t n = w.n;
  rhs(t, y, w.k1);
  for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + h * (a21 * w.k1[i]);
  rhs(t + c2 * h, w.ytmp, w.k2);
  for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + h * (a31 * w.k1[i] + a32 * w.k2[i]);
  rhs(t + c3 * h, w.ytmp, w.k3);
  for (std::size_t i = 0; i < n; ++i)
    w.ytmp[i] = y[i] + h * (a41 * w.k1[i] + a42 * w.k2[i] + a43 * w.k3[i]);
  rhs(t + c4 * h, w.ytmp, w.k4);
  for (std::size_t i = 0; i < n; ++i)
    w.ytmp[i] = y[i] + h * (a51 * w.k1[i] + a52 * w.k2[i] + a53 * w.k3[i] + a54 * w.k4[i]);
  rhs(t + c5 * h, w.ytmp, w.k5);
  for (std::size_t i = 0; i < n; ++i)
    w.ytmp[i] = y[i] + h * (a61 * w.k1[i] + a62 * w.k2[i] + a63 * w.k3[i] + a64 * w.k4[i] +
                            a65 * w.k5[i]);
  rhs(t + h, w.ytmp, w.k6);
  for (std::size_t i = 0; i < n; ++i)
    w.ynew[i] = y[i] + h * (b1 * w.k1[i] + b3 * w.k3[i] + b4 * w.k4[i] + b5 * w.k5[i] +
                            b6 * w.k6[i]);
  rhs(t + h, w.ynew, w.k7);
  for (std::size_t i = 0; i < n; ++i)
    w.errv[i] = h * (e1 * w.k1[i] + e3 * w.k3[i] + e4 * w.k4[i] + e5 * w.k5[i] + e6 * w.k6[i] +
                     e7 * w.k7[i]);
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double atol_for(const IntegratorConfig& cfg, std::size_t i) {
  return cfg.atol.size() == 1 ? cfg.atol[0] : cfg.atol[i];
}

}  // namespace

void validate_config(const IntegratorConfig& cfg, std::size_t dim) {
  std::vector<ValidationIssue> issues;
  if (!(cfg.rtol > 0.0 && cfg.rtol < 1.0)) issues.push_back({"rtol", "must be in (0,1)"});
  if (cfg.atol.empty()) {
    issues.push_back({"atol", "must hold one entry or one per component"});
  } else if (cfg.atol.size() != 1 && cfg.atol.size() != dim) {
    issues.push_back({"atol", "size must be 1 or the state dimension"});
  } else {
    for (double a : cfg.atol) {
      if (!(a > 0.0)) {
        issues.push_back({"atol", "entries must be strictly positive"});
        break;
      }
    }
  }
  if (!(cfg.h_min > 0.0 && cfg.h_min <= cfg.h_init && cfg.h_init <= cfg.h_max)) {
    issues.push_back({"h_init", "need 0 < h_min <= h_init <= h_max"});
  }
  if (cfg.max_steps < 1) issues.push_back({"max_steps", "must be at least 1"});
  if (!(cfg.dense_output_dt > 0.0)) issues.push_back({"dense_output_dt", "must be positive"});
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

Trajectory integrate(const RhsFn& rhs, std::span<const double> y0, double t0, double t_f,
                     const IntegratorConfig& cfg) {
  const std::size_t n = y0.size();
  validate_config(cfg, n);
  if (!(t_f > t0)) {
    throw ValidationError(ValidationIssue{"t_f", "integration horizon must satisfy t_f > t0"});
  }
  std::vector<double> y(y0.begin(), y0.end());
  if (!all_finite(y)) {
    throw ValidationError(ValidationIssue{"y0", "initial state must be finite"});
  }

  Trajectory traj;
  traj.times.push_back(t0);
  traj.states.push_back(y);

  const double dt = cfg.dense_output_dt;
  const double t_tol = 1e-9 * dt;
  std::size_t next_sample = 1;  // sample times are t0 + j*dt

  Workspace w(n);
  std::vector<double> rcont2(n), rcont3(n), rcont4(n), rcont5(n);

  double t = t0;
  double h = std::clamp(cfg.h_init, cfg.h_min, std::min(cfg.h_max, t_f - t0));
  double err_prev = 1e-4;

  while (t < t_f) {
    if (traj.stats.accepted + traj.stats.rejected >= cfg.max_steps) {
      throw IntegrationError(IntegrationFailure::StepBudgetExhausted, t, y,
                             "step budget of " + std::to_string(cfg.max_steps) +
                                 " attempted steps exhausted at t = " + std::to_string(t));
    }
    bool final_step = false;
    if (t + h >= t_f) {
      h = t_f - t;  // may legitimately undershoot h_min to land on the endpoint
      final_step = true;
    }

    dopri_stages(rhs, t, y, h, w);
    traj.stats.rhs_evaluations += 7;

    if (!all_finite(w.ynew) || !all_finite(w.errv)) {
      throw IntegrationError(IntegrationFailure::NonFiniteState, t, y,
                             "non-finite state produced at t = " + std::to_string(t) +
                                 " with h = " + std::to_string(h));
    }

    double sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = atol_for(cfg, i) + cfg.rtol * std::max(std::abs(y[i]), std::abs(w.ynew[i]));
      const double q = w.errv[i] / sc;
      sumsq += q * q;
    }
    const double err = std::sqrt(sumsq / static_cast<double>(n));

    if (err <= 1.0) {
      traj.stats.accepted += 1;
      const double t_new = final_step ? t_f : t + h;

      // Negativity policy on the accepted state: clamp inside [-atol, 0),
      // abort below. Done before emission so samples at t_new match the
      // propagated state.
      for (std::size_t i = 0; i < n; ++i) {
        if (w.ynew[i] < 0.0) {
          const double ai = atol_for(cfg, i);
          if (w.ynew[i] >= -ai) {
            traj.events.push_back({EventKind::NegativityClamped, t_new, i, w.ynew[i]});
            w.ynew[i] = 0.0;
          } else {
            throw IntegrationError(IntegrationFailure::NegativeState, t_new, w.ynew,
                                   "component " + std::to_string(i) + " fell to " +
                                       std::to_string(w.ynew[i]) + " (below -atol) at t = " +
                                       std::to_string(t_new));
          }
        }
      }

      // Dense-output samples inside (t, t_new].
      bool rcont_ready = false;
      while (true) {
        const double ts = t0 + static_cast<double>(next_sample) * dt;
        if (ts > t_new + t_tol) break;
        if (ts >= t_new - t_tol) {
          traj.times.push_back(ts);
          traj.states.push_back(w.ynew);
        } else {
          if (!rcont_ready) {
            for (std::size_t i = 0; i < n; ++i) {
              const double dy = w.ynew[i] - y[i];
              rcont2[i] = dy;
              rcont3[i] = h * w.k1[i] - dy;
              rcont4[i] = dy - h * w.k7[i] - rcont3[i];
              rcont5[i] = h * (d1 * w.k1[i] + d3 * w.k3[i] + d4 * w.k4[i] + d5 * w.k5[i] +
                               d6 * w.k6[i] + d7 * w.k7[i]);
            }
            rcont_ready = true;
          }
          const double theta = (ts - t) / h;
          const double theta1 = 1.0 - theta;
          std::vector<double> yi(n);
          for (std::size_t i = 0; i < n; ++i) {
            yi[i] = y[i] + theta * (rcont2[i] +
                                    theta1 * (rcont3[i] + theta * (rcont4[i] + theta1 * rcont5[i])));
          }
          traj.times.push_back(ts);
          traj.states.push_back(std::move(yi));
        }
        ++next_sample;
      }

      y = w.ynew;
      t = t_new;
      if (final_step || t >= t_f) break;

      double growth = kSafety * std::pow(err > 0.0 ? err : 1e-16, -0.17) * std::pow(err_prev, 0.04);
      growth = std::clamp(growth, kGrowthMin, kGrowthMax);
      h = std::clamp(h * growth, cfg.h_min, cfg.h_max);
      err_prev = std::max(err, 1e-4);
    } else {
      traj.stats.rejected += 1;
      const double shrink = std::clamp(kSafety * std::pow(err, -0.2), kGrowthMin, 1.0);
      const double h_new = h * shrink;
      if (h_new < cfg.h_min) {
        if (h <= cfg.h_min * (1.0 + 1e-12)) {
          throw IntegrationError(IntegrationFailure::StepUnderflow, t, y,
                                 "error control requires a step below h_min = " +
                                     std::to_string(cfg.h_min) + " at t = " + std::to_string(t));
        }
        h = cfg.h_min;
      } else {
        h = h_new;
      }
    }
  }

  // The endpoint sample: emitted above when the grid lands on t_f; otherwise append.
  if (traj.times.back() < t_f - t_tol) {
    traj.times.push_back(t_f);
    traj.states.push_back(y);
  }
  return traj;
}

Trajectory integrate_fixed(const RhsFn& rhs, std::span<const double> y0, double t0, double t_f,
                           double h) {
  if (!(t_f > t0)) {
    throw ValidationError(ValidationIssue{"t_f", "integration horizon must satisfy t_f > t0"});
  }
  if (!(h > 0.0)) {
    throw ValidationError(ValidationIssue{"h", "step must be positive"});
  }
  const double span = t_f - t0;
  const double steps_real = span / h;
  const auto n_steps = static_cast<std::size_t>(std::llround(steps_real));
  if (n_steps == 0 || std::abs(steps_real - static_cast<double>(n_steps)) >
                          1e-9 * std::max(1.0, steps_real)) {
    throw ValidationError(ValidationIssue{"h", "step must divide t_f - t0"});
  }

  const std::size_t n = y0.size();
  std::vector<double> y(y0.begin(), y0.end());
  if (!all_finite(y)) {
    throw ValidationError(ValidationIssue{"y0", "initial state must be finite"});
  }

  Trajectory traj;
  traj.times.push_back(t0);
  traj.states.push_back(y);
  Workspace w(n);

  for (std::size_t step = 0; step < n_steps; ++step) {
    const double t = t0 + static_cast<double>(step) * h;
    dopri_stages(rhs, t, y, h, w);
    traj.stats.rhs_evaluations += 7;
    traj.stats.accepted += 1;
    if (!all_finite(w.ynew)) {
      throw IntegrationError(IntegrationFailure::NonFiniteState, t, y,
                             "non-finite state produced at t = " + std::to_string(t));
    }
    y = w.ynew;
    traj.times.push_back(step + 1 == n_steps ? t_f : t0 + static_cast<double>(step + 1) * h);
    traj.states.push_back(y);
  }
  return traj;
}

}  // namespace dengue
