#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dengue/errors.hpp"

namespace dengue {

using RhsFn = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct IntegratorConfig {
  double rtol = 1e-8;
  // One entry broadcast to all components, or one entry per component.
  std::vector<double> atol{1e-8};
  double h_init = 1e-2;   // days
  double h_min = 1e-10;
  double h_max = 10.0;
  std::size_t max_steps = 2000000;  // attempted (accepted + rejected) step budget
  double dense_output_dt = 1.0;     // sampling interval of the emitted trajectory

  bool operator==(const IntegratorConfig&) const = default;
};

void validate_config(const IntegratorConfig& cfg, std::size_t dim);

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;

  bool operator==(const StepStats&) const = default;
};

enum class EventKind {
  NegativityClamped,  // accepted component in [-atol, 0) was clamped to 0
  OmegaExit,          // sample left the feasible region beyond tolerance
};

struct TrajectoryEvent {
  EventKind kind;
  double t;
  std::size_t component;
  double value;  // offending value
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  StepStats stats;
  std::vector<TrajectoryEvent> events;
};

// Adaptive Dormand-Prince 5(4) with PI step control and 4th-order dense output.
// Samples are emitted on the t0 + j*dense_output_dt grid plus the exact endpoint.
Trajectory integrate(const RhsFn& rhs, std::span<const double> y0, double t0, double t_f,
                     const IntegratorConfig& cfg);

// Fixed-step mode: the order-5 stage formula applied at constant h, one sample
// per step, no error control. Bit-reproducible. h must divide t_f - t0.
Trajectory integrate_fixed(const RhsFn& rhs, std::span<const double> y0, double t0, double t_f,
                           double h);

}  // namespace dengue
