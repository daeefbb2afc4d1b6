#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace dengue {

// State of the coupled human-SIR / mosquito-ASI system.
// Component order is fixed and shared with the flat-array view used by the integrator.
struct SystemState {
  double S_h = 0.0;
  double I_h = 0.0;
  double R_h = 0.0;
  double A_m = 0.0;
  double S_m = 0.0;
  double I_m = 0.0;

  static constexpr std::size_t dim = 6;

  std::array<double, dim> to_array() const { return {S_h, I_h, R_h, A_m, S_m, I_m}; }
  static SystemState from_span(std::span<const double> y) {
    return {y[0], y[1], y[2], y[3], y[4], y[5]};
  }

  bool operator==(const SystemState&) const = default;
};

// SVIR variant: V_h sits between S_h and I_h, matching the serialized column order.
struct SvirState {
  double S_h = 0.0;
  double V_h = 0.0;
  double I_h = 0.0;
  double R_h = 0.0;
  double A_m = 0.0;
  double S_m = 0.0;
  double I_m = 0.0;

  static constexpr std::size_t dim = 7;

  std::array<double, dim> to_array() const { return {S_h, V_h, I_h, R_h, A_m, S_m, I_m}; }
  static SvirState from_span(std::span<const double> y) {
    return {y[0], y[1], y[2], y[3], y[4], y[5], y[6]};
  }

  bool operator==(const SvirState&) const = default;
};

}  // namespace dengue
