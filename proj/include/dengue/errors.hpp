#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dengue {

struct ValidationIssue {
  std::string field;
  std::string message;
};

// Aggregated domain-check failure: every violated bound is listed, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues)
      : std::runtime_error(format(issues)), issues_(std::move(issues)) {}

  explicit ValidationError(ValidationIssue issue)
      : ValidationError(std::vector<ValidationIssue>{std::move(issue)}) {}

  const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

 private:
  static std::string format(const std::vector<ValidationIssue>& issues);
  std::vector<ValidationIssue> issues_;
};

// Config ingestion failure (unparsable file, unknown key, bad override syntax).
// `where` is a file path, a JSON pointer-ish field path, or an override string.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& message)
      : std::runtime_error(where + ": " + message), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

enum class IntegrationFailure {
  StepUnderflow,       // error control demands h below h_min
  StepBudgetExhausted, // max_steps attempted without reaching t_f
  NonFiniteState,      // NaN/Inf appeared in a stage or solution
  NegativeState,       // accepted component below -atol
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(IntegrationFailure kind, double t, std::vector<double> state,
                   const std::string& message)
      : std::runtime_error(message), kind_(kind), t_(t), state_(std::move(state)) {}

  IntegrationFailure kind() const noexcept { return kind_; }
  double t() const noexcept { return t_; }
  const std::vector<double>& state() const noexcept { return state_; }

 private:
  IntegrationFailure kind_;
  double t_;
  std::vector<double> state_;
};

// Newton iteration failure; carries the residual at the point of giving up.
class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& message, double last_residual, int iterations)
      : std::runtime_error(message), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

}  // namespace dengue
