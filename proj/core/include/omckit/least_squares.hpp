#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace omckit {

/// Named fit output with 1-sigma uncertainties from the local quadratic
/// model at the optimum. Non-convergence is reported here, never thrown.
struct FitResult {
  std::map<std::string, double> parameters;
  std::map<std::string, double> uncertainties;
  double residual_norm = 0.0;  // sqrt(sum of squared residuals)
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  static FitResult from_json(const nlohmann::json& j);
};

using ResidualFn =
    std::function<std::vector<double>(std::span<const double>)>;

struct LsqOptions {
  int max_iterations = 500;
  double gradient_tol = 1e-8;   // scaled by max(1, cost)
  double step_tol = 1e-12;      // scaled by 1 + |x|
  std::vector<double> lower;    // empty or per-parameter box bounds
  std::vector<double> upper;
  bool record_trace = false;    // keep accepted-cost trace
};

struct LsqSolution {
  std::vector<double> x;
  std::vector<double> sigma;                  // 1-sigma per parameter
  std::vector<std::vector<double>> covariance;
  double cost = 0.0;  // 0.5 * sum r^2
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> warnings;
  std::vector<double> cost_trace;  // accepted iterations, non-increasing
};

/// Damped Gauss-Newton (Levenberg-Marquardt) with forward-difference
/// Jacobian and projected box bounds. Deterministic: identical inputs give
/// bit-identical output. Residuals are assumed pre-weighted (divide by the
/// data sigma before returning); covariance is (J^T J)^-1 scaled by the
/// reduced chi-square when `scale_covariance_by_reduced_chisq` is set.
LsqSolution least_squares(const ResidualFn& residuals,
                          std::vector<double> init,
                          const LsqOptions& opts = {},
                          bool scale_covariance_by_reduced_chisq = false);

/// Attach names to a solution.
FitResult make_fit_result(const LsqSolution& sol,
                          const std::vector<std::string>& names);

}  // namespace omckit
