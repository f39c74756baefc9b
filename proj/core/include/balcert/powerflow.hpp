#ifndef BALCERT_POWERFLOW_HPP
#define BALCERT_POWERFLOW_HPP

#include <Eigen/Dense>

#include "balcert/netmodel.hpp"

namespace balcert {

enum class SolveStatus { converged, diverged, max_iterations, zero_voltage };

const char* to_string(SolveStatus s);

struct PowerFlowResult {
  Eigen::VectorXcd v;        // normalized load voltages
  Eigen::VectorXcd voltage;  // physical V = diag(E) v
  int iterations = 0;
  double residual = 0.0;     // final infinity-norm update
  SolveStatus status = SolveStatus::max_iterations;

  bool converged() const { return status == SolveStatus::converged; }
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 500;
  double blowup = 10.0;  // declare divergence when ||v||_inf exceeds this
};

/// Picard iteration on v <- 1 - Zhat diag^-1(conj v) conj S. Divergence is
/// a reported outcome, not an exception.
PowerFlowResult solve_fixed_point(const NetworkModel& model,
                                  const Eigen::VectorXcd& power,
                                  const Eigen::VectorXcd& init,
                                  const SolveOptions& opts = {});

/// Convenience overload: start from the nominal voltage of `loads` and
/// solve at its actual power.
PowerFlowResult solve_fixed_point(const NetworkModel& model,
                                  const LoadState& loads,
                                  const SolveOptions& opts = {});

}  // namespace balcert

#endif
