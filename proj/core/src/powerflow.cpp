#include "balcert/powerflow.hpp"

#include <stdexcept>

namespace balcert {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::diverged: return "diverged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::zero_voltage: return "zero_voltage";
  }
  return "unknown";
}

PowerFlowResult solve_fixed_point(const NetworkModel& model,
                                  const Eigen::VectorXcd& power,
                                  const Eigen::VectorXcd& init,
                                  const SolveOptions& opts) {
  const int n = model.pq_count();
  if (power.size() != n || init.size() != n)
    throw std::invalid_argument("power flow: vector size does not match the PQ entries");
  if (opts.tol <= 0.0) throw std::invalid_argument("power flow: tolerance must be positive");
  for (Eigen::Index i = 0; i < init.size(); ++i) {
    if (std::abs(init[i]) < 1e-13)
      throw std::invalid_argument("power flow: zero entry in the initial voltage");
  }

  PowerFlowResult out;
  out.v = init;
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n);
  const Eigen::VectorXcd s_conj = power.conjugate();

  for (int k = 1; k <= opts.max_iter; ++k) {
    const Eigen::VectorXcd next =
        ones - model.normalized_impedance *
                   out.v.conjugate().cwiseInverse().cwiseProduct(s_conj);
    out.iterations = k;
    out.residual = (next - out.v).lpNorm<Eigen::Infinity>();
    out.v = next;

    if (out.v.lpNorm<Eigen::Infinity>() > opts.blowup) {
      out.status = SolveStatus::diverged;
      out.voltage = model.no_load_voltage.cwiseProduct(out.v);
      return out;
    }
    for (Eigen::Index i = 0; i < out.v.size(); ++i) {
      if (std::abs(out.v[i]) < 1e-13) {
        out.status = SolveStatus::zero_voltage;
        out.voltage = model.no_load_voltage.cwiseProduct(out.v);
        return out;
      }
    }
    if (out.residual < opts.tol) {
      out.status = SolveStatus::converged;
      out.voltage = model.no_load_voltage.cwiseProduct(out.v);
      return out;
    }
  }
  out.status = SolveStatus::max_iterations;
  out.voltage = model.no_load_voltage.cwiseProduct(out.v);
  return out;
}

PowerFlowResult solve_fixed_point(const NetworkModel& model, const LoadState& loads,
                                  const SolveOptions& opts) {
  return solve_fixed_point(model, loads.actual_power, loads.nominal_voltage, opts);
}

}  // namespace balcert
