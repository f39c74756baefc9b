#include "balcert/certification.hpp"

#include <cmath>
#include <stdexcept>

namespace balcert {

namespace {

RobustVerdict dispatch(const DiskBundle& disks, const BalanceRequest& req) {
  switch (req.method) {
    case Method::closed_form:
      return robust_pvur(disks, req.epsilon, req.variant);
    case Method::line_bound:
      return robust_lvur_linebound(disks, req.epsilon);
    case Method::magnitude_bound:
      return robust_lvur_magbound(disks, req.epsilon);
    case Method::bound:
      return vuf_bound(disks, req.epsilon,
                       req.metric == Metric::vuf_zero ? Sequence::zero : Sequence::negative);
    case Method::polytope:
      return vuf_polytope(disks, req.epsilon, req.polygon_m,
                          req.metric == Metric::vuf_zero ? Sequence::zero : Sequence::negative)
          .verdict;
    case Method::lgr:
      return vuf_lgr(disks, req.epsilon,
                     req.metric == Metric::vuf_zero ? Sequence::zero : Sequence::negative)
          .verdict;
  }
  throw std::logic_error("unknown certification method");
}

}  // namespace

std::optional<std::string> validate_request(Metric metric, Method method) {
  const bool ok = (metric == Metric::pvur && method == Method::closed_form) ||
                  (metric == Metric::lvur && (method == Method::line_bound ||
                                              method == Method::magnitude_bound)) ||
                  ((metric == Metric::vuf_negative || metric == Metric::vuf_zero) &&
                   (method == Method::bound || method == Method::polytope ||
                    method == Method::lgr));
  if (ok) return std::nullopt;
  return std::string("method \"") + to_string(method) + "\" does not apply to metric \"" +
         to_string(metric) + "\"";
}

BalanceCertificate certify(const NetworkModel& model, const LoadState& loads,
                           std::span<const std::string> critical_nodes,
                           std::span<const BalanceRequest> requests) {
  for (const BalanceRequest& r : requests) {
    if (auto err = validate_request(r.metric, r.method)) throw std::invalid_argument(*err);
    if (!(r.epsilon > 0.0 && r.epsilon < 1.0))
      throw std::invalid_argument("certify: epsilon must lie in (0, 1)");
  }

  BalanceCertificate cert;
  cert.stress = compute_stress(model, loads);
  cert.solvable = cert.stress.feasible;
  cert.nodes.assign(critical_nodes.begin(), critical_nodes.end());
  if (!cert.solvable) {
    cert.balanced = false;
    return cert;
  }

  bool all_pass = true;
  for (const std::string& node : critical_nodes) {
    NodeAssessment assessment;
    assessment.disks = build_disks(model, loads, cert.stress, node);
    for (const BalanceRequest& r : requests) {
      assessment.verdicts.push_back(dispatch(assessment.disks, r));
      all_pass = all_pass && assessment.verdicts.back().pass;
    }
    cert.assessments.push_back(std::move(assessment));
  }
  cert.balanced = all_pass;
  return cert;
}

std::optional<double> min_epsilon_for_disks(const DiskBundle& disks,
                                            const BalanceRequest& request,
                                            const MinEpsOptions& opts) {
  if (auto err = validate_request(request.metric, request.method))
    throw std::invalid_argument(*err);
  if (opts.tol <= 0.0) throw std::invalid_argument("min epsilon: tol must be positive");

  auto passes = [&](double eps) {
    BalanceRequest r = request;
    r.epsilon = eps;
    return dispatch(disks, r).pass;
  };

  if (passes(opts.eps_lo)) return opts.eps_lo;
  if (!passes(opts.eps_hi)) return std::nullopt;

  // Every implemented method loosens monotonically in eps, so the pass
  // boundary is a single crossing.
  double lo = opts.eps_lo, hi = opts.eps_hi;
  for (int it = 0; it < opts.max_iter && hi - lo > opts.tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::optional<double> min_epsilon(const NetworkModel& model, const LoadState& loads,
                                  std::string_view critical_node,
                                  const BalanceRequest& request,
                                  const MinEpsOptions& opts) {
  const StressSummary stress = compute_stress(model, loads);
  if (!stress.feasible)
    throw std::domain_error("min epsilon: the instance is not solvable");
  const DiskBundle disks = build_disks(model, loads, stress, critical_node);
  return min_epsilon_for_disks(disks, request, opts);
}

double true_unbalance(const VoltageTriple& v, Metric metric, PvurVariant variant) {
  switch (metric) {
    case Metric::pvur:
      return pvur(std::abs(v.a), std::abs(v.b), std::abs(v.c), variant);
    case Metric::lvur:
      return lvur(std::abs(v.a - v.b), std::abs(v.b - v.c), std::abs(v.c - v.a));
    case Metric::vuf_negative:
      return vuf(v, Sequence::negative);
    case Metric::vuf_zero:
      return vuf(v, Sequence::zero);
  }
  throw std::logic_error("unknown metric");
}

std::vector<SweepEntry> sweep(const NetworkModel& model, const LoadState& nominal,
                              const std::function<Eigen::VectorXcd(int)>& sigma_of_k,
                              int k_begin, int k_end, std::string_view critical_node,
                              std::span<const BalanceRequest> requests,
                              const SweepOptions& opts) {
  std::vector<SweepEntry> rows;
  const std::array<int, 3> idx = model.three_phase_indices(critical_node);

  for (int k = k_begin; k <= k_end; ++k) {
    std::vector<SweepEntry> scenario_rows;
    std::string error;
    bool solvable = false;
    std::optional<VoltageTriple> solved;

    try {
      const Eigen::VectorXcd sigma = sigma_of_k(k);
      LoadState loads;
      loads.nominal_power = nominal.nominal_power;
      loads.actual_power = nominal.nominal_power + sigma;
      loads.increment = sigma;
      loads.nominal_voltage = nominal.nominal_voltage;

      const StressSummary stress = compute_stress(model, loads);
      solvable = stress.feasible;

      std::optional<DiskBundle> disks;
      if (solvable) {
        disks = build_disks(model, loads, stress, critical_node);
        const PowerFlowResult pf = solve_fixed_point(model, loads, opts.solve);
        if (pf.converged()) {
          solved = VoltageTriple{pf.voltage[idx[0]], pf.voltage[idx[1]], pf.voltage[idx[2]]};
        } else {
          error = std::string("power flow ") + to_string(pf.status);
        }
      }

      for (const BalanceRequest& r : requests) {
        SweepEntry row;
        row.k = k;
        row.metric = r.metric;
        row.method = r.method;
        row.variant = r.variant;
        row.solvable = solvable;
        row.error = error;
        if (solved) row.true_value = true_unbalance(*solved, r.metric, r.variant);
        if (disks) row.min_eps = min_epsilon_for_disks(*disks, r, opts.eps);
        scenario_rows.push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      scenario_rows.clear();
      for (const BalanceRequest& r : requests) {
        SweepEntry row;
        row.k = k;
        row.metric = r.metric;
        row.method = r.method;
        row.variant = r.variant;
        row.solvable = false;
        row.error = e.what();
        scenario_rows.push_back(std::move(row));
      }
    }
    for (auto& row : scenario_rows) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace balcert
