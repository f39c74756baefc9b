#ifndef BALCERT_CERTIFICATION_HPP
#define BALCERT_CERTIFICATION_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "balcert/netmodel.hpp"
#include "balcert/powerflow.hpp"
#include "balcert/robustcert.hpp"
#include "balcert/solvability.hpp"

namespace balcert {

/// One requested balance check: metric, certification method and
/// tolerance, plus the knobs the method needs.
struct BalanceRequest {
  Metric metric = Metric::pvur;
  Method method = Method::closed_form;
  double epsilon = 0.05;
  PvurVariant variant = PvurVariant::avg_deviation;
  int polygon_m = 32;
};

/// Reject metric/method combinations that have no meaning (e.g. a closed
/// form for VUF). Returns an explanation for invalid pairs.
std::optional<std::string> validate_request(Metric metric, Method method);

struct NodeAssessment {
  DiskBundle disks;
  std::vector<RobustVerdict> verdicts;  // parallel to the request list
};

/// Existence/uniqueness certificate plus the per-node balance verdicts.
/// balanced implies solvable and every requested verdict passing.
struct BalanceCertificate {
  bool solvable = false;
  bool balanced = false;
  StressSummary stress;
  std::vector<std::string> nodes;
  std::vector<NodeAssessment> assessments;  // parallel to nodes
};

/// Evaluate the solvability certificate first; when it fails the balance
/// checks are skipped and the certificate reports unsolvable.
BalanceCertificate certify(const NetworkModel& model, const LoadState& loads,
                           std::span<const std::string> critical_nodes,
                           std::span<const BalanceRequest> requests);

struct MinEpsOptions {
  double eps_lo = 1e-4;
  double eps_hi = 1.0 - 1e-4;
  double tol = 1e-4;
  int max_iter = 40;
};

/// Smallest tolerance at which `request`'s method certifies the bundle,
/// found by bisection (every method's verdict is monotone in eps).
/// nullopt when the method fails even at eps_hi.
std::optional<double> min_epsilon_for_disks(const DiskBundle& disks,
                                            const BalanceRequest& request,
                                            const MinEpsOptions& opts = {});

/// End-to-end variant: solvability, disks at the critical node, then the
/// bisection. Throws when the instance is unsolvable.
std::optional<double> min_epsilon(const NetworkModel& model, const LoadState& loads,
                                  std::string_view critical_node,
                                  const BalanceRequest& request,
                                  const MinEpsOptions& opts = {});

/// Pointwise unbalance of a solved voltage triple under one metric.
double true_unbalance(const VoltageTriple& v, Metric metric,
                      PvurVariant variant = PvurVariant::avg_deviation);

struct SweepEntry {
  int k = 0;
  Metric metric{};
  Method method{};
  PvurVariant variant = PvurVariant::avg_deviation;
  bool solvable = false;
  std::optional<double> min_eps;
  std::optional<double> true_value;
  std::string error;
};

struct SweepOptions {
  MinEpsOptions eps;
  SolveOptions solve;
};

/// Scenario sweep: for each k the generator yields the load increment
/// sigma(k); each row records the oracle ("true") unbalance from the
/// solved power flow and the smallest certified tolerance per requested
/// (metric, method). Per-scenario failures are recorded and the sweep
/// continues.
std::vector<SweepEntry> sweep(const NetworkModel& model, const LoadState& nominal,
                              const std::function<Eigen::VectorXcd(int)>& sigma_of_k,
                              int k_begin, int k_end,
                              std::string_view critical_node,
                              std::span<const BalanceRequest> requests,
                              const SweepOptions& opts = {});

}  // namespace balcert

#endif
