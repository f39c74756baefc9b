#ifndef BALCERT_SOLVABILITY_HPP
#define BALCERT_SOLVABILITY_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "balcert/netmodel.hpp"

namespace balcert {

/// Per-(node,phase) stress measures and the existence/uniqueness
/// certificate they induce. With Ztilde = diag^-1(v0) Zhat diag^-1(conj v0)
/// and row z of Ztilde:
///   eta   = z^T conj(sigma)            (incremental-load stress, complex)
///   xi    = sum_j |z_j| |S_j|          (total-load stress)
///   gamma = 2(xi + Re eta) - |eta|^2 - xi^2
/// The aggregates take maxima over all entries (|eta| for eta) and feed
///   delta = (1 - gamma)^2 - 4 xi^2 eta^2.
/// The certificate holds when gamma + 2 xi eta < 1 (strict) and
/// xi - eta <= 1; it guarantees a unique high-voltage solution with each
/// normalized voltage confined to a disk of relative radius `radius`.
struct StressSummary {
  Eigen::MatrixXcd scaled_impedance;  // Ztilde
  Eigen::VectorXcd eta;               // per PQ entry
  Eigen::VectorXd xi;
  Eigen::VectorXd gamma;

  double eta_max = 0.0;    // max |eta_i|
  double xi_max = 0.0;
  double gamma_max = 0.0;
  double delta = 0.0;

  bool feasible = false;
  std::optional<double> radius;  // r; set only when feasible
};

StressSummary compute_stress(const NetworkModel& model, const LoadState& loads);

/// Closed disk in the complex voltage plane.
struct Disk {
  Complex center;
  double radius = 0.0;
  bool degenerate = false;  // xi = 0 at this entry: the phase is a fixed point
};

/// Per-phase voltage disks of one critical node, in physical (per-unit)
/// coordinates: center (1 - eta) E v0 and radius r |E v0| xi.
struct DiskBundle {
  std::string node;
  std::array<Disk, 3> phase;  // indexed by Phase

  const Disk& at(Phase p) const { return phase[static_cast<int>(p)]; }
  Disk& at(Phase p) { return phase[static_cast<int>(p)]; }
};

/// Requires a feasible certificate and a three-phase critical node.
DiskBundle build_disks(const NetworkModel& model, const LoadState& loads,
                       const StressSummary& stress, std::string_view critical_node);

/// Construct a bundle directly from centers and radii (raw ingestion and
/// the comparison CLI bypass the network entirely).
DiskBundle make_disk_bundle(std::string node,
                            const std::array<Complex, 3>& centers,
                            const std::array<double, 3>& radii);

DiskBundle disk_bundle_from_json(const std::string& json_text);
std::string disk_bundle_to_json(const DiskBundle& bundle);

}  // namespace balcert

#endif
