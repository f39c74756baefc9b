#ifndef BALCERT_NETMODEL_HPP
#define BALCERT_NETMODEL_HPP

#include <array>
#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace balcert {

using Complex = std::complex<double>;

enum class Phase : int { a = 0, b = 1, c = 2 };

char phase_letter(Phase p);
std::optional<Phase> phase_from_letter(char c);

enum class BusKind { slack, pq };

struct Bus {
  std::string id;
  std::vector<Phase> phases;  // sorted a < b < c
  BusKind kind = BusKind::pq;
  std::vector<Complex> voltage;  // slack only, aligned with phases
};

/// One (bus, phase) entry of the partitioned admittance ordering.
struct NodePhase {
  std::string bus;
  Phase phase = Phase::a;
};

/// Immutable network description: admittance partition (slack block G,
/// load block L), slack voltage, and the no-load normalization
/// quantities E and Zhat used by the fixed-point load-voltage map
///   v = 1 - Zhat diag^-1(conj v) conj S.
struct NetworkModel {
  std::vector<Bus> buses;
  std::vector<NodePhase> slack_entries;
  std::vector<NodePhase> pq_entries;

  Eigen::VectorXcd slack_voltage;  // V_G, aligned with slack_entries

  Eigen::MatrixXcd y_gg;
  Eigen::MatrixXcd y_gl;
  Eigen::MatrixXcd y_lg;
  Eigen::MatrixXcd y_ll;

  Eigen::VectorXcd no_load_voltage;        // E = -Y_LL^-1 Y_LG V_G
  Eigen::MatrixXcd normalized_impedance;   // Zhat = diag^-1(E) Y_LL^-1 diag^-1(conj E)

  std::optional<double> base_kva;  // declared power base for kW inputs

  int pq_count() const { return static_cast<int>(pq_entries.size()); }

  /// Index of (bus, phase) among the PQ entries, or -1 when absent.
  int pq_index(std::string_view bus, Phase p) const;

  /// PQ indices for all phases a,b,c of a bus; throws when the bus does
  /// not expose all three phases.
  std::array<int, 3> three_phase_indices(std::string_view bus) const;

  const Bus* find_bus(std::string_view id) const;
};

/// Parse a network document (JSON text). Accepts either a line/shunt
/// description or an explicit labelled admittance matrix; see README
/// for the schema.
NetworkModel load_network(const std::string& json_text);
NetworkModel load_network_file(const std::filesystem::path& path);

/// Nominal/actual load pair with the nominal normalized voltage.
struct LoadState {
  Eigen::VectorXcd nominal_power;    // S0, per PQ entry
  Eigen::VectorXcd actual_power;     // S
  Eigen::VectorXcd increment;        // sigma = S - S0
  Eigen::VectorXcd nominal_voltage;  // v0, fixed point of the load map at S0
};

/// Build a LoadState. When the nominal voltage is omitted it is set to 1
/// for a zero nominal load and solved by the fixed-point iteration
/// otherwise. Throws when the nominal pair fails its residual check.
LoadState make_load_state(const NetworkModel& model,
                          Eigen::VectorXcd nominal_power,
                          Eigen::VectorXcd actual_power,
                          std::optional<Eigen::VectorXcd> nominal_voltage = {});

/// Parse a load document into a per-PQ-entry power vector (per unit).
/// Keys are "bus.phase" labels; kW inputs are scaled by the network's
/// declared base.
Eigen::VectorXcd load_vector(const NetworkModel& model, const std::string& json_text);
Eigen::VectorXcd load_vector_file(const NetworkModel& model, const std::filesystem::path& path);

}  // namespace balcert

#endif
