#include "balcert/solvability.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace balcert {

using nlohmann::json;

StressSummary compute_stress(const NetworkModel& model, const LoadState& loads) {
  const int n = model.pq_count();
  if (loads.actual_power.size() != n)
    throw std::invalid_argument("stress: load state does not match the model");

  StressSummary s;
  const Eigen::VectorXcd v0_inv = loads.nominal_voltage.cwiseInverse();
  s.scaled_impedance = v0_inv.asDiagonal() * model.normalized_impedance *
                       loads.nominal_voltage.conjugate().cwiseInverse().asDiagonal();

  s.eta = s.scaled_impedance * loads.increment.conjugate();
  s.xi = s.scaled_impedance.cwiseAbs() * loads.actual_power.cwiseAbs();
  s.gamma.resize(n);
  for (int i = 0; i < n; ++i) {
    const double abs_eta = std::abs(s.eta[i]);
    s.gamma[i] = 2.0 * (s.xi[i] + s.eta[i].real()) - abs_eta * abs_eta - s.xi[i] * s.xi[i];
  }

  s.eta_max = s.eta.cwiseAbs().maxCoeff();
  s.xi_max = s.xi.maxCoeff();
  s.gamma_max = s.gamma.maxCoeff();
  s.delta = (1.0 - s.gamma_max) * (1.0 - s.gamma_max) -
            4.0 * s.xi_max * s.xi_max * s.eta_max * s.eta_max;

  s.feasible = (s.gamma_max + 2.0 * s.xi_max * s.eta_max < 1.0) &&
               (s.xi_max - s.eta_max <= 1.0);
  if (s.feasible) {
    double delta = s.delta;
    if (delta < 0.0) {
      if (delta < -1e-14)
        throw std::runtime_error("stress: negative discriminant under a feasible certificate");
      delta = 0.0;  // round-off clamp
    }
    if (s.xi_max > 0.0) {
      s.radius = std::sqrt((1.0 - s.gamma_max - std::sqrt(delta)) /
                           (2.0 * s.xi_max * s.xi_max));
    } else {
      s.radius = 0.0;
    }
  }
  return s;
}

DiskBundle build_disks(const NetworkModel& model, const LoadState& loads,
                       const StressSummary& stress, std::string_view critical_node) {
  if (!stress.feasible)
    throw std::domain_error("disks: the solvability certificate is infeasible");
  const std::array<int, 3> idx = model.three_phase_indices(critical_node);

  DiskBundle bundle;
  bundle.node = std::string(critical_node);
  for (int p = 0; p < 3; ++p) {
    const int i = idx[p];
    const Complex scale = model.no_load_voltage[i] * loads.nominal_voltage[i];
    Disk& d = bundle.phase[p];
    d.center = (1.0 - stress.eta[i]) * scale;
    d.radius = *stress.radius * std::abs(scale) * stress.xi[i];
    d.degenerate = stress.xi[i] == 0.0;
  }
  return bundle;
}

DiskBundle make_disk_bundle(std::string node, const std::array<Complex, 3>& centers,
                            const std::array<double, 3>& radii) {
  DiskBundle bundle;
  bundle.node = std::move(node);
  for (int p = 0; p < 3; ++p) {
    if (radii[p] < 0.0) throw std::invalid_argument("disk bundle: negative radius");
    bundle.phase[p] = Disk{centers[p], radii[p], radii[p] == 0.0};
  }
  return bundle;
}

DiskBundle disk_bundle_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("disk bundle: malformed JSON: ") + e.what());
  }
  std::array<Complex, 3> centers;
  std::array<double, 3> radii;
  const json& phases = doc.at("phases");
  for (int p = 0; p < 3; ++p) {
    const std::string key(1, phase_letter(static_cast<Phase>(p)));
    const json& jd = phases.at(key);
    const json& c = jd.at("center");
    centers[p] = Complex(c.at(0).get<double>(), c.at(1).get<double>());
    radii[p] = jd.at("radius").get<double>();
  }
  return make_disk_bundle(doc.value("node", std::string("")), centers, radii);
}

std::string disk_bundle_to_json(const DiskBundle& bundle) {
  json phases;
  for (int p = 0; p < 3; ++p) {
    const Disk& d = bundle.phase[p];
    phases[std::string(1, phase_letter(static_cast<Phase>(p)))] = {
        {"center", {d.center.real(), d.center.imag()}},
        {"radius", d.radius},
        {"degenerate", d.degenerate}};
  }
  return json{{"node", bundle.node}, {"phases", phases}}.dump(2);
}

}  // namespace balcert
