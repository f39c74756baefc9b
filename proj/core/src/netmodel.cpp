#include "balcert/netmodel.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "balcert/powerflow.hpp"

namespace balcert {

using nlohmann::json;

char phase_letter(Phase p) { return static_cast<char>('a' + static_cast<int>(p)); }

std::optional<Phase> phase_from_letter(char c) {
  switch (c) {
    case 'a': return Phase::a;
    case 'b': return Phase::b;
    case 'c': return Phase::c;
    default: return std::nullopt;
  }
}

namespace {

constexpr double kResidualTol = 1e-10;
constexpr double kNominalResidualTol = 1e-8;

std::string id_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw std::invalid_argument("network: bus id must be a string or integer");
}

std::vector<Phase> parse_phases(const std::string& s) {
  std::set<Phase> seen;
  for (char c : s) {
    auto p = phase_from_letter(c);
    if (!p) throw std::invalid_argument("network: unknown phase letter '" + std::string(1, c) + "'");
    if (!seen.insert(*p).second)
      throw std::invalid_argument("network: duplicate phase letter in \"" + s + "\"");
  }
  if (seen.empty()) throw std::invalid_argument("network: empty phase set");
  return {seen.begin(), seen.end()};
}

Complex parse_complex(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument(std::string("network: ") + what + " must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

struct Indexer {
  // global (bus, phase) -> row, slack entries first, then PQ in document order
  std::map<std::pair<std::string, int>, int> pos;
  std::vector<NodePhase> order;

  int at(const std::string& bus, Phase p) const {
    auto it = pos.find({bus, static_cast<int>(p)});
    return it == pos.end() ? -1 : it->second;
  }
};

void add_block(Eigen::MatrixXcd& y, const Indexer& idx, const std::string& bus_row,
               const std::string& bus_col, const std::vector<Phase>& phases,
               const std::vector<std::vector<Complex>>& block, double sign) {
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const int r = idx.at(bus_row, phases[i]);
    for (std::size_t j = 0; j < phases.size(); ++j) {
      const int c = idx.at(bus_col, phases[j]);
      y(r, c) += sign * block[i][j];
    }
  }
}

std::vector<std::vector<Complex>> parse_square_block(const json& j, std::size_t n,
                                                     const char* what) {
  if (!j.is_array() || j.size() != n)
    throw std::invalid_argument(std::string("network: ") + what + " must be a " +
                                std::to_string(n) + "x" + std::to_string(n) + " block");
  std::vector<std::vector<Complex>> block(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n)
      throw std::invalid_argument(std::string("network: ragged ") + what + " block");
    for (std::size_t k = 0; k < n; ++k) block[i].push_back(parse_complex(j[i][k], what));
  }
  return block;
}

NodePhase parse_label(const std::string& label) {
  const auto dot = label.rfind('.');
  if (dot == std::string::npos || dot + 2 != label.size())
    throw std::invalid_argument("network: label \"" + label + "\" is not of the form bus.phase");
  const auto p = phase_from_letter(label[dot + 1]);
  if (!p) throw std::invalid_argument("network: bad phase in label \"" + label + "\"");
  return {label.substr(0, dot), *p};
}

void finalize(NetworkModel& m) {
  const auto n = m.pq_entries.size();
  if (n == 0) throw std::invalid_argument("network: no PQ entries");

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(m.y_ll);
  if (!lu.isInvertible())
    throw std::invalid_argument("network: Y_LL is singular");

  m.no_load_voltage = -lu.solve(m.y_lg * m.slack_voltage);
  for (Eigen::Index i = 0; i < m.no_load_voltage.size(); ++i) {
    if (std::abs(m.no_load_voltage[i]) < 1e-12)
      throw std::invalid_argument("network: zero entry in the no-load voltage E");
  }

  const Eigen::MatrixXcd y_ll_inv = lu.inverse();
  const Eigen::VectorXcd e_inv = m.no_load_voltage.cwiseInverse();
  m.normalized_impedance =
      e_inv.asDiagonal() * y_ll_inv * m.no_load_voltage.conjugate().cwiseInverse().asDiagonal();

  const double res_e =
      (m.y_ll * m.no_load_voltage + m.y_lg * m.slack_voltage).lpNorm<Eigen::Infinity>();
  const Eigen::MatrixXcd recon = m.no_load_voltage.asDiagonal() * m.normalized_impedance *
                                 m.no_load_voltage.conjugate().asDiagonal() * m.y_ll;
  const double res_z =
      (recon - Eigen::MatrixXcd::Identity(n, n)).lpNorm<Eigen::Infinity>();
  if (res_e > kResidualTol || res_z > kResidualTol)
    throw std::runtime_error("network: normalization residual exceeds tolerance");
}

}  // namespace

int NetworkModel::pq_index(std::string_view bus, Phase p) const {
  for (std::size_t i = 0; i < pq_entries.size(); ++i) {
    if (pq_entries[i].bus == bus && pq_entries[i].phase == p) return static_cast<int>(i);
  }
  return -1;
}

std::array<int, 3> NetworkModel::three_phase_indices(std::string_view bus) const {
  std::array<int, 3> idx{pq_index(bus, Phase::a), pq_index(bus, Phase::b),
                         pq_index(bus, Phase::c)};
  if (idx[0] < 0 || idx[1] < 0 || idx[2] < 0)
    throw std::invalid_argument("bus \"" + std::string(bus) +
                                "\" does not expose all three phases as PQ entries");
  return idx;
}

const Bus* NetworkModel::find_bus(std::string_view id) const {
  for (const Bus& b : buses)
    if (b.id == id) return &b;
  return nullptr;
}

NetworkModel load_network(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("network: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("buses") || !doc["buses"].is_array())
    throw std::invalid_argument("network: missing \"buses\" array");

  NetworkModel m;
  if (doc.contains("base_kva")) m.base_kva = doc["base_kva"].get<double>();

  int slack_count = 0;
  std::string slack_id;
  for (const json& jb : doc["buses"]) {
    Bus b;
    b.id = id_of(jb.at("id"));
    if (m.find_bus(b.id)) throw std::invalid_argument("network: duplicate bus id " + b.id);
    b.phases = parse_phases(jb.value("phases", std::string("abc")));
    const std::string kind = jb.value("kind", std::string("pq"));
    if (kind == "slack") {
      b.kind = BusKind::slack;
      ++slack_count;
      slack_id = b.id;
      const json& v = jb.at("voltage");
      if (!v.is_array() || v.size() != b.phases.size())
        throw std::invalid_argument("network: slack voltage must list one [re, im] per phase");
      for (const json& ve : v) b.voltage.push_back(parse_complex(ve, "voltage"));
    } else if (kind == "pq") {
      b.kind = BusKind::pq;
    } else {
      throw std::invalid_argument("network: unknown bus kind \"" + kind + "\"");
    }
    m.buses.push_back(std::move(b));
  }
  if (slack_count != 1)
    throw std::invalid_argument("network: expected exactly one slack bus, found " +
                                std::to_string(slack_count));

  Indexer idx;
  auto index_bus = [&](const Bus& b) {
    for (Phase p : b.phases) {
      idx.pos[{b.id, static_cast<int>(p)}] = static_cast<int>(idx.order.size());
      idx.order.push_back({b.id, p});
    }
  };
  for (const Bus& b : m.buses)
    if (b.kind == BusKind::slack) index_bus(b);
  const int n_slack = static_cast<int>(idx.order.size());
  for (const Bus& b : m.buses)
    if (b.kind == BusKind::pq) index_bus(b);
  const int n_total = static_cast<int>(idx.order.size());
  const int n_pq = n_total - n_slack;

  m.slack_entries.assign(idx.order.begin(), idx.order.begin() + n_slack);
  m.pq_entries.assign(idx.order.begin() + n_slack, idx.order.end());

  const Bus* slack = m.find_bus(slack_id);
  m.slack_voltage.resize(n_slack);
  for (int i = 0; i < n_slack; ++i) m.slack_voltage[i] = slack->voltage[i];

  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n_total, n_total);

  const bool has_raw = doc.contains("y_matrix");
  const bool has_lines = doc.contains("lines");
  if (has_raw == has_lines)
    throw std::invalid_argument("network: provide exactly one of \"lines\" or \"y_matrix\"");

  if (has_raw) {
    const json& jy = doc["y_matrix"];
    const json& jidx = jy.at("index");
    if (static_cast<int>(jidx.size()) != n_total)
      throw std::invalid_argument("network: y_matrix index size does not match bus phases");
    std::vector<int> to_global;
    std::set<int> used;
    for (const json& jl : jidx) {
      const NodePhase np = parse_label(jl.get<std::string>());
      const int g = idx.at(np.bus, np.phase);
      if (g < 0)
        throw std::invalid_argument("network: y_matrix label references unknown entry");
      if (!used.insert(g).second)
        throw std::invalid_argument("network: duplicate y_matrix label");
      to_global.push_back(g);
    }
    const auto entries = parse_square_block(jy.at("entries"), n_total, "y_matrix entries");
    for (int i = 0; i < n_total; ++i)
      for (int j = 0; j < n_total; ++j) y(to_global[i], to_global[j]) = entries[i][j];
  } else {
    for (const json& jl : doc["lines"]) {
      const std::string from = id_of(jl.at("from"));
      const std::string to = id_of(jl.at("to"));
      const Bus* bf = m.find_bus(from);
      const Bus* bt = m.find_bus(to);
      if (!bf || !bt)
        throw std::invalid_argument("network: line endpoint \"" + (bf ? to : from) +
                                    "\" is not a bus");
      std::vector<Phase> phases;
      if (jl.contains("phases")) {
        phases = parse_phases(jl["phases"].get<std::string>());
      } else {
        std::set_intersection(bf->phases.begin(), bf->phases.end(), bt->phases.begin(),
                              bt->phases.end(), std::back_inserter(phases));
      }
      for (Phase p : phases) {
        if (idx.at(from, p) < 0 || idx.at(to, p) < 0)
          throw std::invalid_argument("network: line phase missing at an endpoint");
      }
      const auto block = parse_square_block(jl.at("y_block"), phases.size(), "line y_block");
      add_block(y, idx, from, from, phases, block, 1.0);
      add_block(y, idx, to, to, phases, block, 1.0);
      add_block(y, idx, from, to, phases, block, -1.0);
      add_block(y, idx, to, from, phases, block, -1.0);
    }
    if (doc.contains("shunts")) {
      for (const json& js : doc["shunts"]) {
        const std::string at = id_of(js.at("bus"));
        const Bus* b = m.find_bus(at);
        if (!b) throw std::invalid_argument("network: shunt bus \"" + at + "\" is not a bus");
        std::vector<Phase> phases =
            js.contains("phases") ? parse_phases(js["phases"].get<std::string>()) : b->phases;
        const auto block = parse_square_block(js.at("y_block"), phases.size(), "shunt y_block");
        add_block(y, idx, at, at, phases, block, 1.0);
      }
    }
  }

  m.y_gg = y.topLeftCorner(n_slack, n_slack);
  m.y_gl = y.topRightCorner(n_slack, n_pq);
  m.y_lg = y.bottomLeftCorner(n_pq, n_slack);
  m.y_ll = y.bottomRightCorner(n_pq, n_pq);

  finalize(m);
  return m;
}

NetworkModel load_network_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open network file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_network(ss.str());
}

LoadState make_load_state(const NetworkModel& model, Eigen::VectorXcd nominal_power,
                          Eigen::VectorXcd actual_power,
                          std::optional<Eigen::VectorXcd> nominal_voltage) {
  const int n = model.pq_count();
  if (nominal_power.size() != n || actual_power.size() != n)
    throw std::invalid_argument("load state: vector size does not match the PQ entries");

  LoadState ls;
  ls.nominal_power = std::move(nominal_power);
  ls.actual_power = std::move(actual_power);
  ls.increment = ls.actual_power - ls.nominal_power;

  if (nominal_voltage) {
    if (nominal_voltage->size() != n)
      throw std::invalid_argument("load state: nominal voltage size mismatch");
    ls.nominal_voltage = std::move(*nominal_voltage);
  } else if (ls.nominal_power.isZero(0.0)) {
    ls.nominal_voltage = Eigen::VectorXcd::Ones(n);
  } else {
    const PowerFlowResult pf = solve_fixed_point(
        model, ls.nominal_power, Eigen::VectorXcd::Ones(n), SolveOptions{});
    if (!pf.converged())
      throw std::runtime_error("load state: power flow for the nominal point did not converge");
    ls.nominal_voltage = pf.v;
  }

  for (Eigen::Index i = 0; i < ls.nominal_voltage.size(); ++i) {
    if (std::abs(ls.nominal_voltage[i]) < 1e-12)
      throw std::invalid_argument("load state: zero entry in the nominal voltage");
  }

  const Eigen::VectorXcd rhs =
      Eigen::VectorXcd::Ones(n) -
      model.normalized_impedance *
          ls.nominal_voltage.conjugate().cwiseInverse().cwiseProduct(
              ls.nominal_power.conjugate());
  const double res = (ls.nominal_voltage - rhs).lpNorm<Eigen::Infinity>();
  if (res > kNominalResidualTol)
    throw std::invalid_argument("load state: nominal pair residual " + std::to_string(res) +
                                " exceeds tolerance");
  return ls;
}

Eigen::VectorXcd load_vector(const NetworkModel& model, const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("loads: malformed JSON: ") + e.what());
  }
  const std::string unit = doc.value("unit", std::string("pu"));
  double scale = 1.0;
  if (unit == "kw") {
    if (!model.base_kva)
      throw std::invalid_argument("loads: kW inputs need a base_kva in the network document");
    scale = 1.0 / *model.base_kva;
  } else if (unit != "pu") {
    throw std::invalid_argument("loads: unknown unit \"" + unit + "\"");
  }

  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(model.pq_count());
  if (!doc.contains("loads") || !doc["loads"].is_object())
    throw std::invalid_argument("loads: missing \"loads\" object");
  for (const auto& [label, value] : doc["loads"].items()) {
    const NodePhase np = parse_label(label);
    const int i = model.pq_index(np.bus, np.phase);
    if (i < 0)
      throw std::invalid_argument("loads: label \"" + label + "\" is not a PQ entry");
    s[i] = scale * parse_complex(value, "load");
  }
  return s;
}

Eigen::VectorXcd load_vector_file(const NetworkModel& model,
                                  const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open load file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_vector(model, ss.str());
}

}  // namespace balcert
