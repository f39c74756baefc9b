#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "balcert/netmodel.hpp"
#include "balcert/powerflow.hpp"

using namespace balcert;
using Cx = std::complex<double>;

namespace {

const char* kTwoBus = R"({
  "buses": [
    {"id": "g", "phases": "a", "kind": "slack", "voltage": [[1.0, 0.0]]},
    {"id": "l", "phases": "a", "kind": "pq"}
  ],
  "lines": [{"from": "g", "to": "l", "phases": "a", "y_block": [[[1.0, 0.0]]]}]
})";

std::string two_bus_with(double vre, double vim, double yre = 1.0, double yim = 0.0) {
  std::ostringstream ss;
  ss.precision(17);
  ss << R"({"buses": [{"id": "g", "phases": "a", "kind": "slack", "voltage": [[)" << vre
     << ", " << vim << R"(]]}, {"id": "l", "phases": "a", "kind": "pq"}],)"
     << R"("lines": [{"from": "g", "to": "l", "phases": "a", "y_block": [[[)" << yre << ", "
     << yim << "]]]}]}";
  return ss.str();
}

std::string fixture(const char* name) {
  return std::string(BALCERT_TEST_DATA_DIR) + "/" + name;
}

// Independent assembly of the bundled feeder: same line data, different
// code path (full-matrix loops + explicit dense inverse).
struct FeederOracle {
  Eigen::MatrixXcd y{15, 15};
  Eigen::VectorXcd e{12};
  Eigen::MatrixXcd zhat{12, 12};

  FeederOracle() {
    Eigen::Matrix3cd z;
    z << Cx(0.0347, 0.0911), Cx(0.0116, 0.0421), Cx(0.0114, 0.0357),
         Cx(0.0116, 0.0421), Cx(0.0352, 0.0888), Cx(0.0118, 0.0389),
         Cx(0.0114, 0.0357), Cx(0.0118, 0.0389), Cx(0.0349, 0.0902);
    const int from[4] = {0, 1, 2, 2};
    const int to[4] = {1, 2, 3, 4};
    const double len[4] = {1.0, 0.8, 0.6, 1.0};

    y.setZero();
    for (int l = 0; l < 4; ++l) {
      const Eigen::Matrix3cd yb = (z * len[l]).inverse();
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          y(3 * from[l] + i, 3 * from[l] + j) += yb(i, j);
          y(3 * to[l] + i, 3 * to[l] + j) += yb(i, j);
          y(3 * from[l] + i, 3 * to[l] + j) -= yb(i, j);
          y(3 * to[l] + i, 3 * from[l] + j) -= yb(i, j);
        }
      }
    }

    Eigen::Vector3cd vg;
    vg << Cx(1.0, 0.0), Cx(-0.5, -std::sqrt(3.0) / 2.0), Cx(-0.5, std::sqrt(3.0) / 2.0);
    const Eigen::MatrixXcd y_ll = y.bottomRightCorner(12, 12);
    const Eigen::MatrixXcd y_lg = y.bottomLeftCorner(12, 3);
    const Eigen::MatrixXcd y_ll_inv = Eigen::FullPivLU<Eigen::MatrixXcd>(y_ll).inverse();
    e = -y_ll_inv * y_lg * vg;
    zhat = e.cwiseInverse().asDiagonal() * y_ll_inv *
           e.conjugate().cwiseInverse().asDiagonal();
  }
};

}  // namespace

TEST_CASE("two-bus single-phase basics") {
  const NetworkModel m = load_network(kTwoBus);
  REQUIRE(m.pq_count() == 1);
  CHECK(m.slack_entries.size() == 1);
  CHECK(m.pq_entries[0].bus == "l");
  CHECK(std::abs(m.y_ll(0, 0) - Cx(1, 0)) < 1e-15);
  CHECK(std::abs(m.y_lg(0, 0) - Cx(-1, 0)) < 1e-15);
  CHECK(std::abs(m.no_load_voltage[0] - Cx(1, 0)) < 1e-15);
  CHECK(std::abs(m.normalized_impedance(0, 0) - Cx(1, 0)) < 1e-15);
}

TEST_CASE("rotated slack leaves the normalized impedance real") {
  const double ang = 30.0 * 3.14159265358979 / 180.0;
  const NetworkModel m =
      load_network(two_bus_with(std::cos(ang), std::sin(ang)));
  CHECK(std::abs(m.no_load_voltage[0] - std::polar(1.0, ang)) < 1e-14);
  CHECK(std::abs(m.normalized_impedance(0, 0) - Cx(1, 0)) < 1e-14);
}

TEST_CASE("bundled feeder matches the dense-inverse oracle") {
  const NetworkModel m = load_network_file(fixture("feeder5.json"));
  REQUIRE(m.pq_count() == 12);

  const FeederOracle oracle;
  CHECK((m.no_load_voltage - oracle.e).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((m.normalized_impedance - oracle.zhat).lpNorm<Eigen::Infinity>() < 1e-10);

  // frozen spot values from the oracle
  const int i4a = m.pq_index("4", Phase::a);
  const int i5c = m.pq_index("5", Phase::c);
  REQUIRE(i4a >= 0);
  REQUIRE(i5c >= 0);
  CHECK(std::abs(m.no_load_voltage[i4a] - Cx(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(m.no_load_voltage[i5c] - Cx(-0.5, 0.8660254037844386)) < 1e-12);
  CHECK(std::abs(m.normalized_impedance(i4a, i4a) - Cx(0.08328, 0.21864)) < 1e-12);
  CHECK(std::abs(m.normalized_impedance(i4a, i5c) -
                 Cx(-0.06591079244718785, -0.01435915871434325)) < 1e-12);
}

TEST_CASE("reconstruction residual of E") {
  const NetworkModel m = load_network_file(fixture("feeder5.json"));
  const double res =
      (m.no_load_voltage +
       Eigen::FullPivLU<Eigen::MatrixXcd>(m.y_ll).solve(m.y_lg * m.slack_voltage))
          .lpNorm<Eigen::Infinity>();
  CHECK(res < 1e-10);
}

TEST_CASE("raw admittance ingestion with scrambled labels") {
  const NetworkModel base = load_network_file(fixture("feeder5.json"));

  // reassemble the full matrix from the partition, emit labels in reverse
  const int ns = 3, np = 12, n = 15;
  Eigen::MatrixXcd full(n, n);
  full.topLeftCorner(ns, ns) = base.y_gg;
  full.topRightCorner(ns, np) = base.y_gl;
  full.bottomLeftCorner(np, ns) = base.y_lg;
  full.bottomRightCorner(np, np) = base.y_ll;

  std::vector<std::string> labels;
  for (const NodePhase& s : base.slack_entries)
    labels.push_back(s.bus + "." + phase_letter(s.phase));
  for (const NodePhase& s : base.pq_entries)
    labels.push_back(s.bus + "." + phase_letter(s.phase));

  std::ostringstream ss;
  ss << R"({"base_kva": 1000.0, "buses": [)"
     << R"({"id": "1", "phases": "abc", "kind": "slack", "voltage": )"
     << R"([[1.0, 0.0], [-0.5, -0.8660254037844386], [-0.5, 0.8660254037844386]]},)";
  for (int b = 2; b <= 5; ++b)
    ss << R"({"id": ")" << b << R"(", "phases": "abc", "kind": "pq"})" << (b < 5 ? "," : "");
  ss << R"(], "y_matrix": {"index": [)";
  for (int i = n - 1; i >= 0; --i) ss << '"' << labels[i] << '"' << (i > 0 ? "," : "");
  ss << "], \"entries\": [";
  ss.precision(17);
  for (int i = n - 1; i >= 0; --i) {
    ss << "[";
    for (int j = n - 1; j >= 0; --j) {
      ss << "[" << full(i, j).real() << "," << full(i, j).imag() << "]" << (j > 0 ? "," : "");
    }
    ss << "]" << (i > 0 ? "," : "");
  }
  ss << "]}}";

  const NetworkModel raw = load_network(ss.str());
  CHECK((raw.no_load_voltage - base.no_load_voltage).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((raw.normalized_impedance - base.normalized_impedance).lpNorm<Eigen::Infinity>() <
        1e-12);
}

TEST_CASE("permutation invariance of bus order") {
  std::ifstream in(fixture("feeder5.json"));
  std::stringstream buf;
  buf << in.rdbuf();
  const NetworkModel a = load_network(buf.str());

  // swap buses 4 and 5 in the document order
  std::string text = buf.str();
  const auto p4 = text.find(R"({"id": "4")");
  const auto p5 = text.find(R"({"id": "5")");
  REQUIRE(p4 != std::string::npos);
  REQUIRE(p5 != std::string::npos);
  std::string swapped = text;
  swapped.replace(p4 + 8, 1, "5");
  swapped.replace(p5 + 8, 1, "4");
  const NetworkModel b = load_network(swapped);

  for (int i = 0; i < a.pq_count(); ++i) {
    const NodePhase& np = a.pq_entries[i];
    const int j = b.pq_index(np.bus, np.phase);
    REQUIRE(j >= 0);
    CHECK(std::abs(a.no_load_voltage[i] - b.no_load_voltage[j]) < 1e-12);
    for (int i2 = 0; i2 < a.pq_count(); ++i2) {
      const int j2 = b.pq_index(a.pq_entries[i2].bus, a.pq_entries[i2].phase);
      CHECK(std::abs(a.normalized_impedance(i, i2) - b.normalized_impedance(j, j2)) < 1e-12);
    }
  }
}

TEST_CASE("admittance scaling moves Zhat inversely and leaves E fixed") {
  const NetworkModel m1 = load_network(two_bus_with(1.0, 0.0, 2.0, -1.0));
  const double s = 3.5;
  const NetworkModel m2 = load_network(two_bus_with(1.0, 0.0, s * 2.0, s * -1.0));
  CHECK(std::abs(m1.no_load_voltage[0] - m2.no_load_voltage[0]) < 1e-14);
  CHECK(std::abs(m1.normalized_impedance(0, 0) - s * m2.normalized_impedance(0, 0)) < 1e-14);
}

TEST_CASE("rejects malformed networks") {
  CHECK_THROWS_AS(load_network("{not json"), std::invalid_argument);

  // no slack
  CHECK_THROWS_AS(load_network(R"({"buses": [{"id": "l", "phases": "a", "kind": "pq"}],
    "lines": []})"),
                  std::invalid_argument);

  // two slacks
  CHECK_THROWS_AS(load_network(R"({"buses": [
      {"id": "g", "phases": "a", "kind": "slack", "voltage": [[1, 0]]},
      {"id": "h", "phases": "a", "kind": "slack", "voltage": [[1, 0]]},
      {"id": "l", "phases": "a", "kind": "pq"}],
    "lines": [{"from": "g", "to": "l", "y_block": [[[1, 0]]]}]})"),
                  std::invalid_argument);

  // dangling line endpoint
  CHECK_THROWS_AS(load_network(R"({"buses": [
      {"id": "g", "phases": "a", "kind": "slack", "voltage": [[1, 0]]},
      {"id": "l", "phases": "a", "kind": "pq"}],
    "lines": [{"from": "g", "to": "nowhere", "y_block": [[[1, 0]]]}]})"),
                  std::invalid_argument);

  // isolated PQ bus: Y_LL singular
  CHECK_THROWS_AS(load_network(R"({"buses": [
      {"id": "g", "phases": "a", "kind": "slack", "voltage": [[1, 0]]},
      {"id": "l", "phases": "a", "kind": "pq"}],
    "lines": [{"from": "g", "to": "l", "y_block": [[[0, 0]]]}]})"),
                  std::invalid_argument);

  // zero slack voltage forces a zero entry in E
  CHECK_THROWS_AS(load_network(two_bus_with(0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("two-phase lateral collects only the existing phases") {
  const char* doc = R"({
    "buses": [
      {"id": "g", "phases": "abc", "kind": "slack",
       "voltage": [[1.0, 0.0], [-0.5, -0.8660254037844386], [-0.5, 0.8660254037844386]]},
      {"id": "m", "phases": "abc", "kind": "pq"},
      {"id": "lat", "phases": "bc", "kind": "pq"}
    ],
    "lines": [
      {"from": "g", "to": "m", "phases": "abc", "y_block": [
        [[8.0, -16.0], [0.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [8.0, -16.0], [0.0, 0.0]],
        [[0.0, 0.0], [0.0, 0.0], [8.0, -16.0]]]},
      {"from": "m", "to": "lat", "y_block": [
        [[10.0, -20.0], [0.0, 0.0]],
        [[0.0, 0.0], [10.0, -20.0]]]}
    ]
  })";
  const NetworkModel m = load_network(doc);
  CHECK(m.pq_count() == 5);  // 3 phases at "m" + 2 at "lat"
  CHECK(m.pq_index("lat", Phase::a) == -1);
  CHECK(m.pq_index("lat", Phase::b) >= 0);
  CHECK_THROWS_AS(m.three_phase_indices("lat"), std::invalid_argument);

  // the lateral default phase set is the endpoint intersection (b, c)
  const int ib = m.pq_index("lat", Phase::b);
  CHECK(std::abs(m.no_load_voltage[ib] - Cx(-0.5, -0.8660254037844386)) < 1e-12);
}

TEST_CASE("shunt admittance enters the diagonal") {
  const char* with_shunt = R"({
    "buses": [
      {"id": "g", "phases": "a", "kind": "slack", "voltage": [[1.0, 0.0]]},
      {"id": "l", "phases": "a", "kind": "pq"}
    ],
    "lines": [{"from": "g", "to": "l", "phases": "a", "y_block": [[[1.0, 0.0]]]}],
    "shunts": [{"bus": "l", "phases": "a", "y_block": [[[0.5, 0.0]]]}]
  })";
  const NetworkModel m = load_network(with_shunt);
  CHECK(std::abs(m.y_ll(0, 0) - Cx(1.5, 0.0)) < 1e-15);
  // E = -(Y_LL)^-1 Y_LG V_G = 1/1.5
  CHECK(std::abs(m.no_load_voltage[0] - Cx(1.0 / 1.5, 0.0)) < 1e-14);
}

TEST_CASE("load state construction") {
  const NetworkModel m = load_network_file(fixture("feeder5.json"));
  const int n = m.pq_count();

  SUBCASE("trivial nominal pair") {
    const LoadState ls = make_load_state(m, Eigen::VectorXcd::Zero(n),
                                         Eigen::VectorXcd::Zero(n));
    CHECK((ls.nominal_voltage - Eigen::VectorXcd::Ones(n)).norm() == 0.0);
    CHECK(ls.increment.norm() == 0.0);
  }

  SUBCASE("sigma is the exact difference") {
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(n);
    s[0] = Cx(0.02, 0.01);
    const LoadState ls = make_load_state(m, Eigen::VectorXcd::Zero(n), s);
    CHECK(ls.increment == s);
    CHECK((ls.nominal_voltage - Eigen::VectorXcd::Ones(n)).norm() == 0.0);
  }

  SUBCASE("nominal point is solved and satisfies its residual") {
    const Eigen::VectorXcd s0 = load_vector_file(m, fixture("loads_nominal.json"));
    const LoadState ls = make_load_state(m, s0, s0);
    const Eigen::VectorXcd rhs =
        Eigen::VectorXcd::Ones(n) -
        m.normalized_impedance * ls.nominal_voltage.conjugate().cwiseInverse().cwiseProduct(
                                     ls.nominal_power.conjugate());
    CHECK((ls.nominal_voltage - rhs).lpNorm<Eigen::Infinity>() < 1e-8);
    // frozen from the dev solve of the fixture nominal point
    const int i4a = m.pq_index("4", Phase::a);
    CHECK(std::abs(ls.nominal_voltage[i4a] -
                   Cx(0.9966599020183813, -0.005939267092613944)) < 1e-9);
  }

  SUBCASE("explicit nominal voltage is validated") {
    Eigen::VectorXcd bogus = Eigen::VectorXcd::Ones(n) * Cx(0.2, 0.0);
    const Eigen::VectorXcd s0 = load_vector_file(m, fixture("loads_nominal.json"));
    CHECK_THROWS_AS(make_load_state(m, s0, s0, bogus), std::invalid_argument);
  }

  SUBCASE("size mismatch is rejected") {
    CHECK_THROWS_AS(make_load_state(m, Eigen::VectorXcd::Zero(3), Eigen::VectorXcd::Zero(3)),
                    std::invalid_argument);
  }
}

TEST_CASE("truncated documents throw instead of crashing") {
  std::ifstream in(fixture("feeder5.json"));
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  for (std::size_t len = 0; len < text.size(); len += 97) {
    CHECK_THROWS_AS(load_network(text.substr(0, len)), std::invalid_argument);
  }
}

TEST_CASE("load vector parsing") {
  const NetworkModel m = load_network_file(fixture("feeder5.json"));

  SUBCASE("kw scaling against the declared base") {
    const Eigen::VectorXcd s = load_vector_file(m, fixture("loads_nominal.json"));
    CHECK(std::abs(s[m.pq_index("4", Phase::b)] - Cx(0.01, 0.0)) < 1e-15);
    CHECK(std::abs(s[m.pq_index("5", Phase::a)] - Cx(0.05, 0.0)) < 1e-15);
    CHECK(std::abs(s[m.pq_index("2", Phase::a)]) == 0.0);
  }

  SUBCASE("per-unit passthrough") {
    const Eigen::VectorXcd s =
        load_vector(m, R"({"unit": "pu", "loads": {"3.b": [0.2, -0.1]}})");
    CHECK(std::abs(s[m.pq_index("3", Phase::b)] - Cx(0.2, -0.1)) < 1e-15);
  }

  SUBCASE("unknown label is rejected") {
    CHECK_THROWS_AS(load_vector(m, R"({"loads": {"9.a": [1, 0]}})"), std::invalid_argument);
    CHECK_THROWS_AS(load_vector(m, R"({"loads": {"1.a": [1, 0]}})"), std::invalid_argument);
  }
}
