#include "cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "balcert/certification.hpp"
#include "balcert/netmodel.hpp"
#include "balcert/powerflow.hpp"
#include "balcert/robustcert.hpp"
#include "balcert/solvability.hpp"
#include "balcert/unbalance.hpp"

namespace balcert {

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFail = 2;  // valid computation, failing verdict

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

struct OutputTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const OutputTable& t) {
  std::ostringstream out;
  out << "# balcert " << kVersion << "\n";
  for (const auto& [k, v] : t.meta) out << "# " << k << "=" << v << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    out << t.columns[i] << (i + 1 < t.columns.size() ? "," : "");
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
  return out.str();
}

std::string render_json(const OutputTable& t) {
  nlohmann::json meta = nlohmann::json::object();
  meta["tool"] = std::string("balcert ") + kVersion;
  for (const auto& [k, v] : t.meta) meta[k] = v;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i)
      r[t.columns[i]] = row[i];
    rows.push_back(std::move(r));
  }
  return nlohmann::json{{"meta", meta}, {"columns", t.columns}, {"rows", rows}}.dump(2) +
         "\n";
}

// Artifacts land atomically: full render to a sibling temp file, then rename.
void emit(const OutputTable& t, const std::string& path, const std::string& format) {
  const std::string body = format == "json" ? render_json(t) : render_csv(t);
  if (path.empty()) {
    std::cout << body;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target = fs::absolute(path);
  const fs::path tmp =
      target.parent_path() /
      (target.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file " + tmp.string());
    out << body;
  }
  fs::rename(tmp, target);
}

Metric parse_metric(const std::string& s, PvurVariant& variant) {
  if (s == "pvur") return Metric::pvur;
  if (s == "pvur-maxmin") {
    variant = PvurVariant::max_minus_min;
    return Metric::pvur;
  }
  if (s == "lvur") return Metric::lvur;
  if (s == "vuf-n") return Metric::vuf_negative;
  if (s == "vuf-0") return Metric::vuf_zero;
  throw CLI::ValidationError("metric", "unknown metric \"" + s + "\"");
}

Method parse_method(const std::string& s) {
  if (s == "closed") return Method::closed_form;
  if (s == "line-bound") return Method::line_bound;
  if (s == "mag-bound") return Method::magnitude_bound;
  if (s == "bound") return Method::bound;
  if (s == "polytope") return Method::polytope;
  if (s == "lgr") return Method::lgr;
  throw CLI::ValidationError("method", "unknown method \"" + s + "\"");
}

std::string metric_name(const BalanceRequest& r) {
  if (r.metric == Metric::pvur && r.variant == PvurVariant::max_minus_min)
    return "pvur-maxmin";
  return to_string(r.metric);
}

// "metric:method[:eps]"
BalanceRequest parse_check(const std::string& spec, std::optional<double> default_eps,
                           int polygon_m) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 2 || parts.size() > 3)
    throw CLI::ValidationError("check", "expected metric:method[:eps], got \"" + spec + "\"");

  BalanceRequest r;
  r.metric = parse_metric(parts[0], r.variant);
  r.method = parse_method(parts[1]);
  r.polygon_m = polygon_m;
  if (parts.size() == 3)
    r.epsilon = std::stod(parts[2]);
  else if (default_eps)
    r.epsilon = *default_eps;
  else
    throw CLI::ValidationError("check", "no tolerance given for \"" + spec + "\"");
  if (auto err = validate_request(r.metric, r.method))
    throw CLI::ValidationError("check", *err);
  if (!(r.epsilon > 0.0 && r.epsilon < 1.0))
    throw CLI::ValidationError("check", "eps must lie in (0, 1)");
  return r;
}

struct NetworkArgs {
  std::string network_path;
  std::string loads_path;
  std::string nominal_path;

  NetworkModel model;
  LoadState loads;

  void add_options(CLI::App* cmd, bool loads_required = true) {
    cmd->add_option("--network", network_path, "network JSON document")
        ->required()
        ->check(CLI::ExistingFile);
    auto* lo = cmd->add_option("--loads", loads_path, "actual load JSON document")
                   ->check(CLI::ExistingFile);
    if (loads_required) lo->required();
    cmd->add_option("--nominal-loads", nominal_path,
                    "nominal load JSON document (default: zero loads)")
        ->check(CLI::ExistingFile);
  }

  void materialize() {
    model = load_network_file(network_path);
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(model.pq_count());
    const Eigen::VectorXcd s0 =
        nominal_path.empty() ? zero : load_vector_file(model, nominal_path);
    const Eigen::VectorXcd s = loads_path.empty() ? s0 : load_vector_file(model, loads_path);
    loads = make_load_state(model, s0, s);
  }
};

// ---- subcommand bodies ---------------------------------------------------

int cmd_pf(NetworkArgs& net, double tol, int max_iter, const std::string& out,
           const std::string& format) {
  net.materialize();
  const PowerFlowResult r = solve_fixed_point(net.model, net.loads, {tol, max_iter, 10.0});

  OutputTable t;
  t.meta.emplace_back("command", "pf");
  t.meta.emplace_back("network", net.network_path);
  t.meta.emplace_back("status", to_string(r.status));
  t.meta.emplace_back("iterations", std::to_string(r.iterations));
  t.meta.emplace_back("residual", fmt(r.residual));
  t.columns = {"bus", "phase", "v_re", "v_im", "v_mag", "v_deg"};
  for (int i = 0; i < net.model.pq_count(); ++i) {
    const NodePhase& np = net.model.pq_entries[i];
    const Complex v = r.voltage[i];
    t.rows.push_back({np.bus, std::string(1, phase_letter(np.phase)), fmt(v.real()),
                      fmt(v.imag()), fmt(std::abs(v)),
                      fmt(std::arg(v) * 180.0 / 3.14159265358979323846)});
  }
  emit(t, out, format);
  return r.converged() ? kExitOk : kExitFail;
}

int cmd_solvability(NetworkArgs& net, const std::string& out, const std::string& format) {
  net.materialize();
  const StressSummary s = compute_stress(net.model, net.loads);

  OutputTable t;
  t.meta.emplace_back("command", "solvability");
  t.meta.emplace_back("network", net.network_path);
  t.meta.emplace_back("feasible", s.feasible ? "true" : "false");
  t.meta.emplace_back("delta", fmt(s.delta));
  if (s.radius) t.meta.emplace_back("r", fmt(*s.radius));
  t.columns = {"bus", "phase", "eta_re", "eta_im", "eta_abs", "xi", "gamma"};
  for (int i = 0; i < net.model.pq_count(); ++i) {
    const NodePhase& np = net.model.pq_entries[i];
    t.rows.push_back({np.bus, std::string(1, phase_letter(np.phase)), fmt(s.eta[i].real()),
                      fmt(s.eta[i].imag()), fmt(std::abs(s.eta[i])), fmt(s.xi[i]),
                      fmt(s.gamma[i])});
  }
  t.rows.push_back(
      {"aggregate", "max", "", "", fmt(s.eta_max), fmt(s.xi_max), fmt(s.gamma_max)});
  emit(t, out, format);
  return s.feasible ? kExitOk : kExitFail;
}

int cmd_disks(NetworkArgs& net, const std::vector<std::string>& nodes,
              const std::string& out, const std::string& format) {
  net.materialize();
  const StressSummary s = compute_stress(net.model, net.loads);

  OutputTable t;
  t.meta.emplace_back("command", "disks");
  t.meta.emplace_back("network", net.network_path);
  t.meta.emplace_back("feasible", s.feasible ? "true" : "false");
  t.columns = {"node", "phase", "center_re", "center_im", "radius", "degenerate"};
  if (s.feasible) {
    for (const std::string& node : nodes) {
      const DiskBundle b = build_disks(net.model, net.loads, s, node);
      for (int p = 0; p < 3; ++p) {
        const Disk& d = b.phase[p];
        t.rows.push_back({node, std::string(1, phase_letter(static_cast<Phase>(p))),
                          fmt(d.center.real()), fmt(d.center.imag()), fmt(d.radius),
                          d.degenerate ? "true" : "false"});
      }
    }
  }
  emit(t, out, format);
  return s.feasible ? kExitOk : kExitFail;
}

int cmd_metrics(const std::string& triple_path, const std::string& out,
                const std::string& format) {
  std::ifstream in(triple_path);
  if (!in) throw std::invalid_argument("cannot open triple file " + triple_path);
  nlohmann::json doc;
  in >> doc;
  VoltageTriple v;
  auto get = [&](const char* key) {
    const auto& j = doc.at(key);
    return Complex(j.at(0).get<double>(), j.at(1).get<double>());
  };
  v.a = get("a");
  v.b = get("b");
  v.c = get("c");

  OutputTable t;
  t.meta.emplace_back("command", "metrics");
  t.columns = {"metric", "value"};
  t.rows.push_back({"pvur", fmt(true_unbalance(v, Metric::pvur))});
  t.rows.push_back(
      {"pvur-maxmin", fmt(true_unbalance(v, Metric::pvur, PvurVariant::max_minus_min))});
  t.rows.push_back({"lvur", fmt(true_unbalance(v, Metric::lvur))});
  t.rows.push_back({"vuf-n", fmt(true_unbalance(v, Metric::vuf_negative))});
  t.rows.push_back({"vuf-0", fmt(true_unbalance(v, Metric::vuf_zero))});
  emit(t, out, format);
  return kExitOk;
}

int cmd_certify(NetworkArgs& net, const std::vector<std::string>& nodes,
                const std::vector<std::string>& checks, double default_eps, int polygon_m,
                const std::string& out, const std::string& format) {
  std::vector<BalanceRequest> requests;
  for (const std::string& c : checks)
    requests.push_back(parse_check(c, default_eps, polygon_m));

  net.materialize();
  const BalanceCertificate cert = certify(net.model, net.loads, nodes, requests);

  OutputTable t;
  t.meta.emplace_back("command", "certify");
  t.meta.emplace_back("network", net.network_path);
  t.meta.emplace_back("solvable", cert.solvable ? "true" : "false");
  t.meta.emplace_back("balanced", cert.balanced ? "true" : "false");
  if (cert.stress.radius) t.meta.emplace_back("r", fmt(*cert.stress.radius));
  t.columns = {"node", "metric", "method", "eps", "pass", "worst_value", "exactness"};
  for (std::size_t n = 0; n < cert.assessments.size(); ++n) {
    const NodeAssessment& a = cert.assessments[n];
    for (std::size_t i = 0; i < a.verdicts.size(); ++i) {
      const RobustVerdict& v = a.verdicts[i];
      const double worst =
          v.worst_values.empty()
              ? 0.0
              : *std::min_element(v.worst_values.begin(), v.worst_values.end());
      t.rows.push_back({cert.nodes[n], metric_name(requests[i]), to_string(v.method),
                        fmt(v.epsilon), v.pass ? "true" : "false", fmt(worst),
                        to_string(v.exactness)});
    }
  }
  emit(t, out, format);
  return cert.balanced ? kExitOk : kExitFail;
}

int cmd_min_eps(NetworkArgs& net, const std::string& node, const std::string& metric_s,
                const std::string& method_s, double tol_eps, int polygon_m,
                const std::string& out, const std::string& format) {
  BalanceRequest r;
  r.metric = parse_metric(metric_s, r.variant);
  r.method = parse_method(method_s);
  r.polygon_m = polygon_m;
  if (auto err = validate_request(r.metric, r.method))
    throw CLI::ValidationError("min-eps", *err);

  net.materialize();
  const StressSummary stress = compute_stress(net.model, net.loads);

  OutputTable t;
  t.meta.emplace_back("command", "min-eps");
  t.meta.emplace_back("network", net.network_path);
  t.meta.emplace_back("tol_eps", fmt(tol_eps));
  t.meta.emplace_back("solvable", stress.feasible ? "true" : "false");
  t.columns = {"node", "metric", "method", "min_eps"};

  std::optional<double> got;
  if (stress.feasible) {
    MinEpsOptions opts;
    opts.tol = tol_eps;
    const DiskBundle disks = build_disks(net.model, net.loads, stress, node);
    got = min_epsilon_for_disks(disks, r, opts);
    t.rows.push_back({node, metric_name(r), method_s, got ? fmt(*got) : "unbalanceable"});
  } else {
    t.rows.push_back({node, metric_name(r), method_s, "unsolvable"});
  }
  emit(t, out, format);
  return got ? kExitOk : kExitFail;
}

int cmd_compare(const std::vector<double>& ca, const std::vector<double>& cb,
                const std::vector<double>& cc, const std::vector<double>& radii,
                const std::string& disks_path, double eps, const std::string& which_s,
                std::vector<int> ms, std::int64_t samples, std::uint64_t seed, int threads,
                const std::string& out, const std::string& format) {
  DiskBundle bundle;
  if (!disks_path.empty()) {
    std::ifstream in(disks_path);
    if (!in) throw std::invalid_argument("cannot open disk file " + disks_path);
    std::stringstream ss;
    ss << in.rdbuf();
    bundle = disk_bundle_from_json(ss.str());
  } else {
    if (ca.size() != 2 || cb.size() != 2 || cc.size() != 2 || radii.size() != 3)
      throw CLI::ValidationError("compare-approx",
                                 "--ca/--cb/--cc take re,im and --r takes three radii");
    bundle = make_disk_bundle(
        "cli", {Complex(ca[0], ca[1]), Complex(cb[0], cb[1]), Complex(cc[0], cc[1])},
        {radii[0], radii[1], radii[2]});
  }
  const Sequence which = which_s == "zero" ? Sequence::zero : Sequence::negative;
  if (ms.empty()) ms = {2, 4, 8, 16, 32};

  const double f_sample = sample_oracle(bundle, eps, which, {samples, seed, threads});
  const RobustVerdict bound = vuf_bound(bundle, eps, which);
  const LgrCertificate lgr = vuf_lgr(bundle, eps, which);
  const StrongDualityCheck duality = lgr_strong_duality_check(bundle, eps, which);

  OutputTable t;
  t.meta.emplace_back("command", "compare-approx");
  t.meta.emplace_back("eps", fmt(eps));
  t.meta.emplace_back("which", which == Sequence::zero ? "zero" : "negative");
  t.meta.emplace_back("samples", std::to_string(samples));
  t.meta.emplace_back("seed", std::to_string(seed));
  t.meta.emplace_back("suff1", duality.outcome == CheckOutcome::holds
                                   ? "true"
                                   : (duality.outcome == CheckOutcome::fails
                                          ? "false"
                                          : "indeterminate"));
  t.meta.emplace_back("suff2", sdr_exactness_check(bundle, eps, which) ? "true" : "false");
  t.meta.emplace_back("lgr_mu", fmt(lgr.multipliers[0]) + ";" + fmt(lgr.multipliers[1]) +
                                    ";" + fmt(lgr.multipliers[2]));
  t.columns = {"method", "m", "value", "F_sample", "gap"};

  auto push = [&](const std::string& name, const std::string& m, double value) {
    t.rows.push_back({name, m, fmt(value), fmt(f_sample), fmt(value - f_sample)});
  };
  push("bound", "", bound.worst_values[0]);
  push("lgr", "", lgr.gamma);
  for (int m : ms) {
    const PolytopeCertificate pc = vuf_polytope(bundle, eps, m, which);
    push("polytope-outer", std::to_string(m), pc.outer_value);
    push("polytope-inner", std::to_string(m), pc.inner_value);
  }
  emit(t, out, format);
  return kExitOk;
}

int cmd_sweep(NetworkArgs& net, const std::string& node, const std::string& bus,
              const std::vector<double>& sigma_kw, const std::string& k_spec,
              const std::vector<std::string>& checks, double tol_eps, int polygon_m,
              const std::string& unit, const std::string& out, const std::string& format) {
  std::vector<BalanceRequest> requests;
  for (const std::string& c : checks) requests.push_back(parse_check(c, 0.05, polygon_m));
  if (sigma_kw.size() != 3)
    throw CLI::ValidationError("sweep-case", "--sigma takes three per-phase values");

  int k_lo = 1, k_hi = 10;
  if (!k_spec.empty()) {
    const auto dots = k_spec.find("..");
    if (dots == std::string::npos)
      throw CLI::ValidationError("sweep-case", "--k expects lo..hi");
    k_lo = std::stoi(k_spec.substr(0, dots));
    k_hi = std::stoi(k_spec.substr(dots + 2));
  }

  net.materialize();
  double scale = 1.0;
  if (unit == "kw") {
    if (!net.model.base_kva)
      throw std::invalid_argument("sweep-case: kW sigma needs base_kva in the network");
    scale = 1.0 / *net.model.base_kva;
  }

  const std::array<int, 3> idx = net.model.three_phase_indices(bus);
  const auto sigma_of_k = [&](int k) {
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(net.model.pq_count());
    for (int p = 0; p < 3; ++p) s[idx[p]] = Complex(scale * sigma_kw[p] * k, 0.0);
    return s;
  };

  SweepOptions opts;
  opts.eps.tol = tol_eps;
  const auto rows = sweep(net.model, net.loads, sigma_of_k, k_lo, k_hi, node, requests, opts);

  OutputTable t;
  t.meta.emplace_back("command", "sweep-case");
  t.meta.emplace_back("network", net.network_path);
  t.meta.emplace_back("critical_node", node);
  t.meta.emplace_back("sigma_bus", bus);
  t.meta.emplace_back("sigma", fmt(sigma_kw[0]) + ";" + fmt(sigma_kw[1]) + ";" +
                                   fmt(sigma_kw[2]) + " " + unit + " per k");
  t.meta.emplace_back("tol_eps", fmt(tol_eps));
  t.columns = {"k", "metric", "method", "min_eps", "true_value", "ratio", "solvable"};
  for (const SweepEntry& row : rows) {
    const std::string ratio = row.min_eps && row.true_value && *row.true_value > 0.0
                                  ? fmt(*row.min_eps / *row.true_value)
                                  : "";
    t.rows.push_back({std::to_string(row.k), to_string(row.metric), to_string(row.method),
                      row.min_eps ? fmt(*row.min_eps) : "",
                      row.true_value ? fmt(*row.true_value) : "", ratio,
                      row.solvable ? "true" : "false"});
  }
  emit(t, out, format);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"balance certification toolkit for three-phase distribution feeders"};
  app.set_version_flag("--version", std::string("balcert ") + kVersion);
  app.require_subcommand(1);

  std::string out, format = "csv";
  app.add_option("-o,--output", out, "output path (default: stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  int threads = 0;
  app.add_option("--threads", threads, "worker cap for sampling (0: auto)");

  NetworkArgs net_pf, net_solv, net_disks, net_cert, net_min, net_sweep;

  auto* pf = app.add_subcommand("pf", "fixed-point power flow");
  net_pf.add_options(pf);
  double pf_tol = 1e-10;
  int pf_max_iter = 500;
  pf->add_option("--tol", pf_tol, "update-norm stopping tolerance");
  pf->add_option("--max-iter", pf_max_iter, "iteration cap");

  auto* solv = app.add_subcommand("solvability", "stress measures and certificate");
  net_solv.add_options(solv);

  auto* disks = app.add_subcommand("disks", "per-phase voltage disks at critical nodes");
  net_disks.add_options(disks);
  std::vector<std::string> disk_nodes;
  disks->add_option("--node", disk_nodes, "critical node id (repeatable)")->required();

  auto* metrics = app.add_subcommand("metrics", "pointwise unbalance metrics of a triple");
  std::string triple_path;
  metrics->add_option("--triple", triple_path, "voltage triple JSON ({\"a\":[re,im],...})")
      ->required()
      ->check(CLI::ExistingFile);

  auto* cert = app.add_subcommand("certify", "robust balance certification over the disks");
  net_cert.add_options(cert);
  std::vector<std::string> cert_nodes, cert_checks;
  double cert_eps = 0.05;
  int cert_m = 32;
  cert->add_option("--node", cert_nodes, "critical node id (repeatable)")->required();
  cert->add_option("--check", cert_checks, "metric:method[:eps] (repeatable)")->required();
  cert->add_option("--eps", cert_eps, "default tolerance for checks without one");
  cert->add_option("--m", cert_m, "polygon parameter for polytope checks");

  auto* mineps = app.add_subcommand("min-eps", "smallest certifiable tolerance");
  net_min.add_options(mineps);
  std::string min_node, min_metric, min_method;
  double min_tol = 1e-4;
  int min_m = 32;
  mineps->add_option("--node", min_node, "critical node id")->required();
  mineps->add_option("--metric", min_metric, "pvur|pvur-maxmin|lvur|vuf-n|vuf-0")->required();
  mineps->add_option("--method", min_method, "closed|line-bound|mag-bound|bound|polytope|lgr")
      ->required();
  mineps->add_option("--tol-eps", min_tol, "bisection width");
  mineps->add_option("--m", min_m, "polygon parameter for polytope checks");

  auto* cmp =
      app.add_subcommand("compare-approx", "compare worst-case VUF certificates on raw disks");
  std::vector<double> ca, cb, cc, radii;
  std::string disks_path, which = "negative";
  double cmp_eps = 0.3;
  std::vector<int> cmp_ms;
  std::int64_t cmp_samples = 500000;
  std::uint64_t cmp_seed = 1;
  cmp->add_option("--ca", ca, "phase-a center re,im")->delimiter(',');
  cmp->add_option("--cb", cb, "phase-b center re,im")->delimiter(',');
  cmp->add_option("--cc", cc, "phase-c center re,im")->delimiter(',');
  cmp->add_option("--r", radii, "three radii")->delimiter(',');
  cmp->add_option("--disks", disks_path, "disk bundle JSON (alternative to --ca/--cb/--cc)")
      ->check(CLI::ExistingFile);
  cmp->add_option("--eps", cmp_eps, "tolerance")->required();
  cmp->add_option("--which", which, "negative or zero sequence")
      ->check(CLI::IsMember({"negative", "zero"}));
  cmp->add_option("--m", cmp_ms, "polygon parameters")->delimiter(',');
  cmp->add_option("--samples", cmp_samples, "boundary sample count");
  cmp->add_option("--seed", cmp_seed, "sampling seed");

  auto* sweepc = app.add_subcommand("sweep-case", "scenario sweep with min-eps per method");
  net_sweep.add_options(sweepc, false);
  std::string sweep_node, sweep_bus, sweep_k = "1..10", sweep_unit = "kw";
  std::vector<double> sweep_sigma;
  std::vector<std::string> sweep_checks{"pvur:closed", "lvur:line-bound", "vuf-n:lgr"};
  double sweep_tol = 1e-4;
  int sweep_m = 32;
  sweepc->add_option("--node", sweep_node, "critical node id")->required();
  sweepc->add_option("--bus", sweep_bus, "bus receiving the increment")->required();
  sweepc->add_option("--sigma", sweep_sigma, "per-phase increment per k step")
      ->delimiter(',')
      ->expected(3)
      ->required();
  sweepc->add_option("--k", sweep_k, "range lo..hi");
  sweepc->add_option("--unit", sweep_unit, "kw or pu")->check(CLI::IsMember({"kw", "pu"}));
  sweepc->add_option("--methods", sweep_checks, "metric:method list")->delimiter(',');
  sweepc->add_option("--tol-eps", sweep_tol, "bisection width");
  sweepc->add_option("--m", sweep_m, "polygon parameter for polytope checks");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  if (threads > 0) {
    // worker cap travels by environment so the library default picks it up
    setenv("BALCERT_THREADS", std::to_string(threads).c_str(), 1);
  }

  try {
    if (pf->parsed()) return cmd_pf(net_pf, pf_tol, pf_max_iter, out, format);
    if (solv->parsed()) return cmd_solvability(net_solv, out, format);
    if (disks->parsed()) return cmd_disks(net_disks, disk_nodes, out, format);
    if (metrics->parsed()) return cmd_metrics(triple_path, out, format);
    if (cert->parsed())
      return cmd_certify(net_cert, cert_nodes, cert_checks, cert_eps, cert_m, out, format);
    if (mineps->parsed())
      return cmd_min_eps(net_min, min_node, min_metric, min_method, min_tol, min_m, out,
                         format);
    if (cmp->parsed())
      return cmd_compare(ca, cb, cc, radii, disks_path, cmp_eps, which, cmp_ms, cmp_samples,
                         cmp_seed, threads, out, format);
    if (sweepc->parsed())
      return cmd_sweep(net_sweep, sweep_node, sweep_bus, sweep_sigma, sweep_k, sweep_checks,
                       sweep_tol, sweep_m, sweep_unit, out, format);
  } catch (const std::exception& e) {
    std::cerr << "balcert: " << e.what() << "\n";
    return kExitError;
  }
  std::cerr << "balcert: no subcommand\n";
  return kExitError;
}

}  // namespace balcert
