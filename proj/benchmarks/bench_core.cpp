#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <string>

#include "balcert/certification.hpp"
#include "balcert/netmodel.hpp"
#include "balcert/powerflow.hpp"
#include "balcert/robustcert.hpp"
#include "balcert/solvability.hpp"

namespace {

using namespace balcert;
using Cx = std::complex<double>;

const std::string kData = BALCERT_BENCH_DATA_DIR;

struct Fixture {
  NetworkModel model;
  LoadState loads;

  Fixture() : model(load_network_file(kData + "/feeder5.json")) {
    const Eigen::VectorXcd s0 = load_vector_file(model, kData + "/loads_nominal.json");
    Eigen::VectorXcd s = s0;
    s[model.pq_index("5", Phase::a)] += Cx(0.05, 0.0);
    s[model.pq_index("5", Phase::b)] += Cx(-0.025, 0.0);
    s[model.pq_index("5", Phase::c)] += Cx(-0.025, 0.0);
    loads = make_load_state(model, s0, s);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

DiskBundle comparison_bundle() {
  const double s3 = std::sqrt(3.0);
  return make_disk_bundle("b", {Cx(2, 0), Cx(-1, -s3), Cx(-1, s3)}, {0.6, 0.6, 0.6});
}

void BM_SolveFixedPoint(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(solve_fixed_point(f.model, f.loads));
}
BENCHMARK(BM_SolveFixedPoint);

void BM_ComputeStress(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(compute_stress(f.model, f.loads));
}
BENCHMARK(BM_ComputeStress);

void BM_RobustPvur(benchmark::State& state) {
  const DiskBundle b = comparison_bundle();
  for (auto _ : state) benchmark::DoNotOptimize(robust_pvur(b, 0.3));
}
BENCHMARK(BM_RobustPvur);

void BM_PolytopeOuter(benchmark::State& state) {
  const DiskBundle b = comparison_bundle();
  for (auto _ : state)
    benchmark::DoNotOptimize(vuf_polytope(b, 0.3, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PolytopeOuter)->Arg(8)->Arg(16)->Arg(32);

void BM_LgrDual(benchmark::State& state) {
  const DiskBundle b = comparison_bundle();
  for (auto _ : state) benchmark::DoNotOptimize(vuf_lgr(b, 0.3));
}
BENCHMARK(BM_LgrDual);

void BM_SampleOracle(benchmark::State& state) {
  const DiskBundle b = comparison_bundle();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_oracle(b, 0.3, Sequence::negative, {state.range(0), 7, 1}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleOracle)->Arg(100000)->Arg(500000);

void BM_MinEpsilonLgr(benchmark::State& state) {
  const Fixture& f = fixture();
  const BalanceRequest req{Metric::vuf_negative, Method::lgr, 0.05,
                           PvurVariant::avg_deviation, 32};
  for (auto _ : state) benchmark::DoNotOptimize(min_epsilon(f.model, f.loads, "4", req));
}
BENCHMARK(BM_MinEpsilonLgr);

}  // namespace

BENCHMARK_MAIN();
