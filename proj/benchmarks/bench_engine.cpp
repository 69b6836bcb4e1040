// Hot paths of the engine: dense unitary application on the sealed-lab
// factor, full branch enumeration, trajectory sampling, and event ordering.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "wfsim/analysis.hpp"

namespace {

using namespace wfsim;

Eigen::MatrixXcd random_unitary(std::mt19937& gen, long dim) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXcd m(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) m(i, j) = cxd{dist(gen), dist(gen)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  return qr.householderQ();
}

// 18x18 unitary on the (F_spin, m, eps) factor of the 144-dimensional
// two-qubit scenario register.
void BM_ApplyUnitaryLabFactor(benchmark::State& state) {
  Scenario s = build_paper_scenario(2);
  QState psi = init_register(s.register_spec, s.initial_labels);
  std::mt19937 gen(42);
  Eigen::MatrixXcd u = random_unitary(gen, 18);
  for (auto _ : state) {
    QState out = apply_unitary(psi, {"F_spin", "m", "eps"}, u);
    benchmark::DoNotOptimize(out.amplitudes().data());
  }
}
BENCHMARK(BM_ApplyUnitaryLabFactor);

void BM_EnumerateRest(benchmark::State& state) {
  Scenario s = build_paper_scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    RunReport rep = run(s, FrameVelocity(0.0), UpdatePolicy::UnitaryLab,
                        EmissionSemantics::RecordAdaptive);
    benchmark::DoNotOptimize(rep.branches.size());
  }
}
BENCHMARK(BM_EnumerateRest)->DenseRange(2, 5);

// The moving frame takes the record-adaptive branch of the emission.
void BM_EnumerateBoosted(benchmark::State& state) {
  Scenario s = build_paper_scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    RunReport rep = run(s, FrameVelocity(0.2), UpdatePolicy::UnitaryLab,
                        EmissionSemantics::RecordAdaptive);
    benchmark::DoNotOptimize(rep.branches.size());
  }
}
BENCHMARK(BM_EnumerateBoosted)->DenseRange(2, 5);

void BM_SampleTrajectories(benchmark::State& state) {
  Scenario s = build_paper_scenario(2);
  long long n = state.range(0);
  for (auto _ : state) {
    SampleReport rep = sample(s, FrameVelocity(0.2), UpdatePolicy::UnitaryLab,
                              EmissionSemantics::RecordAdaptive, n, 7);
    benchmark::DoNotOptimize(rep.counts.size());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleTrajectories)->Arg(1000)->Arg(100000);

void BM_OrderEvents(benchmark::State& state) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  std::vector<SpacetimeEvent> events;
  for (int i = 0; i < state.range(0); ++i)
    events.push_back({"e" + std::to_string(i), coord(gen), coord(gen)});
  FrameVelocity v(0.3);
  for (auto _ : state) {
    auto order = order_events(events, v);
    benchmark::DoNotOptimize(order.size());
  }
}
BENCHMARK(BM_OrderEvents)->Arg(16)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
