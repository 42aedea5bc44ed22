#include <benchmark/benchmark.h>

#include <random>

#include "jkl/cme.hpp"
#include "jkl/ensemble.hpp"
#include "jkl/network.hpp"
#include "jkl/presets.hpp"
#include "jkl/simulate.hpp"
#include "jkl/stability.hpp"

using namespace jkl;

static void BM_Propensities(benchmark::State& state) {
  const auto net = preset("reversible-open").network();
  std::vector<double> w(net.reaction_count());
  State x = {7, 4, 3};
  for (auto _ : state) {
    propensities_into(net, x, w);
    benchmark::DoNotOptimize(w.data());
    x[0] = (x[0] + 1) % 50;
  }
}
BENCHMARK(BM_Propensities);

template <Trajectory (*Sim)(const ReactionNetwork&, const State&, const SimConfig&)>
static void BM_Simulate(benchmark::State& state) {
  const auto& p = preset("enzyme");
  const auto net = p.network();
  SimConfig cfg;
  cfg.t_end = 0.1;
  cfg.record_events = false;
  std::uint64_t events = 0;
  for (auto _ : state) {
    cfg.seed++;
    const auto tr = Sim(net, p.x0, cfg);
    events += tr.event_count;
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Simulate<simulate_direct>)->Name("BM_SimulateDirect");
BENCHMARK(BM_Simulate<simulate_rtc>)->Name("BM_SimulateNextReaction");

static void BM_Ensemble(benchmark::State& state) {
  const auto& p = preset("bimol");
  const auto net = p.network();
  const std::vector<double> grid = {0.0, 0.5, 1.0};
  EnsembleOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_moments(net, p.x0, grid, 2, 256, 1, opts));
}
BENCHMARK(BM_Ensemble);

static void BM_LogNorm(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::MatrixXd B(n, n);
  for (Eigen::Index i = 0; i < n * n; ++i) B.data()[i] = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(log_norm(B));
}
BENCHMARK(BM_LogNorm)->Arg(3)->Arg(10)->Arg(50);

static void BM_Analyze(benchmark::State& state) {
  const auto net = preset("reversible-open").network();
  for (auto _ : state) benchmark::DoNotOptimize(analyze(net, {WeightPolicy::Auto, {}}));
}
BENCHMARK(BM_Analyze);

static void BM_CmeBuild(benchmark::State& state) {
  const auto net = preset("bimol").network();
  Truncation tr;
  tr.caps = {state.range(0), state.range(0)};
  for (auto _ : state) {
    const auto idx = enumerate_states(net, {0, 0}, tr);
    benchmark::DoNotOptimize(build_generator(net, idx));
  }
}
BENCHMARK(BM_CmeBuild)->Arg(30)->Arg(100);

static void BM_CmeIntegrate(benchmark::State& state) {
  const auto net = preset("bimol").network();
  Truncation tr;
  tr.caps = {60, 60};
  const auto idx = enumerate_states(net, {0, 0}, tr);
  const auto gen = build_generator(net, idx);
  const auto p0 = point_mass(idx, {0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(integrate_cme(gen, p0, {1.0}));
}
BENCHMARK(BM_CmeIntegrate);
BENCHMARK_MAIN();
