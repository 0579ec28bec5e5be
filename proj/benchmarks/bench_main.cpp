#include <benchmark/benchmark.h>

#include "vsrlab/bayesopt.hpp"
#include "vsrlab/controller.hpp"
#include "vsrlab/morphology.hpp"
#include "vsrlab/tasks.hpp"

using namespace vsr;

namespace {

BodyGrid bench_body() {
  Rng rng = make_stream(7);
  return random_body(rng);
}

void BM_PhysicsControlStep(benchmark::State& state) {
  const SimConfig cfg;
  const Terrain flat = Terrain::flat();
  SoftBodyState s = assemble(bench_body(), cfg, flat, 0.0);
  std::vector<double> act(s.voxels.size(), 1.2);
  for (auto _ : state) {
    step(s, act, cfg, flat);
    benchmark::DoNotOptimize(s.pos.data());
  }
}
BENCHMARK(BM_PhysicsControlStep);

void BM_Observe(benchmark::State& state) {
  const SimConfig cfg;
  const Terrain flat = Terrain::flat();
  const SoftBodyState s = assemble(bench_body(), cfg, flat, 0.0);
  for (auto _ : state) {
    SensorFrame f = observe(s, nullptr, true);
    benchmark::DoNotOptimize(f.values.data());
  }
}
BENCHMARK(BM_Observe);

void BM_ControllerForward(benchmark::State& state) {
  const ControllerSpec spec;
  Rng rng = make_stream(1);
  const BrainParams theta = random_params(spec, rng);
  std::vector<double> inputs(spec.n_inputs, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(forward(spec, theta, inputs));
}
BENCHMARK(BM_ControllerForward);

void BM_Episode(benchmark::State& state) {
  const BodyGrid body = bench_body();
  const ControllerSpec spec;
  Rng rng = make_stream(2);
  const BrainParams theta = random_params(spec, rng);
  TaskParams params;
  params.episode_steps = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        run_episode(body, theta, TaskId::Simple, seed++, SimConfig{}, params));
}
BENCHMARK(BM_Episode)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

SampleArchive bench_archive(int n, int dim) {
  Rng rng = make_stream(3);
  SampleArchive a;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(dim);
    for (int d = 0; d < dim; ++d) x[d] = uniform_real(rng, -1.0, 1.0);
    a.add({std::move(x), uniform_real(rng, -1.0, 1.0)});
  }
  return a;
}

void BM_GPFit(benchmark::State& state) {
  const BOConfig cfg;
  const SampleArchive a =
      bench_archive(static_cast<int>(state.range(0)), 321);
  for (auto _ : state) benchmark::DoNotOptimize(fit_gp(a, cfg));
}
BENCHMARK(BM_GPFit)->Arg(8)->Arg(50);

void BM_GPPosterior(benchmark::State& state) {
  const BOConfig cfg;
  const SampleArchive a = bench_archive(50, 321);
  const GPModel model = fit_gp(a, cfg);
  Rng rng = make_stream(4);
  Eigen::VectorXd x(321);
  for (int d = 0; d < 321; ++d) x[d] = uniform_real(rng, -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(model.posterior(x));
}
BENCHMARK(BM_GPPosterior);

void BM_MaximizeAcquisition(benchmark::State& state) {
  BOConfig cfg;
  cfg.restarts = static_cast<int>(state.range(0));
  const SampleArchive a = bench_archive(20, 321);
  const GPModel model = fit_gp(a, cfg);
  Rng rng = make_stream(5);
  for (auto _ : state)
    benchmark::DoNotOptimize(maximize_acquisition(model, cfg, rng));
}
BENCHMARK(BM_MaximizeAcquisition)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_HammingAligned(benchmark::State& state) {
  Rng rng = make_stream(6);
  const BodyGrid a = random_body(rng);
  const BodyGrid b = random_body(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(hamming_distance_aligned(a, b));
}
BENCHMARK(BM_HammingAligned);

}  // namespace

BENCHMARK_MAIN();
