// Micro-benchmarks for the hot paths: trajectory integration, ergodicity
// coefficients, schedule sampling, and certificate evaluation.

#include <benchmark/benchmark.h>

#include <vector>

#include "flocksim/certify.hpp"
#include "flocksim/digraph.hpp"
#include "flocksim/dynamics.hpp"
#include "flocksim/graph_library.hpp"
#include "flocksim/matrix.hpp"
#include "flocksim/rng.hpp"
#include "flocksim/switching.hpp"
#include "flocksim/weight.hpp"

namespace {

flocksim::GraphLibrary ring_library(int n) {
  // Two graphs: a directed ring and its reversal, equal probabilities.
  flocksim::Digraph forward(n);
  flocksim::Digraph backward(n);
  for (int i = 0; i < n; ++i) {
    forward.add_edge(i, i);
    backward.add_edge(i, i);
    forward.add_edge(i, (i + 1) % n);
    backward.add_edge((i + 1) % n, i);
  }
  flocksim::GraphLibrary lib;
  lib.graphs = {forward, backward};
  lib.probabilities = {0.5, 0.5};
  return lib;
}

flocksim::DenseMatrix random_stochastic(int n, std::uint64_t seed) {
  flocksim::SplitMix64 gen(seed);
  flocksim::DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      m.at(i, j) = gen.next_unit() + 1e-3;
      row_sum += m.at(i, j);
    }
    for (int j = 0; j < n; ++j) m.at(i, j) /= row_sum;
  }
  return m;
}

void BM_Integrate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const flocksim::GraphLibrary lib = ring_library(n);
  const flocksim::IncrementDistribution inc =
      flocksim::IncrementDistribution::uniform(0.5, 1.5);
  const flocksim::SwitchingSchedule sched =
      flocksim::sample_schedule_covering(lib, inc, 5.0, 7);
  const flocksim::CommunicationWeight w = flocksim::CommunicationWeight::constant(1.0);
  const flocksim::EnsembleState initial =
      flocksim::sample_state_in_boxes(n, 2, -1.0, 1.0, -1.0, 1.0, 11);
  for (auto _ : state) {
    flocksim::TrajectoryRecord rec =
        flocksim::integrate(initial, sched, lib, w, 1e-2, 5.0, 10);
    benchmark::DoNotOptimize(rec.sup_dx);
  }
}
BENCHMARK(BM_Integrate)->Arg(4)->Arg(8)->Arg(16);

void BM_ErgodicityCoefficient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const flocksim::DenseMatrix m = random_stochastic(n, 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(flocksim::ergodicity_coefficient(m));
  }
}
BENCHMARK(BM_ErgodicityCoefficient)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_SampleSchedule(benchmark::State& state) {
  const flocksim::GraphLibrary lib = ring_library(6);
  const flocksim::IncrementDistribution inc =
      flocksim::IncrementDistribution::uniform(0.5, 1.5);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    flocksim::SwitchingSchedule sched =
        flocksim::sample_schedule(lib, inc, static_cast<int>(state.range(0)), seed++);
    benchmark::DoNotOptimize(sched.times.back());
  }
}
BENCHMARK(BM_SampleSchedule)->Arg(100)->Arg(1000)->Arg(10000);

void BM_Certify(benchmark::State& state) {
  flocksim::TheoremParameters params;
  params.kappa = 1.0;
  params.a = 0.05;
  params.b = 0.1;
  params.n_particles = 3;
  params.probabilities = {0.5, 0.5};
  params.epsilon = 0.0;
  params.beta = 0.0;
  for (auto _ : state) {
    flocksim::FlockingCertificate cert = flocksim::certify(params, 1.0, 1.0);
    benchmark::DoNotOptimize(cert.x_infinity);
  }
}
BENCHMARK(BM_Certify);

}  // namespace

BENCHMARK_MAIN();
