// Microbenchmarks for the hot paths: spectral radius, one dynamics step, and
// the Lyapunov series solve, all at the shipped 10-individual / 5-resource
// scale.

#include <benchmark/benchmark.h>

#include "siws/dynamics.hpp"
#include "siws/linalg.hpp"
#include "support/random_systems.hpp"

namespace {

testgen::RandomSystem make_system() { return testgen::random_system(1, 10, 5, 2); }

void bm_spectral_radius(benchmark::State& state) {
  const auto rs = make_system();
  const auto sys = siws::assemble(rs.frames[0], rs.shape);
  for (auto _ : state) {
    benchmark::DoNotOptimize(siws::spectral_radius_nonneg(sys.m_f));
  }
}
BENCHMARK(bm_spectral_radius);

void bm_step(benchmark::State& state) {
  const auto rs = make_system();
  auto s = testgen::interior_state(rs, 2);
  for (auto _ : state) {
    s = siws::step(s, rs.frames, rs.shape);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(bm_step);

void bm_lyapunov(benchmark::State& state) {
  const auto rs = testgen::system_at_rho(3, 4, 2, 0.9);
  const auto sys = siws::assemble(rs->frames[0], rs->shape);
  for (auto _ : state) {
    benchmark::DoNotOptimize(siws::solve_discrete_lyapunov(sys.m_f));
  }
}
BENCHMARK(bm_lyapunov);

}  // namespace

BENCHMARK_MAIN();
