#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>

#include "neckspec/counting.hpp"
#include "neckspec/geometry.hpp"
#include "neckspec/reduction.hpp"
#include "neckspec/sl_solver.hpp"

namespace {

neckspec::MetricParams metric(double a, double eps) {
  neckspec::MetricParams mp;
  mp.a = a;
  mp.eps = eps;
  mp.validate();
  return mp;
}

void BM_tau_of_t(benchmark::State& state) {
  const neckspec::MetricParams mp = metric(-2.0, 1e-4);
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-6;
    if (t > 1.0) t = 1e-6;
    benchmark::DoNotOptimize(neckspec::tau_of_t(mp, t));
  }
}
BENCHMARK(BM_tau_of_t);

void BM_reduced_potential(benchmark::State& state) {
  const neckspec::MetricParams mp = metric(-2.0, 1e-4);
  const double R = neckspec::neck_length(mp);
  double tau = 0.0;
  for (auto _ : state) {
    tau += R * 1e-6;
    if (tau > R) tau = 0.0;
    benchmark::DoNotOptimize(neckspec::reduced_potential(mp, 0, tau));
  }
}
BENCHMARK(BM_reduced_potential);

// constant coefficients collapse the whole grid into one closed-form run
void BM_corrected_count_constant(benchmark::State& state) {
  const neckspec::SLProblem pb{50.0, neckspec::ConstantPotential{0.25}};
  const neckspec::SolverOptions opts;
  const auto m = static_cast<std::int64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(neckspec::detail::corrected_count(pb, 25.25, m, opts));
}
BENCHMARK(BM_corrected_count_constant)->Arg(1 << 20)->Arg(1 << 26);

void BM_corrected_count_inverse_square(benchmark::State& state) {
  const neckspec::MetricParams mp = metric(-2.0, 1e-4);
  const double R = neckspec::neck_length(mp);
  const neckspec::SLProblem pb{R, neckspec::reduced_potential_model(mp, 0)};
  const neckspec::SolverOptions opts;
  const std::int64_t m = neckspec::default_grid_size(R, 25.0) *
                         static_cast<std::int64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(neckspec::detail::corrected_count(pb, 25.0, m, opts));
}
BENCHMARK(BM_corrected_count_inverse_square)->Arg(1)->Arg(4);

void BM_count_below(benchmark::State& state) {
  const neckspec::MetricParams mp = metric(-2.0, 1e-4);
  const neckspec::SLProblem pb{neckspec::neck_length(mp),
                               neckspec::reduced_potential_model(mp, 0)};
  const neckspec::SolverOptions opts;
  for (auto _ : state) {
    const auto r = neckspec::count_below(pb, 25.0, opts);
    benchmark::DoNotOptimize(r.count);
  }
}
BENCHMARK(BM_count_below);

}  // namespace

BENCHMARK_MAIN();
