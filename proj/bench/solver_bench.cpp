// Compares the serial reference kernels against the OpenMP ones on the
// semi-discrete right-hand side and on full RK4 steps.

#include <benchmark/benchmark.h>

#include "epiwave/model.hpp"
#include "epiwave/solver.hpp"

using namespace epiwave;

namespace {

SimState front_state(const Grid1D& g) {
  const auto p = table2_params();
  return build_front_ic(g, p, 0.4 * g.length);
}

void BM_rhs(benchmark::State& state, Exec exec) {
  const auto p = table2_params();
  const auto g = make_grid(500.0, static_cast<std::size_t>(state.range(0)));
  const auto s = front_state(g);
  std::array<std::vector<double>, 4> out;
  for (auto& o : out) o.assign(g.n, 0.0);
  for (auto _ : state) {
    rd_rhs(s.f, p, g, out, exec);
    benchmark::DoNotOptimize(out[1].data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.n));
}

void BM_step(benchmark::State& state, Exec exec) {
  const auto p = table2_params();
  const auto g = make_grid(500.0, static_cast<std::size_t>(state.range(0)));
  auto s = front_state(g);
  for (auto _ : state) {
    s = step(s, p, g, 0.01, exec);
    benchmark::DoNotOptimize(s.f[1].data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.n));
}

}  // namespace

BENCHMARK_CAPTURE(BM_rhs, serial, Exec::serial)->Arg(1001)->Arg(4001)->Arg(16001);
BENCHMARK_CAPTURE(BM_rhs, parallel, Exec::parallel)->Arg(1001)->Arg(4001)->Arg(16001);
BENCHMARK_CAPTURE(BM_step, serial, Exec::serial)->Arg(1001)->Arg(4001);
BENCHMARK_CAPTURE(BM_step, parallel, Exec::parallel)->Arg(1001)->Arg(4001);

BENCHMARK_MAIN();
