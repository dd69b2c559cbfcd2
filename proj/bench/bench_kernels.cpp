#include <benchmark/benchmark.h>

#include <cmath>

#include "magpauli/foliation.hpp"
#include "magpauli/kernels.hpp"

using namespace magpauli;

namespace {

kernels::Exec exec_of(const benchmark::State& st) {
  return st.range(1) ? kernels::Exec::Parallel : kernels::Exec::Serial;
}

const PointFn smooth = [](PlanarPoint p) { return cplx(std::sin(p.x) * std::cos(2 * p.y), std::exp(0.1 * p.x)); };

void BM_sample(benchmark::State& st) {
  const Grid g = Grid::make_periodic(2 * PI, 2 * PI, int(st.range(0)), int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::sample(g, smooth, exec_of(st)));
}

void BM_stencil(benchmark::State& st) {
  const Grid g = Grid::make_periodic(2 * PI, 2 * PI, int(st.range(0)), int(st.range(0)));
  const Field f = kernels::sample(g, smooth);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::stencil(f, 0, 2, 4, exec_of(st)));
}

void BM_log_potential(benchmark::State& st) {
  const int n = int(st.range(0));
  const Grid g = Grid::make_box(-4, 4, -4, 4, n, n);
  std::vector<PlanarPoint> src;
  std::vector<double> q;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      src.push_back(g.point(i, j));
      q.push_back(std::exp(-0.5 * (g.x(i) * g.x(i) + g.y(j) * g.y(j))) * g.hx * g.hy);
    }
  for (auto _ : st) benchmark::DoNotOptimize(kernels::log_potential(src, src, q, g.hx, g.hy, exec_of(st)));
}

void BM_limit_cycle_scan(benchmark::State& st) {
  const auto d = foliation::fig6_data();
  for (auto _ : st) benchmark::DoNotOptimize(foliation::limit_cycle_scan(d, int(st.range(0))));
}

}  // namespace

BENCHMARK(BM_sample)->ArgsProduct({{128, 512}, {0, 1}});
BENCHMARK(BM_stencil)->ArgsProduct({{128, 512}, {0, 1}});
BENCHMARK(BM_log_potential)->ArgsProduct({{41, 81}, {0, 1}});
BENCHMARK(BM_limit_cycle_scan)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
