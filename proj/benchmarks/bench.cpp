#include <benchmark/benchmark.h>

#include "bsq/closedform.hpp"

using namespace bsq;

static void BM_Normalize(benchmark::State& state) {
  ExprPtr u = jetv(0, 0);
  ExprPtr e = pow(num(2) * u + sym("a"), 4) * pow(u - num(1), 3) +
              pow(u + sym("b"), 5);
  for (auto _ : state) benchmark::DoNotOptimize(normalize(e));
}
BENCHMARK(BM_Normalize);

static void BM_Prolongation(benchmark::State& state) {
  VectorField V{sym("x") * sym("t"), pow(sym("t"), 2) + num(1),
                jetv(0, 0) * sym("x") - sym("t")};
  for (auto _ : state)
    benchmark::DoNotOptimize(prolong(V, 4));
}
BENCHMARK(BM_Prolongation);

static void BM_BuildClassical(benchmark::State& state) {
  FSpec f{parse("u^2/2 + u")};
  for (auto _ : state) benchmark::DoNotOptimize(build_classical(f));
}
BENCHMARK(BM_BuildClassical);

static void BM_IntegrateOde(benchmark::State& state) {
  OdeRhs rhs = [](double, std::span<const double> y, std::span<double> d) {
    d[0] = y[1];
    d[1] = -y[0];
  };
  double y0[2] = {0.0, 1.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_ode(rhs, y0, 0.0, 10.0, 1e-9));
}
BENCHMARK(BM_IntegrateOde);

static void BM_Weierstrass(benchmark::State& state) {
  WeierstrassParams wp{1.3, 0.4};
  double z = 0.4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(weierstrass(z, wp));
    z = z < 1.8 ? z + 1e-3 : 0.4;
  }
}
BENCHMARK(BM_Weierstrass);

BENCHMARK_MAIN();
