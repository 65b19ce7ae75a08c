#include <benchmark/benchmark.h>

#include <random>

#include "lot/solver.hpp"

namespace {

lot::DiscreteMeasure random_cloud(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd p(n, 2);
  for (int i = 0; i < n; ++i) p.row(i) << u(rng), u(rng);
  return {lot::Manifold::euclidean(2), p, Eigen::VectorXd::Constant(n, 1.0 / n)};
}

lot::SolverConfig config(double eps) {
  lot::SolverConfig c;
  c.epsilon_target = eps;
  return c;
}

void BM_SinkhornBalanced(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = random_cloud(n, 1), b = random_cloud(n, 2);
  const Eigen::MatrixXd cost = lot::build_cost_w2(a, b);
  for (auto _ : state) benchmark::DoNotOptimize(lot::sinkhorn_balanced(cost, a, b, config(1e-3)).plan.value);
  state.SetComplexityN(n);
}
BENCHMARK(BM_SinkhornBalanced)->RangeMultiplier(2)->Range(32, 512)->Unit(benchmark::kMillisecond);

void BM_SinkhornHk(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = random_cloud(n, 3), b = random_cloud(n, 4);
  const Eigen::MatrixXd cost = lot::build_cost_hk(a, b, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(lot::sinkhorn_hk(cost, a, b, config(1e-3)).plan.value);
  state.SetComplexityN(n);
}
BENCHMARK(BM_SinkhornHk)->RangeMultiplier(2)->Range(32, 512)->Unit(benchmark::kMillisecond);

void BM_CostHk(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = random_cloud(n, 5), b = random_cloud(n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(lot::build_cost_hk(a, b, 1.0));
}
BENCHMARK(BM_CostHk)->Range(64, 1024);

}  // namespace

BENCHMARK_MAIN();
