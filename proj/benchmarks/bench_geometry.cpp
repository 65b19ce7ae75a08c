#include <benchmark/benchmark.h>

#include "lot/analysis.hpp"
#include "lot/tangent.hpp"

namespace {

void BM_SphereLogExp(benchmark::State& state) {
  const lot::Manifold s = lot::Manifold::sphere(1.0);
  const Eigen::Vector3d x(0, 0, 1), y(0.6, 0, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(s.exp(x, s.log(x, y)));
}
BENCHMARK(BM_SphereLogExp);

void BM_HyperbolicDist(benchmark::State& state) {
  const lot::Manifold h = lot::Manifold::hyperbolic();
  const Eigen::Vector3d x(0, 0, 1), y(std::sinh(0.7), 0, std::cosh(0.7));
  for (auto _ : state) benchmark::DoNotOptimize(h.dist(x, y));
}
BENCHMARK(BM_HyperbolicDist);

void BM_DiskLinePca(benchmark::State& state) {
  const int count = static_cast<int>(state.range(0));
  const lot::DiscreteMeasure ref = lot::disk_line_reference(5.0, 0.2);
  const auto samples = lot::gen_disk_line(5.0, 0.2, count, 1);
  lot::SolverConfig cfg;
  cfg.kappa = 2.0;
  const lot::EmbeddingSet set = lot::embed_samples(ref, samples, {lot::MetricKind::HK, 2.0}, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(lot::pca(set).eigenvalues);
}
BENCHMARK(BM_DiskLinePca)->Arg(10)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_EmbedDiskLine(benchmark::State& state) {
  const lot::DiscreteMeasure ref = lot::disk_line_reference(5.0, 0.2);
  const auto samples = lot::gen_disk_line(5.0, 0.2, 1, 7);
  lot::SolverConfig cfg;
  cfg.kappa = 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(lot::embed(ref, samples[0], {lot::MetricKind::HK, 2.0}, cfg));
}
BENCHMARK(BM_EmbedDiskLine)->Unit(benchmark::kMillisecond);

}  // namespace
