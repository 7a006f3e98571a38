#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "trotterkit/kernels.hpp"
#include "trotterkit/random.hpp"

using namespace trotterkit;

namespace {

struct Dense {
  Eigen::MatrixXd P;
  Eigen::VectorXd w;
};

Dense dense(Eigen::Index m) {
  std::mt19937_64 rng = trial_rng(11, 0);
  Dense d{Eigen::MatrixXd(m, m), Eigen::VectorXd(m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    d.w(i) = uniform(rng, -1, 1);
    for (Eigen::Index j = 0; j < m; ++j) d.P(i, j) = uniform(rng, 0, 1);
  }
  return d;
}

std::vector<Point> cloud(std::size_t n) {
  std::mt19937_64 rng = trial_rng(12, 0);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(Point::at({uniform(rng, 0, 1), uniform(rng, 0, 1)}));
  return pts;
}

template <auto Kernel>
void matvec(benchmark::State& state) {
  const Dense d = dense(state.range(0));
  Eigen::VectorXd out;
  for (auto _ : state) {
    Kernel(d.P, d.w, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Kernel>
void distances(benchmark::State& state) {
  const auto R2 = StateSpace::euclidean(2);
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(*R2, pts));
}

template <auto Kernel>
void lipschitz(benchmark::State& state) {
  const auto R2 = StateSpace::euclidean(2);
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
  const Eigen::MatrixXd D = kernels::pairwise_distances_serial(*R2, pts);
  std::mt19937_64 rng = trial_rng(13, 0);
  std::vector<double> v(pts.size());
  for (auto& x : v) x = uniform(rng, -1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(v, D));
}

template <auto Kernel>
void vertex_max(benchmark::State& state) {
  std::mt19937_64 rng = trial_rng(14, 0);
  const auto k = static_cast<std::size_t>(state.range(0));
  const Eigen::MatrixXd D = random_metric(k, rng);
  std::vector<double> c(k);
  for (auto& x : c) x = uniform(rng, -1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(c, D));
}

}  // namespace

BENCHMARK(matvec<kernels::matvec_serial>)->Arg(64)->Arg(512)->Arg(2048);
BENCHMARK(matvec<kernels::matvec_parallel>)->Arg(64)->Arg(512)->Arg(2048);
BENCHMARK(distances<kernels::pairwise_distances_serial>)->Arg(100)->Arg(1000);
BENCHMARK(distances<kernels::pairwise_distances_parallel>)->Arg(100)->Arg(1000);
BENCHMARK(lipschitz<kernels::lipschitz_ratio_serial>)->Arg(100)->Arg(1000);
BENCHMARK(lipschitz<kernels::lipschitz_ratio_parallel>)->Arg(100)->Arg(1000);
BENCHMARK(vertex_max<kernels::bl_vertex_max_serial>)->Arg(3)->Arg(5);
BENCHMARK(vertex_max<kernels::bl_vertex_max_parallel>)->Arg(3)->Arg(5);

BENCHMARK_MAIN();
