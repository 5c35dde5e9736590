#include <random>

#include <benchmark/benchmark.h>

#include "dyadic/class_weights.hpp"
#include "dyadic/forest.hpp"
#include "dyadic/svm.hpp"

using namespace dyadic;

namespace {

struct Data {
  Matrix x;
  std::vector<int> y;
};

Data make_data(std::size_t n, std::size_t d) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Data out{Matrix(n, d), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.y[i] = i % 10 == 0 ? 0 : 1;
    for (std::size_t j = 0; j < d; ++j) out.x(i, j) = normal(rng) + (j < d / 10 && out.y[i] == 0 ? 0.5 : 0.0);
  }
  return out;
}

void BM_Gram(benchmark::State& state) {
  const Data data = make_data(static_cast<std::size_t>(state.range(0)), 1888);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_matrix(data.x, Kernel::rbf(1.0 / 1888)));
}
BENCHMARK(BM_Gram)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_SvmSolve(benchmark::State& state) {
  const Data data = make_data(static_cast<std::size_t>(state.range(0)), 944);
  const Matrix k = kernel_matrix(data.x, Kernel::rbf(1.0 / 944));
  const auto upper = box_bounds(data.y, 10.0, compute_class_weights(data.y));
  for (auto _ : state) benchmark::DoNotOptimize(solve_svm_dual(k, data.y, upper));
}
BENCHMARK(BM_SvmSolve)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_ForestFit(benchmark::State& state) {
  const Data data = make_data(300, static_cast<std::size_t>(state.range(0)));
  ForestParams p;
  p.n_trees = 20;
  const ClassWeights w = compute_class_weights(data.y);
  for (auto _ : state) benchmark::DoNotOptimize(train_forest(data.x, data.y, w, p));
}
BENCHMARK(BM_ForestFit)->Arg(944)->Arg(1888)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
