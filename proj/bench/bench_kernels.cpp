// Serial vs OpenMP kernels. Run with OMP_NUM_THREADS set to compare thread counts.

#include "ebprof/kernels.hpp"
#include "ebprof/pipeline.hpp"
#include "ebprof/synth.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace ebprof;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (double& x : m.data()) x = g(rng);
    return m;
}

std::vector<double> column_means(const Matrix& m) {
    std::vector<double> mu(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t c = 0; c < m.cols(); ++c) mu[c] += m(i, c);
    for (double& x : mu) x /= static_cast<double>(m.rows());
    return mu;
}

template <auto Fn>
void bm_covariance(benchmark::State& state) {
    // Day count x 96 one-hot columns, as in a building's binary matrix.
    const Matrix rows = random_matrix(static_cast<std::size_t>(state.range(0)), 96, 1);
    const auto mu = column_means(rows);
    for (auto _ : state) benchmark::DoNotOptimize(Fn(rows, mu));
}

template <auto Fn>
void bm_knn(benchmark::State& state) {
    const Matrix points = random_matrix(static_cast<std::size_t>(state.range(0)), 96 * 3, 2);
    for (auto _ : state) benchmark::DoNotOptimize(Fn(points, 15));
}

template <auto Fn>
void bm_nearest_centroid(benchmark::State& state) {
    const Matrix points = random_matrix(static_cast<std::size_t>(state.range(0)), 2, 3);
    const Matrix centroids = random_matrix(6, 2, 4);
    for (auto _ : state) benchmark::DoNotOptimize(Fn(points, centroids));
}

const SynthCorpus& corpus() {
    static const SynthCorpus c = [] {
        SynthConfig sc;
        sc.buildings = 64;
        sc.days = 365;
        return generate_synthetic(sc);
    }();
    return c;
}

template <auto Fn>
void bm_fit_all(benchmark::State& state) {
    const auto& c = corpus();
    for (auto _ : state) benchmark::DoNotOptimize(Fn(c.meters, c.metadata, PipelineConfig{}));
}

} // namespace

BENCHMARK(bm_covariance<kernels::covariance_serial>)->Arg(365)->Arg(730);
BENCHMARK(bm_covariance<kernels::covariance>)->Arg(365)->Arg(730);
BENCHMARK(bm_knn<kernels::knn_serial>)->Arg(500)->Arg(1636);
BENCHMARK(bm_knn<kernels::knn>)->Arg(500)->Arg(1636);
BENCHMARK(bm_nearest_centroid<kernels::nearest_centroid_serial>)->Arg(1636)->Arg(100000);
BENCHMARK(bm_nearest_centroid<kernels::nearest_centroid>)->Arg(1636)->Arg(100000);
BENCHMARK(bm_fit_all<fit_all_serial>)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_fit_all<fit_all>)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
