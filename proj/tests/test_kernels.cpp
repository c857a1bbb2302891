#include "ebprof/kernels.hpp"
#include "ebprof/pipeline.hpp"
#include "ebprof/synth.hpp"

#include <doctest.h>

#include <omp.h>
#include <random>

using namespace ebprof;

namespace {

Matrix points(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(n, d);
    for (double& x : m.data()) x = std::round(g(rng) * 4.0) / 4.0; // coarse grid forces distance ties
    return m;
}

} // namespace

TEST_CASE("parallel kernels agree bitwise with their serial twins") {
    omp_set_num_threads(4);
    const Matrix p = points(300, 96, 1);
    std::vector<double> mean(96, 0.0);
    for (std::size_t i = 0; i < 300; ++i)
        for (std::size_t c = 0; c < 96; ++c) mean[c] += p(i, c) / 300.0;
    CHECK(kernels::covariance(p, mean) == kernels::covariance_serial(p, mean));

    const auto a = kernels::knn(p, 15);
    const auto b = kernels::knn_serial(p, 15);
    CHECK(a.indices == b.indices);
    CHECK(a.distances == b.distances);

    const Matrix c = points(6, 96, 2);
    CHECK(kernels::nearest_centroid(p, c) == kernels::nearest_centroid_serial(p, c));
}

TEST_CASE("parallel per-building fitting matches the serial loop") {
    omp_set_num_threads(4);
    SynthConfig sc;
    sc.buildings = 9;
    sc.days = 21;
    const auto corpus = generate_synthetic(sc);
    const auto par = fit_all(corpus.meters, corpus.metadata, PipelineConfig{});
    const auto ser = fit_all_serial(corpus.meters, corpus.metadata, PipelineConfig{});
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].status.building_id == ser[i].status.building_id);
        REQUIRE(par[i].model.has_value());
        CHECK(par[i].model->eigenvalues == ser[i].model->eigenvalues);
        CHECK(par[i].model->eigenvectors == ser[i].model->eigenvectors);
        CHECK(par[i].classification->assigned == ser[i].classification->assigned);
    }
}
