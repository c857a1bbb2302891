#include "ebprof/cluster.hpp"
#include "ebprof/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace ebprof;

namespace {

Matrix uniform_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    Matrix m(n, d);
    for (double& x : m.data()) x = u(rng);
    return m;
}

} // namespace

TEST_CASE("k = 1 gives the mean") {
    const Matrix p = uniform_points(37, 2, 1);
    KMeansConfig cfg;
    cfg.k = 1;
    const auto m = kmeans_fit(p, cfg);
    for (std::size_t c = 0; c < 2; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < 37; ++i) s += p(i, c);
        CHECK(std::abs(m.centroids(0, c) - s / 37.0) <= 1e-9);
    }
    for (auto l : m.labels) CHECK(l == 0);
}

TEST_CASE("two tight blobs far apart are recovered exactly") {
    const auto b = fixture::gaussian_blobs(2, 25, 2, 0.5, 100.0, 2);
    KMeansConfig cfg;
    cfg.k = 2;
    cfg.seed = 3;
    const auto m = kmeans_fit(b.points, cfg);
    CHECK(oracle::matched_accuracy(m.labels, b.truth, 2) == 1.0);
    for (std::size_t c = 0; c < 2; ++c) {
        const std::size_t blob = b.truth[std::find(m.labels.begin(), m.labels.end(), c) - m.labels.begin()];
        for (std::size_t d = 0; d < 2; ++d) {
            double s = 0.0;
            for (std::size_t i = 0; i < 25; ++i) s += b.points(blob * 25 + i, d);
            CHECK(std::abs(m.centroids(c, d) - s / 25.0) <= 1e-6);
        }
    }
}

TEST_CASE("Lloyd inertia never increases") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Matrix p = uniform_points(60, 2, 100 + s);
        const auto m = lloyd(p, kmeanspp_seed(p, 5, s), 300);
        for (std::size_t i = 1; i < m.inertia_trace.size(); ++i) REQUIRE(m.inertia_trace[i] <= m.inertia_trace[i - 1]);
        REQUIRE(m.inertia == doctest::Approx(inertia(p, m.centroids, m.labels)).epsilon(1e-9));
    }
}

TEST_CASE("model invariants: labels are nearest centroids and inertia matches") {
    const Matrix p = uniform_points(200, 2, 7);
    KMeansConfig cfg;
    cfg.seed = 8;
    const auto m = kmeans_fit(p, cfg);
    CHECK(assign(p, m.centroids) == m.labels);
    double total = 0.0;
    for (std::size_t i = 0; i < 200; ++i) total += squared_distance(p.row(i), m.centroids.row(m.labels[i]));
    CHECK(m.inertia == doctest::Approx(total).epsilon(1e-9));
    CHECK(kmeans_fit(p, cfg).centroids == m.centroids);
}

TEST_CASE("assign ties and exact hits") {
    Matrix c(4, 2);
    c(1, 0) = -1.0;
    c(2, 0) = 1.0;
    c(3, 0) = 7.0;
    c(3, 1) = 7.0;
    c(0, 1) = 50.0;
    Matrix p(2, 2);
    p(0, 0) = 7.0;
    p(0, 1) = 7.0;
    const auto l = assign(p, c);
    CHECK(l[0] == 3);
    CHECK(l[1] == 1);
}

TEST_CASE("empty clusters are repaired") {
    Matrix p(5, 1);
    for (std::size_t i = 0; i < 5; ++i) p(i, 0) = static_cast<double>(i);
    Matrix c(2, 1);
    c(0, 0) = 2.0;
    c(1, 0) = 1000.0;
    const auto m = lloyd(p, c, 100);
    std::vector<std::size_t> counts(2, 0);
    for (auto l : m.labels) ++counts[l];
    CHECK(counts[0] > 0);
    CHECK(counts[1] > 0);
}

TEST_CASE("too few points") {
    KMeansConfig cfg;
    cfg.k = 6;
    CHECK_THROWS_AS(kmeans_fit(uniform_points(5, 2, 1), cfg), Error);
}

TEST_CASE("elbow covers the requested range") {
    const Matrix p = uniform_points(80, 2, 9);
    KMeansConfig cfg;
    const auto e = elbow(p, 2, 12, cfg);
    REQUIRE(e.size() == 11);
    CHECK(e.front().k == 2);
    CHECK(e.back().k == 12);
}

TEST_CASE("median and profile summaries") {
    CHECK(median({1, 2, 9}) == 2.0);
    CHECK(median({4, 1, 3, 2}) == 2.5);
    CHECK(median({5}) == 5.0);

    Matrix vecs(6, 3);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t c = 0; c < 3; ++c) vecs(i, c) = static_cast<double>(i * 10 + c);
    const std::vector<std::string> ids{"a", "b", "c", "d", "e", "f"};
    const std::vector<std::size_t> labels{2, 0, 0, 1, 1, 0};
    Matrix cent(3, 2);
    cent(0, 0) = 5.0;
    cent(1, 0) = -1.0;
    cent(2, 0) = 0.0;
    const auto prof = summarize_profiles(labels, vecs, ids, cent);
    REQUIRE(prof.size() == 3);
    CHECK(prof[0].profile_id == "P1");
    CHECK(prof[0].cluster == 0);
    CHECK(prof[0].members == std::vector<std::string>{"b", "c", "f"});
    CHECK(prof[0].median == std::vector<double>{20.0, 21.0, 22.0});
    CHECK(prof[1].cluster == 1);
    CHECK(prof[1].median == std::vector<double>{35.0, 36.0, 37.0});
    CHECK(prof[2].profile_id == "P3");
    CHECK(prof[2].members == std::vector<std::string>{"a"});
    CHECK(prof[2].median == std::vector<double>{0.0, 1.0, 2.0});

    std::size_t covered = 0;
    for (const auto& p : prof) covered += p.members.size();
    CHECK(covered == ids.size());
}

TEST_CASE("permuting points permutes labels") {
    const auto b = fixture::gaussian_blobs(3, 20, 2, 0.3, 20.0, 12);
    KMeansConfig cfg;
    cfg.k = 3;
    cfg.seed = 4;
    const auto m = kmeans_fit(b.points, cfg);
    std::vector<std::size_t> perm(60);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(6);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix q(60, 2);
    for (std::size_t i = 0; i < 60; ++i)
        for (std::size_t c = 0; c < 2; ++c) q(i, c) = b.points(perm[i], c);
    const auto mq = kmeans_fit(q, cfg);
    std::vector<std::size_t> expected(60);
    for (std::size_t i = 0; i < 60; ++i) expected[i] = m.labels[perm[i]];
    CHECK(oracle::matched_accuracy(mq.labels, expected, 3) == 1.0);
}
