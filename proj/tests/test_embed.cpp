#include "ebprof/cluster.hpp"
#include "ebprof/embed.hpp"
#include "ebprof/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace ebprof;

namespace {

Matrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(n, d);
    for (double& x : m.data()) x = g(rng);
    return m;
}

double directed_weight(const NeighborGraph& g, const FuzzyGraph& f, std::size_t i, std::size_t j) {
    const auto nb = g.neighbors(i);
    for (std::size_t m = 0; m < g.k; ++m)
        if (nb[m] == j) return f.directed[i * g.k + m];
    return 0.0;
}

double distance(const Matrix& y, std::size_t a, std::size_t b) {
    return std::sqrt(squared_distance(y.row(a), y.row(b)));
}

EmbedConfig small_config(std::size_t k) {
    EmbedConfig cfg;
    cfg.n_neighbors = k;
    cfg.seed = 1234;
    return cfg;
}

} // namespace

TEST_CASE("knn: collinear points") {
    Matrix p(3, 1);
    p(0, 0) = 0.0;
    p(1, 0) = 1.0;
    p(2, 0) = 10.0;
    const auto g = knn(p, 1);
    CHECK(g.neighbors(0)[0] == 1);
    CHECK(g.neighbors(1)[0] == 0);
    CHECK(g.neighbors(2)[0] == 1);
    CHECK(g.neighbor_distances(2)[0] == 9.0);
}

TEST_CASE("knn: duplicates give zero-distance neighbours, never self") {
    Matrix p(4, 2);
    p(0, 0) = p(1, 0) = 1.0;
    p(2, 0) = 5.0;
    p(3, 0) = 5.0;
    const auto g = knn(p, 2);
    for (std::size_t i = 0; i < 4; ++i)
        for (auto j : g.neighbors(i)) CHECK(j != i);
    CHECK(g.neighbors(0)[0] == 1);
    CHECK(g.neighbor_distances(0)[0] == 0.0);
    CHECK(g.neighbors(2)[0] == 3);
    // Ties between 0 and 1 at distance 4 from point 2 go to the smaller index.
    CHECK(g.neighbors(2)[1] == 0);
}

TEST_CASE("knn matches a full-sort oracle") {
    const Matrix p = random_points(50, 96, 21);
    oracle::Mat rows;
    for (std::size_t i = 0; i < 50; ++i) rows.emplace_back(p.row(i).begin(), p.row(i).end());
    const auto ref = oracle::knn_full_sort(rows, 7);
    const auto g = knn(p, 7);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(std::vector<std::size_t>(g.neighbors(i).begin(), g.neighbors(i).end()) == ref[i]);
        for (std::size_t m = 1; m < 7; ++m) CHECK(g.neighbor_distances(i)[m - 1] <= g.neighbor_distances(i)[m]);
    }
    CHECK_THROWS_AS(knn(p, 50), Error);
}

TEST_CASE("fuzzy memberships: calibration, nearest weight and symmetrisation bounds") {
    const Matrix p = random_points(200, 5, 22);
    const auto g = knn(p, 15);
    const auto f = fuzzy_memberships(g);
    for (std::size_t i = 0; i < 200; ++i) {
        const auto d = g.neighbor_distances(i);
        CHECK(f.rho[i] == d[0]);
        CHECK(f.directed[i * 15] == 1.0);
        CHECK(std::abs(membership_sum(d, f.rho[i], f.sigma[i]) - std::log2(15.0)) <= 1e-5);
    }
    for (const auto& e : f.edges) {
        CHECK(e.i < e.j);
        CHECK(e.weight > 0.0);
        CHECK(e.weight <= 1.0);
        const double aij = directed_weight(g, f, e.i, e.j), aji = directed_weight(g, f, e.j, e.i);
        CHECK(e.weight == doctest::Approx(aij + aji - aij * aji).epsilon(1e-15));
        CHECK(e.weight >= std::max(aij, aji) - 1e-15);
        CHECK(e.weight <= std::min(1.0, aij + aji) + 1e-15);
        CHECK(f.weight(e.j, e.i) == e.weight);
    }
}

TEST_CASE("fuzzy union: a one-sided nearest-neighbour edge has weight 1") {
    // Point 2 is nearest to 1, but 2 is not among 1's single neighbour.
    Matrix p(3, 1);
    p(0, 0) = 0.0;
    p(1, 0) = 1.0;
    p(2, 0) = 10.0;
    const auto f = fuzzy_memberships(knn(p, 1));
    CHECK(f.weight(1, 2) == 1.0);
    CHECK(f.weight(0, 2) == 0.0);
}

TEST_CASE("fuzzy memberships: all-zero neighbour distances") {
    Matrix p(4, 2, 1.0);
    const auto f = fuzzy_memberships(knn(p, 3));
    for (double a : f.directed) CHECK(a == 1.0);
    for (double s : f.sigma) CHECK(s == 0.0);
    for (const auto& e : f.edges) CHECK(e.weight == 1.0);
}

TEST_CASE("fit_curve against a least-squares reference") {
    // Reference values from scipy.optimize.curve_fit on the same 300-point target.
    const struct {
        double min_dist, a, b;
    } ref[] = {{0.01, 1.8956058664339035, 0.8006378442860499},
               {0.1, 1.5769434602697652, 0.8950608778515733},
               {0.5, 0.5830300203414425, 1.3341669924314914}};
    double prev_a = 1e9;
    for (const auto& r : ref) {
        const auto c = fit_curve(r.min_dist);
        CHECK(c.a == doctest::Approx(r.a).epsilon(1e-4));
        CHECK(c.b == doctest::Approx(r.b).epsilon(1e-4));
        CHECK(1.0 / (1.0 + c.a * std::pow(0.0, 2.0 * c.b)) == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(c.a < prev_a);
        prev_a = c.a;
    }
    const auto c = fit_curve(0.1);
    CHECK(std::abs(c.a - 1.577) <= 0.02);
    CHECK(std::abs(c.b - 0.895) <= 0.02);
    const auto again = fit_curve(0.1);
    CHECK(again.a == c.a);
    CHECK(again.b == c.b);
}

TEST_CASE("optimize_layout: zero epochs and a single attracting edge") {
    FuzzyGraph f;
    f.n = 2;
    f.rho = {1.0, 1.0};
    f.sigma = {1.0, 1.0};
    f.edges = {{0, 1, 1.0}};
    Matrix init(2, 2);
    init(1, 0) = 10.0;
    EmbedConfig cfg;
    cfg.epochs = 0;
    CHECK(optimize_layout(f, cfg, init).coords == init);

    cfg.epochs = 50;
    cfg.negative_samples = 0;
    const auto out = optimize_layout(f, cfg, init);
    CHECK(distance(out.coords, 0, 1) < 10.0);

    Matrix bad = init;
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(optimize_layout(f, cfg, bad), Error);
}

TEST_CASE("embed: preconditions and config validation") {
    const Matrix p = random_points(15, 4, 23);
    EmbedConfig cfg;
    CHECK_THROWS_AS(embed(p, cfg), Error);
    try {
        embed(p, cfg);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewPoints);
    }
    cfg.n_neighbors = 1;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = EmbedConfig{};
    cfg.min_dist = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = EmbedConfig{};
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = EmbedConfig{};
    cfg.a = 1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("pca_init spans [-10, 10] on each axis") {
    const Matrix p = random_points(40, 6, 24);
    const Matrix y = pca_init(p);
    for (std::size_t c = 0; c < 2; ++c) {
        double lo = 1e9, hi = -1e9;
        for (std::size_t i = 0; i < 40; ++i) {
            lo = std::min(lo, y(i, c));
            hi = std::max(hi, y(i, c));
        }
        CHECK(lo == doctest::Approx(-10.0));
        CHECK(hi == doctest::Approx(10.0));
    }
}

TEST_CASE("embed is deterministic and equivariant to reordering") {
    const Matrix p = random_points(60, 12, 25);
    const auto cfg = small_config(8);
    const auto a = embed(p, cfg);
    const auto b = embed(p, cfg);
    CHECK(a.coords == b.coords);

    std::vector<std::size_t> perm(60);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(3);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix q(60, 12);
    for (std::size_t i = 0; i < 60; ++i)
        for (std::size_t c = 0; c < 12; ++c) q(i, c) = p(perm[i], c);
    const auto pe = embed(q, cfg);
    for (std::size_t i = 0; i < 60; ++i) {
        CHECK(pe.coords(i, 0) == a.coords(perm[i], 0));
        CHECK(pe.coords(i, 1) == a.coords(perm[i], 1));
    }

    auto other = cfg;
    other.seed = 99;
    CHECK_FALSE(embed(p, other).coords == a.coords);
}

TEST_CASE("embed keeps duplicated points together") {
    // With only a few dozen points the 5th percentile holds barely more pairs than there are
    // duplicates, and negative-sampling kicks decide the outcome; 100 points leaves room.
    constexpr std::size_t n = 100;
    const Matrix p = random_points(n, 10, 26);
    Matrix twice(2 * n, 10);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < 10; ++c) twice(i, c) = twice(i + n, c) = p(i, c);
    EmbedConfig cfg;
    cfg.seed = 1234;
    const auto emb = embed(twice, cfg);
    std::vector<double> all;
    for (std::size_t i = 0; i < 2 * n; ++i)
        for (std::size_t j = i + 1; j < 2 * n; ++j) all.push_back(distance(emb.coords, i, j));
    std::sort(all.begin(), all.end());
    const double p5 = all[all.size() / 20];
    for (std::size_t i = 0; i < n; ++i) CHECK(distance(emb.coords, i, i + n) <= p5);
}

TEST_CASE("embedding separates blobs in both layout modes") {
    const auto blobs = fixture::gaussian_blobs(3, 30, 96, 0.01, 5.0, 31);
    for (auto mode : {LayoutMode::Sequential, LayoutMode::Parallel}) {
        EmbedConfig cfg;
        cfg.mode = mode;
        const auto emb = embed(blobs.points, cfg);
        for (double x : emb.coords.data()) CHECK(std::isfinite(x));
        KMeansConfig kc;
        kc.k = 3;
        kc.seed = 5;
        const auto km = kmeans_fit(emb.coords, kc);
        CHECK(oracle::purity(km.labels, blobs.truth) >= 0.9);
    }
}

TEST_CASE("embedding CSV round-trip") {
    Embedding e;
    e.building_ids = {"a", "b,c"};
    e.coords = Matrix(2, 2);
    e.coords(0, 0) = 0.1;
    e.coords(0, 1) = -3.25;
    e.coords(1, 0) = 1e-17;
    e.coords(1, 1) = 7.0;
    std::ostringstream out;
    write_embedding_csv(out, e);
    CHECK(out.str().rfind("building_id,x,y\n", 0) == 0);
    std::istringstream in(out.str());
    const auto back = read_embedding_csv(in);
    CHECK(back.building_ids == e.building_ids);
    CHECK(back.coords == e.coords);
}
