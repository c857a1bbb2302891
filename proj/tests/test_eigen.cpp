#include "ebprof/behavior.hpp"
#include "ebprof/eigen.hpp"
#include "ebprof/error.hpp"
#include "ebprof/jacobi.hpp"
#include "ebprof/synth.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace ebprof;

namespace {

Matrix random_binary(std::size_t d, std::size_t h, std::mt19937_64& rng) {
    Matrix m(d, h);
    for (double& x : m.data()) x = static_cast<double>(rng() & 1U);
    return m;
}

BinaryBehaviorMatrix random_days(std::size_t d, std::mt19937_64& rng) {
    CategoricalDayMatrix cat;
    for (std::size_t i = 0; i < d; ++i) {
        cat.days.push_back(static_cast<CivilDay>(i));
        for (int h = 0; h < 24; ++h) cat.labels.push_back(static_cast<std::uint8_t>(rng() % 4));
    }
    return binarize(cat);
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

TEST_CASE("mean_behavior") {
    Matrix two(2, 96);
    two(0, 3) = two(1, 3) = 1.0;
    two(0, 50) = two(1, 50) = 1.0;
    CHECK(mean_behavior(two) == std::vector<double>(two.row(0).begin(), two.row(0).end()));

    Matrix ab(2, 96);
    ab(0, 0) = 1.0;
    ab(1, 1) = 1.0;
    const auto mu = mean_behavior(ab);
    CHECK(mu[0] == 0.5);
    CHECK(mu[1] == 0.5);
    for (std::size_t c = 2; c < 96; ++c) CHECK(mu[c] == 0.0);

    std::mt19937_64 rng(3);
    const Matrix r = random_binary(5, 96, rng);
    oracle::Mat rows;
    for (std::size_t i = 0; i < 5; ++i) rows.emplace_back(r.row(i).begin(), r.row(i).end());
    const auto ref = oracle::column_mean(rows);
    const auto got = mean_behavior(r);
    for (std::size_t c = 0; c < 96; ++c) CHECK(std::abs(got[c] - ref[c]) <= 1e-12);
}

TEST_CASE("covariance examples") {
    std::mt19937_64 rng(4);
    const Matrix one = random_binary(1, 96, rng);
    const Matrix c1 = covariance(one, mean_behavior(one));
    for (double x : c1.data()) CHECK(x == 0.0);

    std::vector<double> mu(96), d(96);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < 96; ++i) {
        mu[i] = u(rng);
        d[i] = u(rng);
    }
    Matrix pm(2, 96);
    for (std::size_t i = 0; i < 96; ++i) {
        pm(0, i) = mu[i] + d[i];
        pm(1, i) = mu[i] - d[i];
    }
    const Matrix c = covariance(pm, mean_behavior(pm));
    for (std::size_t a = 0; a < 96; ++a)
        for (std::size_t b = 0; b < 96; ++b) CHECK(c(a, b) == doctest::Approx(d[a] * d[b]).epsilon(1e-12).scale(1.0));

    const Matrix r = random_binary(10, 96, rng);
    const Matrix cr = covariance(r, mean_behavior(r));
    for (std::size_t a = 0; a < 96; ++a)
        for (std::size_t b = 0; b < 96; ++b) REQUIRE(cr(a, b) == cr(b, a));
    std::normal_distribution<double> n(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> x(96);
        for (double& v : x) v = n(rng);
        double q = 0.0;
        for (std::size_t a = 0; a < 96; ++a) q += x[a] * dot(cr.row(a), x);
        REQUIRE(q >= -1e-10);
    }
}

TEST_CASE("eigendecompose: identity and [[2,1],[1,2]]") {
    Matrix id(2, 2);
    id(0, 0) = id(1, 1) = 1.0;
    const auto ei = eigendecompose(id);
    CHECK(ei.values[0] == doctest::Approx(1.0));
    CHECK(ei.values[1] == doctest::Approx(1.0));
    CHECK(std::abs(dot(ei.vectors.row(0), ei.vectors.row(1))) <= 1e-12);

    Matrix c(2, 2);
    c(0, 0) = c(1, 1) = 2.0;
    c(0, 1) = c(1, 0) = 1.0;
    const auto es = eigendecompose(c);
    CHECK(es.values[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(es.values[1] == doctest::Approx(1.0).epsilon(1e-12));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(es.vectors(0, 0) == doctest::Approx(r));
    CHECK(es.vectors(0, 1) == doctest::Approx(r));
    // (1,-1) and (-1,1) tie on magnitude; the smaller index takes the positive sign.
    CHECK(es.vectors(1, 0) == doctest::Approx(r));
    CHECK(es.vectors(1, 1) == doctest::Approx(-r));
}

TEST_CASE("eigendecompose: residuals on random symmetric 6x6") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix c(6, 6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = i; j < 6; ++j) c(i, j) = c(j, i) = u(rng);
        const auto es = eigendecompose(c);
        for (std::size_t j = 0; j < 6; ++j) {
            std::vector<double> res(6);
            for (std::size_t i = 0; i < 6; ++i) res[i] = dot(c.row(i), es.vectors.row(j)) - es.values[j] * es.vectors(j, i);
            CHECK(max_abs(res) <= 1e-8);
            if (j > 0) CHECK(es.values[j - 1] >= es.values[j]);
        }
    }
}

TEST_CASE("eigendecompose errors") {
    Matrix c(2, 2);
    c(0, 1) = 1.0;
    CHECK_THROWS_AS(eigendecompose(c), Error);
    try {
        eigendecompose(c);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotSymmetric);
    }
    CHECK_THROWS_AS(eigendecompose(Matrix(2, 3)), Error);

    Matrix hard(6, 6);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i; j < 6; ++j) hard(i, j) = hard(j, i) = u(rng);
    JacobiOptions opts;
    opts.max_sweeps = 1;
    opts.tolerance = 1e-300;
    try {
        eigendecompose(hard, opts);
        FAIL("expected NoConvergence");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoConvergence);
    }
}

TEST_CASE("sign convention: largest-magnitude entry positive") {
    std::vector<double> v{0.1, -0.9, 0.3};
    normalize_sign(v);
    CHECK(v == std::vector<double>{-0.1, 0.9, -0.3});
    std::vector<double> tie{-0.5, 0.5};
    normalize_sign(tie);
    CHECK(tie == std::vector<double>{0.5, -0.5});
}

TEST_CASE("explained_variance") {
    EigenModel m;
    m.eigenvalues = {3.0, 1.0};
    m.explained = {0.75, 0.25};
    m.mean = {0.0, 0.0};
    CHECK(explained_variance(m, 1) == doctest::Approx(0.75));
    CHECK(explained_variance(m, 2) == 1.0);
    CHECK_THROWS_AS(explained_variance(m, 0), Error);
    CHECK_THROWS_AS(explained_variance(m, 3), Error);

    std::mt19937_64 rng(10);
    const auto model = fit_eigen_model(random_days(30, rng));
    CHECK(explained_variance(model, 96) == 1.0);
    double prev = 0.0;
    for (std::size_t t = 1; t <= 96; ++t) {
        const double e = explained_variance(model, t);
        CHECK(e >= prev);
        prev = e;
    }

    BinaryBehaviorMatrix single = random_days(1, rng);
    const auto flat = fit_eigen_model(single);
    for (double l : flat.eigenvalues) CHECK(l == 0.0);
    try {
        explained_variance(flat, 1);
        FAIL("expected DegenerateSpectrum");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateSpectrum);
    }
}

TEST_CASE("fitted model: orthonormality, reconstruction, rank bound") {
    std::mt19937_64 rng(12);
    for (std::size_t d : {3UL, 20UL, 150UL}) {
        const auto bin = random_days(d, rng);
        const auto model = fit_eigen_model(bin);
        const auto& v = model.eigenvectors;
        for (std::size_t j = 0; j < 96; ++j)
            for (std::size_t k = j; k < 96; ++k) REQUIRE(std::abs(dot(v.row(j), v.row(k)) - (j == k ? 1.0 : 0.0)) <= 1e-8);

        std::size_t nonzero = 0;
        for (double l : model.eigenvalues) nonzero += l > kEigenvalueFloor;
        CHECK(nonzero <= std::min<std::size_t>(d, 96));
        // Centering removes one degree of freedom per level block plus the mean itself.
        CHECK(nonzero <= d - 1);

        const auto cls = classify_days(bin, model, 96);
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<double> err(96);
            for (std::size_t c = 0; c < 96; ++c) {
                double g = model.mean[c];
                for (std::size_t j = 0; j < 96; ++j) g += cls.weights(i, j) * v(j, c);
                err[c] = g - bin.rows(i, c);
            }
            REQUIRE(max_abs(err) <= 1e-6);
        }
    }
}

TEST_CASE("spectrum is invariant to day order") {
    std::mt19937_64 rng(14);
    const auto bin = random_days(40, rng);
    auto shuffled = bin;
    std::vector<std::size_t> perm(40);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < 40; ++i) {
        shuffled.days[i] = bin.days[perm[i]];
        for (std::size_t c = 0; c < 96; ++c) shuffled.rows(i, c) = bin.rows(perm[i], c);
    }
    const auto a = fit_eigen_model(bin);
    const auto b = fit_eigen_model(shuffled);
    for (std::size_t j = 0; j < 96; ++j) CHECK(std::abs(a.eigenvalues[j] - b.eigenvalues[j]) <= 1e-10);
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(std::abs(dot(a.eigenvectors.row(j), b.eigenvectors.row(j))) - 1.0) <= 1e-8);
}

TEST_CASE("primary_eigenbehaviors") {
    std::mt19937_64 rng(15);
    const auto model = fit_eigen_model(random_days(25, rng));
    const Matrix one = primary_eigenbehaviors(model, 1);
    REQUIRE(one.rows() == 1);
    CHECK(std::equal(one.row(0).begin(), one.row(0).end(), model.eigenvectors.row(0).begin()));
    const Matrix three = primary_eigenbehaviors(model, 3);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(dot(three.row(j), three.row(k)) - (j == k ? 1.0 : 0.0)) <= 1e-8);
}

TEST_CASE("classify_days examples") {
    std::mt19937_64 rng(16);
    const auto bin = random_days(30, rng);
    const auto model = fit_eigen_model(bin);

    BinaryBehaviorMatrix probe;
    probe.days = {0};
    probe.rows = Matrix(1, 96);
    for (std::size_t c = 0; c < 96; ++c) probe.rows(0, c) = model.mean[c] + 0.3 * model.eigenvectors(1, c);
    const auto cls = classify_days(probe, model, 3);
    CHECK(cls.assigned[0] == 2);
    CHECK(cls.weights(0, 1) == doctest::Approx(0.3));
    CHECK(std::abs(cls.weights(0, 0)) <= 1e-12);

    auto same = random_days(1, rng);
    BinaryBehaviorMatrix copies;
    copies.rows = Matrix(6, 96);
    for (std::size_t i = 0; i < 6; ++i) {
        copies.days.push_back(static_cast<CivilDay>(i));
        for (std::size_t c = 0; c < 96; ++c) copies.rows(i, c) = same.rows(0, c);
    }
    const auto flat = fit_eigen_model(copies);
    const auto fc = classify_days(copies, flat, 3);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(fc.assigned[i] == 1);
        for (std::size_t j = 0; j < 3; ++j) CHECK(fc.weights(i, j) == 0.0);
    }
}

TEST_CASE("classify_days separates a two-regime building at 2% label noise") {
    const auto lr = generate_label_regimes(364, 0.02, 99);
    const auto bin = binarize(lr.matrix);
    const auto cls = classify_days(bin, fit_eigen_model(bin), 3);
    std::vector<std::size_t> got, truth;
    for (std::size_t i = 0; i < cls.assigned.size(); ++i) {
        got.push_back(cls.assigned[i] - 1);
        truth.push_back(static_cast<std::size_t>(lr.regime[i]));
    }
    CHECK(oracle::purity(got, truth) >= 0.95);
}

TEST_CASE("reshape_behavior") {
    std::vector<double> e0(96, 0.0), e77(96, 0.0);
    e0[0] = 1.0;
    e77[77] = 1.0;
    CHECK(reshape_behavior(e0)(0, 0) == 1.0);
    const Matrix g = reshape_behavior(e77);
    CHECK(g.rows() == 4);
    CHECK(g.cols() == 24);
    CHECK(g(3, 5) == 1.0);
    double total = 0.0;
    for (double x : g.data()) total += x;
    CHECK(total == 1.0);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(96);
    for (double& x : v) x = u(rng);
    CHECK(flatten_behavior(reshape_behavior(v)) == v);
    CHECK_THROWS_AS(reshape_behavior(std::vector<double>(95)), Error);
}

TEST_CASE("model JSON round-trip keeps field order and values") {
    std::mt19937_64 rng(18);
    auto bin = random_days(12, rng);
    bin.building_id = "bldg_x";
    const auto model = fit_eigen_model(bin);
    const auto doc = to_json(model);
    std::vector<std::string> keys;
    for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"building_id", "levels", "mean", "eigenvalues", "eigenvectors", "explained"});
    const auto back = eigen_model_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(back.building_id == "bldg_x");
    CHECK(back.mean == model.mean);
    CHECK(back.eigenvalues == model.eigenvalues);
    CHECK(back.eigenvectors == model.eigenvectors);
    CHECK(back.explained == model.explained);
}
