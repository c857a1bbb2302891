#ifndef EBPROF_TESTS_FIXTURES_HPP
#define EBPROF_TESTS_FIXTURES_HPP

#include "ebprof/matrix.hpp"

#include <random>
#include <vector>

namespace fixture {

struct Blobs {
    ebprof::Matrix points;
    std::vector<std::size_t> truth;
    std::vector<std::vector<double>> centers;
};

// `per` points around each of `k` random centers in `dim` dimensions, centers at least
// `separation` apart.
inline Blobs gaussian_blobs(std::size_t k, std::size_t per, std::size_t dim, double sigma, double separation,
                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Blobs b;
    while (b.centers.size() < k) {
        std::vector<double> c(dim);
        for (double& x : c) x = n(rng) * separation;
        bool ok = true;
        for (const auto& o : b.centers) {
            double s = 0.0;
            for (std::size_t i = 0; i < dim; ++i) s += (c[i] - o[i]) * (c[i] - o[i]);
            ok = ok && s >= separation * separation;
        }
        if (ok) b.centers.push_back(c);
    }
    b.points = ebprof::Matrix(k * per, dim);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t p = 0; p < per; ++p) {
            const std::size_t row = c * per + p;
            b.truth.push_back(c);
            for (std::size_t i = 0; i < dim; ++i) b.points(row, i) = b.centers[c][i] + sigma * n(rng);
        }
    return b;
}

} // namespace fixture

#endif
