#include "ebprof/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace ebprof::kernels {

namespace {

// Deviations stored feature-major so each covariance entry is a contiguous dot product.
Matrix centered_transpose(const Matrix& samples, std::span<const double> mean) {
    Matrix out(samples.cols(), samples.rows());
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        for (std::size_t a = 0; a < samples.cols(); ++a) out(a, i) = samples(i, a) - mean[a];
    }
    return out;
}

void covariance_row(const Matrix& dev, std::size_t a, double inv_n, Matrix& c) {
    const auto ra = dev.row(a);
    for (std::size_t b = a; b < dev.rows(); ++b) {
        const double v = dot(ra, dev.row(b)) * inv_n;
        c(a, b) = v;
        c(b, a) = v;
    }
}

void knn_row(const Matrix& points, std::size_t i, std::size_t k, std::vector<std::pair<double, std::size_t>>& scratch,
             Neighbors& out) {
    scratch.clear();
    for (std::size_t j = 0; j < points.rows(); ++j) {
        if (j == i) continue;
        scratch.emplace_back(squared_distance(points.row(i), points.row(j)), j);
    }
    std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), scratch.end());
    for (std::size_t n = 0; n < k; ++n) {
        out.indices[i * k + n] = scratch[n].second;
        out.distances[i * k + n] = std::sqrt(scratch[n].first);
    }
}

std::size_t nearest(std::span<const double> p, const Matrix& centroids) {
    std::size_t best = 0;
    double best_d = squared_distance(p, centroids.row(0));
    for (std::size_t c = 1; c < centroids.rows(); ++c) {
        const double d = squared_distance(p, centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

} // namespace

Matrix covariance(const Matrix& samples, std::span<const double> mean) {
    const Matrix dev = centered_transpose(samples, mean);
    const std::size_t h = samples.cols();
    Matrix c(h, h);
    if (samples.rows() == 0) return c;
    const double inv_n = 1.0 / static_cast<double>(samples.rows());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(h); ++a) {
        covariance_row(dev, static_cast<std::size_t>(a), inv_n, c);
    }
    return c;
}

Matrix covariance_serial(const Matrix& samples, std::span<const double> mean) {
    const Matrix dev = centered_transpose(samples, mean);
    const std::size_t h = samples.cols();
    Matrix c(h, h);
    if (samples.rows() == 0) return c;
    const double inv_n = 1.0 / static_cast<double>(samples.rows());
    for (std::size_t a = 0; a < h; ++a) covariance_row(dev, a, inv_n, c);
    return c;
}

Neighbors knn(const Matrix& points, std::size_t k) {
    const std::size_t n = points.rows();
    Neighbors out{std::vector<std::size_t>(n * k), std::vector<double>(n * k)};
#pragma omp parallel
    {
        std::vector<std::pair<double, std::size_t>> scratch;
        scratch.reserve(n);
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            knn_row(points, static_cast<std::size_t>(i), k, scratch, out);
        }
    }
    return out;
}

Neighbors knn_serial(const Matrix& points, std::size_t k) {
    const std::size_t n = points.rows();
    Neighbors out{std::vector<std::size_t>(n * k), std::vector<double>(n * k)};
    std::vector<std::pair<double, std::size_t>> scratch;
    scratch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) knn_row(points, i, k, scratch, out);
    return out;
}

std::vector<std::size_t> nearest_centroid(const Matrix& points, const Matrix& centroids) {
    std::vector<std::size_t> labels(points.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(points.rows()); ++i) {
        labels[static_cast<std::size_t>(i)] = nearest(points.row(static_cast<std::size_t>(i)), centroids);
    }
    return labels;
}

std::vector<std::size_t> nearest_centroid_serial(const Matrix& points, const Matrix& centroids) {
    std::vector<std::size_t> labels(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) labels[i] = nearest(points.row(i), centroids);
    return labels;
}

} // namespace ebprof::kernels
