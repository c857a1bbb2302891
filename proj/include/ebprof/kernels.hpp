#ifndef EBPROF_KERNELS_HPP
#define EBPROF_KERNELS_HPP

// Data-parallel inner loops. Each OpenMP kernel has a serial twin that performs the
// same arithmetic in the same order per output element, so the two agree bitwise;
// the serial versions are kept as test references and benchmark baselines.

#include "ebprof/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ebprof::kernels {

/// (1/D) * sum_i (x_i - mean)(x_i - mean)^T over the rows of `samples`.
Matrix covariance(const Matrix& samples, std::span<const double> mean);
Matrix covariance_serial(const Matrix& samples, std::span<const double> mean);

/// Exact k nearest neighbours (Euclidean, self excluded, ties to the smaller index).
/// Output is N*k, row i ascending by distance.
struct Neighbors {
    std::vector<std::size_t> indices;
    std::vector<double> distances;
};
Neighbors knn(const Matrix& points, std::size_t k);
Neighbors knn_serial(const Matrix& points, std::size_t k);

/// Nearest centroid per point, ties to the smallest centroid index.
std::vector<std::size_t> nearest_centroid(const Matrix& points, const Matrix& centroids);
std::vector<std::size_t> nearest_centroid_serial(const Matrix& points, const Matrix& centroids);

} // namespace ebprof::kernels

#endif
