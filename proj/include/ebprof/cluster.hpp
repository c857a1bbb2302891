#ifndef EBPROF_CLUSTER_HPP
#define EBPROF_CLUSTER_HPP

#include "ebprof/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ebprof {

struct KMeansConfig {
    std::size_t k = 6;
    std::size_t restarts = 10;
    std::size_t max_iter = 300;
    std::uint64_t seed = 0;
};

struct KMeansModel {
    std::size_t k = 0;
    Matrix centroids;
    std::vector<std::size_t> labels;
    double inertia = 0.0;
    std::size_t iterations = 0;
    /// Inertia after each assignment step of the returned run.
    std::vector<double> inertia_trace;
    std::size_t restart = 0;
};

/// Nearest centroid per point, ties to the smallest index.
std::vector<std::size_t> assign(const Matrix& points, const Matrix& centroids);

double inertia(const Matrix& points, const Matrix& centroids, const std::vector<std::size_t>& labels);

/// k-means++ seeding.
Matrix kmeanspp_seed(const Matrix& points, std::size_t k, std::uint64_t seed);

/// Lloyd iterations from given centroids until the assignment stops changing or max_iter.
/// Empty clusters take the point farthest from its centroid.
KMeansModel lloyd(const Matrix& points, Matrix centroids, std::size_t max_iter);

/// Best-inertia run over `restarts` seeded restarts (ties to the lower restart index).
/// Throws TooFewPoints when N < k.
KMeansModel kmeans_fit(const Matrix& points, const KMeansConfig& cfg);

struct ElbowPoint {
    std::size_t k = 0;
    double inertia = 0.0;
};
std::vector<ElbowPoint> elbow(const Matrix& points, std::size_t k_min, std::size_t k_max, const KMeansConfig& cfg);

struct ProfileSummary {
    std::string profile_id; // P1..Pk
    std::size_t cluster = 0;
    std::vector<std::string> members;
    std::vector<double> median; // coordinate-wise median of members' eigenbehaviors
};

/// Profiles ordered by descending member count, ties by centroid x. Empty clusters are skipped.
std::vector<ProfileSummary> summarize_profiles(const std::vector<std::size_t>& labels, const Matrix& eigenbehaviors,
                                               const std::vector<std::string>& ids, const Matrix& centroids);

/// Coordinate-wise median (mean of the middle pair for even counts).
double median(std::vector<double> values);

} // namespace ebprof

#endif
