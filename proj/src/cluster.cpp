#include "ebprof/cluster.hpp"

#include "ebprof/error.hpp"
#include "ebprof/kernels.hpp"
#include "ebprof/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ebprof {

namespace {

Matrix update_centroids(const Matrix& points, const std::vector<std::size_t>& labels, const Matrix& previous) {
    Matrix sums(previous.rows(), points.cols());
    std::vector<std::size_t> counts(previous.rows(), 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const auto p = points.row(i);
        auto s = sums.row(labels[i]);
        for (std::size_t c = 0; c < p.size(); ++c) s[c] += p[c];
        ++counts[labels[i]];
    }
    for (std::size_t j = 0; j < sums.rows(); ++j) {
        auto s = sums.row(j);
        if (counts[j] == 0) {
            const auto prev = previous.row(j);
            std::copy(prev.begin(), prev.end(), s.begin());
            continue;
        }
        for (double& v : s) v /= static_cast<double>(counts[j]);
    }
    return sums;
}

// Moves the farthest points into empty clusters, one per empty cluster. Donors must keep
// at least one member.
void repair_empty(const Matrix& points, Matrix& centroids, std::vector<std::size_t>& labels) {
    const std::size_t k = centroids.rows();
    std::vector<std::size_t> counts(k, 0);
    for (auto l : labels) ++counts[l];
    std::vector<bool> moved(points.rows(), false);
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] != 0) continue;
        std::size_t best = points.rows();
        double best_d = -1.0;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (moved[i] || counts[labels[i]] < 2) continue;
            const double d = squared_distance(points.row(i), centroids.row(labels[i]));
            if (d > best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best == points.rows()) continue;
        --counts[labels[best]];
        labels[best] = j;
        counts[j] = 1;
        moved[best] = true;
        const auto p = points.row(best);
        std::copy(p.begin(), p.end(), centroids.row(j).begin());
    }
}

} // namespace

std::vector<std::size_t> assign(const Matrix& points, const Matrix& centroids) {
    if (centroids.rows() == 0) throw Error(ErrorCode::ShapeError, "no centroids");
    if (points.cols() != centroids.cols()) throw Error(ErrorCode::ShapeError, "point and centroid dimensions differ");
    return kernels::nearest_centroid(points, centroids);
}

double inertia(const Matrix& points, const Matrix& centroids, const std::vector<std::size_t>& labels) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) s += squared_distance(points.row(i), centroids.row(labels[i]));
    return s;
}

Matrix kmeanspp_seed(const Matrix& points, std::size_t k, std::uint64_t seed) {
    const std::size_t n = points.rows();
    Random rng(seed);
    Matrix centroids(k, points.cols());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t pick = rng.below(n);
    for (std::size_t j = 0; j < k; ++j) {
        if (j > 0) {
            const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
            if (total > 0.0) {
                double target = rng.uniform() * total;
                pick = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    target -= d2[i];
                    if (target < 0.0 && d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = rng.below(n);
            }
        }
        const auto p = points.row(pick);
        std::copy(p.begin(), p.end(), centroids.row(j).begin());
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points.row(i), p));
    }
    return centroids;
}

KMeansModel lloyd(const Matrix& points, Matrix centroids, std::size_t max_iter) {
    KMeansModel model;
    model.k = centroids.rows();
    std::vector<std::size_t> labels;
    bool converged = false;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        auto next = assign(points, centroids);
        model.inertia_trace.push_back(inertia(points, centroids, next));
        repair_empty(points, centroids, next);
        ++model.iterations;
        if (next == labels) {
            converged = true;
            break;
        }
        labels = std::move(next);
        centroids = update_centroids(points, labels, centroids);
    }
    if (!converged) labels = assign(points, centroids);
    model.centroids = std::move(centroids);
    model.labels = std::move(labels);
    model.inertia = inertia(points, model.centroids, model.labels);
    return model;
}

KMeansModel kmeans_fit(const Matrix& points, const KMeansConfig& cfg) {
    if (cfg.k == 0) throw Error(ErrorCode::ConfigError, "k must be positive");
    if (points.rows() < cfg.k) {
        throw Error(ErrorCode::TooFewPoints, std::to_string(points.rows()) + " points for k = " + std::to_string(cfg.k));
    }
    const std::size_t restarts = std::max<std::size_t>(1, cfg.restarts);
    std::vector<KMeansModel> runs(restarts);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(restarts); ++r) {
        const auto seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        runs[static_cast<std::size_t>(r)] = lloyd(points, kmeanspp_seed(points, cfg.k, seed), cfg.max_iter);
        runs[static_cast<std::size_t>(r)].restart = static_cast<std::size_t>(r);
    }
    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r) {
        if (runs[r].inertia < runs[best].inertia) best = r;
    }
    return std::move(runs[best]);
}

std::vector<ElbowPoint> elbow(const Matrix& points, std::size_t k_min, std::size_t k_max, const KMeansConfig& cfg) {
    std::vector<ElbowPoint> out;
    for (std::size_t k = k_min; k <= k_max && k <= points.rows(); ++k) {
        KMeansConfig c = cfg;
        c.k = k;
        out.push_back({k, kmeans_fit(points, c).inertia});
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

std::vector<ProfileSummary> summarize_profiles(const std::vector<std::size_t>& labels, const Matrix& eigenbehaviors,
                                               const std::vector<std::string>& ids, const Matrix& centroids) {
    if (labels.size() != eigenbehaviors.rows() || labels.size() != ids.size()) {
        throw Error(ErrorCode::ShapeError, "labels, eigenbehaviors and ids must align");
    }
    const std::size_t k = centroids.rows();
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= k) throw Error(ErrorCode::ShapeError, "label out of range");
        members[labels[i]].push_back(i);
    }

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (members[a].size() != members[b].size()) return members[a].size() > members[b].size();
        return centroids(a, 0) < centroids(b, 0);
    });

    std::vector<ProfileSummary> out;
    for (std::size_t cluster : order) {
        if (members[cluster].empty()) continue;
        ProfileSummary p;
        p.profile_id = "P" + std::to_string(out.size() + 1);
        p.cluster = cluster;
        std::vector<double> column(members[cluster].size());
        for (std::size_t c = 0; c < eigenbehaviors.cols(); ++c) {
            for (std::size_t m = 0; m < members[cluster].size(); ++m) column[m] = eigenbehaviors(members[cluster][m], c);
            p.median.push_back(median(column));
        }
        for (std::size_t i : members[cluster]) p.members.push_back(ids[i]);
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace ebprof
