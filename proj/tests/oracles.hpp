#ifndef EBPROF_TESTS_ORACLES_HPP
#define EBPROF_TESTS_ORACLES_HPP

// Reference implementations used only by tests. Deliberately naive and written
// without calling into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline std::vector<double> column_mean(const Mat& rows) {
    std::vector<double> mu(rows.at(0).size(), 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < r.size(); ++j) mu[j] += r[j];
    for (double& m : mu) m /= static_cast<double>(rows.size());
    return mu;
}

inline Mat population_covariance(const Mat& rows) {
    const auto mu = column_mean(rows);
    const std::size_t h = mu.size();
    Mat c(h, std::vector<double>(h, 0.0));
    for (const auto& r : rows)
        for (std::size_t a = 0; a < h; ++a)
            for (std::size_t b = 0; b < h; ++b) c[a][b] += (r[a] - mu[a]) * (r[b] - mu[b]);
    for (auto& r : c)
        for (double& v : r) v /= static_cast<double>(rows.size());
    return c;
}

// Roots of det(C - lambda I) for 2x2, descending.
inline std::vector<double> eig2(const Mat& c) {
    const double tr = c[0][0] + c[1][1];
    const double det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return {tr / 2.0 + disc, tr / 2.0 - disc};
}

// Roots of the characteristic cubic for a symmetric 3x3, descending (trigonometric form).
inline std::vector<double> eig3(const Mat& a) {
    const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    if (p1 == 0.0) {
        std::vector<double> d{a[0][0], a[1][1], a[2][2]};
        std::sort(d.rbegin(), d.rend());
        return d;
    }
    const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) + (a[2][2] - q) * (a[2][2] - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Mat b(3, std::vector<double>(3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
    const double det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                       b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    const double r = std::clamp(det / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double pi = std::acos(-1.0);
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    std::vector<double> e{e1, e2, e3};
    std::sort(e.rbegin(), e.rend());
    return e;
}

// Classical Jacobi: always rotates the largest off-diagonal element. Eigenvalues descending.
inline std::vector<double> jacobi_values(Mat a) {
    const std::size_t n = a.size();
    for (int iter = 0; iter < 10000; ++iter) {
        std::size_t p = 0, q = 1;
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (std::abs(a[i][j]) > best) {
                    best = std::abs(a[i][j]);
                    p = i;
                    q = j;
                }
        if (best < 1e-15) break;
        const double theta = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
        const double c = std::cos(theta), s = std::sin(theta);
        for (std::size_t k = 0; k < n; ++k) {
            const double akp = a[k][p], akq = a[k][q];
            a[k][p] = c * akp - s * akq;
            a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double apk = a[p][k], aqk = a[q][k];
            a[p][k] = c * apk - s * aqk;
            a[q][k] = s * apk + c * aqk;
        }
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i][i];
    std::sort(d.rbegin(), d.rend());
    return d;
}

// Full sort of every distance; ties by index.
inline std::vector<std::vector<std::size_t>> knn_full_sort(const Mat& pts, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j == i) continue;
            double s = 0.0;
            for (std::size_t c = 0; c < pts[i].size(); ++c) s += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
            all.emplace_back(std::sqrt(s), j);
        }
        std::sort(all.begin(), all.end());
        std::vector<std::size_t> idx;
        for (std::size_t m = 0; m < k; ++m) idx.push_back(all[m].second);
        out.push_back(idx);
    }
    return out;
}

// Quartile label by counting: the rank position in the sorted sample decides the quarter.
// Valid for distinct values where count is a multiple of 4.
inline std::vector<int> quartile_by_rank(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<int> out(v.size());
    for (std::size_t r = 0; r < order.size(); ++r) out[order[r]] = static_cast<int>(4 * r / v.size());
    return out;
}

// Best one-to-one matching accuracy between two labelings (tries every permutation of up to 6 labels).
inline double matched_accuracy(const std::vector<std::size_t>& got, const std::vector<std::size_t>& truth, std::size_t k) {
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t hit = 0;
        for (std::size_t i = 0; i < got.size(); ++i) hit += perm[got[i]] == truth[i];
        best = std::max(best, hit);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(got.size());
}

// Purity: each cluster votes for its majority truth label.
inline double purity(const std::vector<std::size_t>& got, const std::vector<std::size_t>& truth) {
    std::size_t kmax = 0, tmax = 0;
    for (auto g : got) kmax = std::max(kmax, g + 1);
    for (auto t : truth) tmax = std::max(tmax, t + 1);
    std::vector<std::vector<std::size_t>> counts(kmax, std::vector<std::size_t>(tmax, 0));
    for (std::size_t i = 0; i < got.size(); ++i) ++counts[got[i]][truth[i]];
    std::size_t total = 0;
    for (const auto& c : counts) total += *std::max_element(c.begin(), c.end());
    return static_cast<double>(total) / static_cast<double>(got.size());
}

} // namespace oracle

#endif
