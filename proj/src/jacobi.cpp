#include "ebprof/jacobi.hpp"

#include "ebprof/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ebprof {

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) s += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(s);
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

// Zeroes a(p,q) with one plane rotation, updating eigenvector columns of v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
    const double apq = a(p, q);
    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    if (theta < 0.0) t = -t;
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    const double tau = s / (1.0 + c);

    a(p, p) -= t * apq;
    a(q, q) += t * apq;
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        if (k == p || k == q) continue;
        const double akp = a(k, p);
        const double akq = a(k, q);
        const double new_kp = akp - s * (akq + tau * akp);
        const double new_kq = akq + s * (akp - tau * akq);
        a(k, p) = new_kp;
        a(p, k) = new_kp;
        a(k, q) = new_kq;
        a(q, k) = new_kq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = vkp - s * (vkq + tau * vkp);
        v(k, q) = vkq + s * (vkp - tau * vkq);
    }
}

} // namespace

void normalize_sign(std::span<double> v) {
    double max_abs = 0.0;
    for (double x : v) max_abs = std::max(max_abs, std::abs(x));
    if (max_abs == 0.0) return;
    const double cutoff = max_abs * (1.0 - 1e-9);
    for (double& x : v) {
        if (std::abs(x) >= cutoff) {
            if (x < 0.0) {
                for (double& y : v) y = -y;
            }
            return;
        }
    }
}

Eigensystem eigendecompose(const Matrix& c, const JacobiOptions& options) {
    if (c.rows() != c.cols()) throw Error(ErrorCode::ShapeError, "eigendecompose needs a square matrix");
    const std::size_t n = c.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!(std::abs(c(i, j) - c(j, i)) <= options.symmetry_tolerance)) {
                throw Error(ErrorCode::NotSymmetric, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                         ") differs from its transpose");
            }
        }
    }

    Matrix a = c;
    // Symmetrise exactly so the rotations only need to track one triangle's worth of error.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (c(i, j) + c(j, i));
    }
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    const double threshold = options.tolerance * std::max(1.0, frobenius_norm(a));
    int sweep = 0;
    while (off_diagonal_norm(a) > threshold) {
        if (sweep == options.max_sweeps) {
            throw Error(ErrorCode::NoConvergence, "Jacobi did not converge in " + std::to_string(options.max_sweeps) + " sweeps");
        }
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) != 0.0) rotate(a, v, p, q);
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    Eigensystem out;
    out.sweeps = sweep;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t k = 0; k < n; ++k) out.vectors(j, k) = v(k, order[j]);
        normalize_sign(out.vectors.row(j));
    }
    return out;
}

} // namespace ebprof
