#ifndef EBPROF_JACOBI_HPP
#define EBPROF_JACOBI_HPP

#include "ebprof/matrix.hpp"

#include <span>
#include <vector>

namespace ebprof {

struct JacobiOptions {
    /// Convergence when the off-diagonal Frobenius norm drops to tolerance * max(1, ||C||_F).
    double tolerance = 1e-12;
    int max_sweeps = 100;
    /// Largest |C_ij - C_ji| accepted as symmetric.
    double symmetry_tolerance = 1e-9;
};

/// Full spectrum of a symmetric matrix, eigenvalues descending (ties keep solver order).
/// Row j of `vectors` is the unit eigenvector for values[j], sign-normalised with
/// normalize_sign.
struct Eigensystem {
    std::vector<double> values;
    Matrix vectors;
    int sweeps = 0;
};

/// Cyclic Jacobi rotations. Throws NotSymmetric, NoConvergence, ShapeError (non-square).
Eigensystem eigendecompose(const Matrix& c, const JacobiOptions& options = {});

/// Flips `v` so that its largest-magnitude entry is positive. Entries within a relative
/// 1e-9 of the maximum count as tied and the smallest index wins, which keeps the choice
/// stable when a vector has exactly paired +/- entries.
void normalize_sign(std::span<double> v);

} // namespace ebprof

#endif
