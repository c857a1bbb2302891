#ifndef EBPROF_EIGEN_HPP
#define EBPROF_EIGEN_HPP

#include "ebprof/behavior.hpp"
#include "ebprof/jacobi.hpp"
#include "ebprof/matrix.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

namespace ebprof {

/// Eigenvalues with magnitude below this are clamped to zero.
inline constexpr double kEigenvalueFloor = 1e-10;

/// Eigenbehavior model of one building.
struct EigenModel {
    std::string building_id;
    std::vector<double> mean;        // mu, length H = 24 * levels
    std::vector<double> eigenvalues; // descending, >= 0 after clamping
    Matrix eigenvectors;             // row j is v_j
    std::vector<double> explained;   // lambda_j / sum(lambda); all zero for a zero spectrum
    int levels = kDefaultLevels;

    std::size_t dimension() const { return mean.size(); }
};

/// Per-day projection weights onto the top-k eigenbehaviors and the closest one.
struct DayClassification {
    std::string building_id;
    std::vector<CivilDay> days;
    std::size_t k = 0;
    std::vector<std::size_t> assigned; // 1-based eigenbehavior index per day
    Matrix weights;                    // days x k, w_ij = v_j . (Gamma_i - mu)
};

std::vector<double> mean_behavior(const Matrix& rows);

/// (1/D) sum_i Phi_i Phi_i^T with Phi_i = Gamma_i - mu.
Matrix covariance(const Matrix& rows, std::span<const double> mean);

/// mean -> covariance -> Jacobi -> clamp -> explained fractions.
EigenModel fit_eigen_model(const BinaryBehaviorMatrix& binary, const JacobiOptions& options = {});

/// Cumulative explained fraction of the first `top` eigenbehaviors.
/// Throws DegenerateSpectrum when all eigenvalues are zero, ShapeError when top is out of range.
double explained_variance(const EigenModel& model, std::size_t top);

/// First k eigenvectors as rows of a k x H matrix.
Matrix primary_eigenbehaviors(const EigenModel& model, std::size_t k);

/// Closest of the top-k eigenbehaviors per day: argmin_j ||Phi_i - v_j||, which for unit
/// v_j is argmax_j w_ij. Ties go to the smallest j.
DayClassification classify_days(const BinaryBehaviorMatrix& binary, const EigenModel& model, std::size_t k = 3);

/// levels x 24 view of an H-vector: (l, h) = vec[l * 24 + h]. Throws ShapeError.
Matrix reshape_behavior(std::span<const double> vec, int levels = kDefaultLevels);
std::vector<double> flatten_behavior(const Matrix& grid);

nlohmann::ordered_json to_json(const EigenModel& model);
EigenModel eigen_model_from_json(const nlohmann::json& doc);

} // namespace ebprof

#endif
