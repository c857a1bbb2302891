#include "ebprof/eigen.hpp"

#include "ebprof/error.hpp"
#include "ebprof/kernels.hpp"

#include <cmath>

namespace ebprof {

std::vector<double> mean_behavior(const Matrix& rows) {
    std::vector<double> mu(rows.cols(), 0.0);
    if (rows.rows() == 0) return mu;
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        const auto r = rows.row(i);
        for (std::size_t c = 0; c < r.size(); ++c) mu[c] += r[c];
    }
    const double inv = 1.0 / static_cast<double>(rows.rows());
    for (double& m : mu) m *= inv;
    return mu;
}

Matrix covariance(const Matrix& rows, std::span<const double> mean) {
    if (mean.size() != rows.cols()) throw Error(ErrorCode::ShapeError, "mean length does not match row width");
    return kernels::covariance(rows, mean);
}

EigenModel fit_eigen_model(const BinaryBehaviorMatrix& binary, const JacobiOptions& options) {
    if (binary.day_count() == 0) throw Error(ErrorCode::NoCompleteDays, binary.building_id);
    EigenModel model;
    model.building_id = binary.building_id;
    model.levels = binary.levels;
    model.mean = mean_behavior(binary.rows);
    const Matrix c = covariance(binary.rows, model.mean);
    Eigensystem es = eigendecompose(c, options);

    double total = 0.0;
    for (double& l : es.values) {
        if (l < kEigenvalueFloor) l = 0.0;
        total += l;
    }
    model.eigenvalues = std::move(es.values);
    model.eigenvectors = std::move(es.vectors);
    model.explained.assign(model.eigenvalues.size(), 0.0);
    if (total > 0.0) {
        for (std::size_t j = 0; j < model.eigenvalues.size(); ++j) model.explained[j] = model.eigenvalues[j] / total;
    }
    return model;
}

double explained_variance(const EigenModel& model, std::size_t top) {
    const std::size_t h = model.eigenvalues.size();
    if (top < 1 || top > h) {
        throw Error(ErrorCode::ShapeError, "top must lie in [1, " + std::to_string(h) + "]");
    }
    double total = 0.0;
    for (double l : model.eigenvalues) total += l;
    if (!(total > 0.0)) throw Error(ErrorCode::DegenerateSpectrum, model.building_id + ": all eigenvalues are zero");
    if (top == h) return 1.0;
    double head = 0.0;
    for (std::size_t j = 0; j < top; ++j) head += model.eigenvalues[j];
    return std::min(1.0, head / total);
}

Matrix primary_eigenbehaviors(const EigenModel& model, std::size_t k) {
    const std::size_t h = model.dimension();
    if (k < 1 || k > model.eigenvectors.rows()) {
        throw Error(ErrorCode::ShapeError, "k must lie in [1, " + std::to_string(model.eigenvectors.rows()) + "]");
    }
    Matrix out(k, h);
    for (std::size_t j = 0; j < k; ++j) {
        const auto src = model.eigenvectors.row(j);
        std::copy(src.begin(), src.end(), out.row(j).begin());
    }
    return out;
}

DayClassification classify_days(const BinaryBehaviorMatrix& binary, const EigenModel& model, std::size_t k) {
    if (binary.width() != model.dimension()) throw Error(ErrorCode::ShapeError, "model and matrix widths differ");
    const Matrix top = primary_eigenbehaviors(model, k);

    DayClassification out;
    out.building_id = binary.building_id;
    out.days = binary.days;
    out.k = k;
    out.assigned.resize(binary.day_count());
    out.weights = Matrix(binary.day_count(), k);
    std::vector<double> phi(model.dimension());
    for (std::size_t i = 0; i < binary.day_count(); ++i) {
        const auto gamma = binary.rows.row(i);
        for (std::size_t c = 0; c < phi.size(); ++c) phi[c] = gamma[c] - model.mean[c];
        std::size_t best = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const double w = dot(top.row(j), phi);
            out.weights(i, j) = w;
            if (w > out.weights(i, best)) best = j;
        }
        out.assigned[i] = best + 1;
    }
    return out;
}

Matrix reshape_behavior(std::span<const double> vec, int levels) {
    const auto expected = static_cast<std::size_t>(levels * kHoursPerDay);
    if (levels < 1 || vec.size() != expected) {
        throw Error(ErrorCode::ShapeError, "expected a vector of length " + std::to_string(expected) + ", got " +
                                               std::to_string(vec.size()));
    }
    Matrix grid(static_cast<std::size_t>(levels), kHoursPerDay);
    for (int l = 0; l < levels; ++l) {
        for (int h = 0; h < kHoursPerDay; ++h) grid(l, h) = vec[static_cast<std::size_t>(l * kHoursPerDay + h)];
    }
    return grid;
}

std::vector<double> flatten_behavior(const Matrix& grid) {
    if (grid.cols() != kHoursPerDay) throw Error(ErrorCode::ShapeError, "grid must have 24 columns");
    return {grid.data().begin(), grid.data().end()};
}

nlohmann::ordered_json to_json(const EigenModel& model) {
    nlohmann::ordered_json doc;
    doc["building_id"] = model.building_id;
    doc["levels"] = model.levels;
    doc["mean"] = model.mean;
    doc["eigenvalues"] = model.eigenvalues;
    auto vectors = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < model.eigenvectors.rows(); ++j) {
        const auto r = model.eigenvectors.row(j);
        vectors.push_back(std::vector<double>(r.begin(), r.end()));
    }
    doc["eigenvectors"] = std::move(vectors);
    doc["explained"] = model.explained;
    return doc;
}

EigenModel eigen_model_from_json(const nlohmann::json& doc) {
    try {
        EigenModel model;
        model.building_id = doc.at("building_id").get<std::string>();
        model.levels = doc.value("levels", kDefaultLevels);
        model.mean = doc.at("mean").get<std::vector<double>>();
        model.eigenvalues = doc.at("eigenvalues").get<std::vector<double>>();
        model.explained = doc.at("explained").get<std::vector<double>>();
        const auto& vectors = doc.at("eigenvectors");
        const std::size_t h = model.mean.size();
        if (model.eigenvalues.size() != h || model.explained.size() != h || vectors.size() != h) {
            throw Error(ErrorCode::ShapeError, "model arrays have inconsistent lengths");
        }
        model.eigenvectors = Matrix(h, h);
        for (std::size_t j = 0; j < h; ++j) {
            const auto row = vectors.at(j).get<std::vector<double>>();
            if (row.size() != h) throw Error(ErrorCode::ShapeError, "eigenvector length mismatch");
            std::copy(row.begin(), row.end(), model.eigenvectors.row(j).begin());
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("malformed model document: ") + e.what());
    }
}

} // namespace ebprof
