#include "ebprof/error.hpp"

namespace ebprof {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
    case ErrorCode::IrregularGrid: return "IrregularGrid";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::UnknownBuilding: return "UnknownBuilding";
    case ErrorCode::MissingArea: return "MissingArea";
    case ErrorCode::MissingMetadata: return "MissingMetadata";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::NoCompleteDays: return "NoCompleteDays";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::OptimizationDiverged: return "OptimizationDiverged";
    case ErrorCode::ReportInputMissing: return "ReportInputMissing";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

int exit_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::ConfigError:
        return 2;
    case ErrorCode::NotSymmetric:
    case ErrorCode::NoConvergence:
    case ErrorCode::DegenerateSpectrum:
    case ErrorCode::OptimizationDiverged:
        return 4;
    default:
        return 3;
    }
}

} // namespace ebprof
