#ifndef EBPROF_ERROR_HPP
#define EBPROF_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace ebprof {

enum class ErrorCode {
    // ingest
    DuplicateTimestamp,
    IrregularGrid,
    EmptyInput,
    SchemaError,
    UnknownBuilding,
    // behavior
    MissingArea,
    MissingMetadata,
    DegenerateSeries,
    NoCompleteDays,
    // eigen
    ShapeError,
    NotSymmetric,
    NoConvergence,
    DegenerateSpectrum,
    // embed / cluster
    TooFewPoints,
    OptimizationDiverged,
    // pipeline
    ReportInputMissing,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Process exit code for an error: 2 config, 3 data, 4 numerical failure.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace ebprof

#endif
