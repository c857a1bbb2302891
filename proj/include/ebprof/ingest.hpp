#ifndef EBPROF_INGEST_HPP
#define EBPROF_INGEST_HPP

#include "ebprof/timeutil.hpp"

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ebprof {

/// Marker for an absent or rejected reading.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Hourly readings (kWh) for many buildings on one uniform grid.
/// `columns[b][t]` is building `b` at `timestamps[t]`.
struct MeterTable {
    std::vector<std::string> building_ids;
    std::vector<Timestamp> timestamps;
    std::vector<std::vector<double>> columns;

    std::size_t hours() const { return timestamps.size(); }
    std::size_t buildings() const { return building_ids.size(); }
    double value(std::size_t t, std::size_t b) const { return columns[b][t]; }
};

struct BuildingMetadata {
    std::string building_id;
    std::string site;
    std::optional<double> floor_area; // square feet
    std::optional<std::string> primary_usage;
};

struct RejectedRow {
    std::size_t line = 0;
    std::string reason;
};

/// Accounting for one parse: rows_in == rows_out + rows_rejected.
struct IngestReport {
    std::size_t rows_in = 0;
    std::size_t rows_out = 0;
    std::size_t rows_rejected = 0;
    std::size_t missing_cells = 0;  // empty or non-numeric
    std::size_t negative_cells = 0; // converted to missing
    std::vector<RejectedRow> rejects;
    std::vector<std::string> warnings;
};

/// Hourly series for one building.
struct HourlySeries {
    std::string building_id;
    std::vector<Timestamp> timestamps;
    std::vector<double> values;
};

/// Wide meter CSV: `timestamp,<id>,<id>,...`, one row per hour.
/// Throws DuplicateTimestamp, IrregularGrid, EmptyInput or SchemaError.
MeterTable parse_meter_csv(std::istream& in, IngestReport& report);
MeterTable parse_meter_csv(std::istream& in);

void write_meter_csv(std::ostream& out, const MeterTable& table);

/// Metadata CSV keyed by `building_id`. Recognised columns (case-insensitive):
/// site_id|site, sqft|floor_area|area, primaryspaceusage|primary_usage|usage.
std::vector<BuildingMetadata> parse_metadata_csv(std::istream& in);

void write_metadata_csv(std::ostream& out, const std::vector<BuildingMetadata>& records);

/// Throws UnknownBuilding.
HourlySeries extract_building(const MeterTable& table, const std::string& id);

/// Inverse of extract_building over a set of series sharing one time grid.
MeterTable assemble_table(const std::vector<HourlySeries>& series);

} // namespace ebprof

#endif
