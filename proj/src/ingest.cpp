#include "ebprof/ingest.hpp"

#include "ebprof/csv.hpp"
#include "ebprof/error.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace ebprof {

namespace {

constexpr std::size_t kMaxStoredWarnings = 20;

void strip_bom(std::string& line) {
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
}

bool is_blank(std::string_view line) {
    return csv::trim(line).empty();
}

// Fast path for unquoted records; falls back to the quote-aware splitter.
void split_into(std::string_view line, std::vector<std::string_view>& out, std::vector<std::string>& storage) {
    out.clear();
    if (line.find('"') != std::string_view::npos) {
        storage = csv::split(line);
        for (const auto& s : storage) out.emplace_back(s);
        return;
    }
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

} // namespace

MeterTable parse_meter_csv(std::istream& in, IngestReport& report) {
    report = IngestReport{};
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyInput, "meter CSV has no header row");
    strip_bom(line);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = csv::split(line);
    if (header.size() < 2) throw Error(ErrorCode::SchemaError, "meter CSV header needs a timestamp and at least one building column");

    MeterTable table;
    std::unordered_set<std::string> seen;
    for (std::size_t c = 1; c < header.size(); ++c) {
        std::string id(csv::trim(header[c]));
        if (id.empty()) throw Error(ErrorCode::SchemaError, "empty building id in header column " + std::to_string(c + 1));
        if (!seen.insert(id).second) throw Error(ErrorCode::SchemaError, "building id '" + id + "' appears twice");
        table.building_ids.push_back(std::move(id));
    }
    const std::size_t nb = table.building_ids.size();
    table.columns.resize(nb);

    std::vector<std::string_view> fields;
    std::vector<std::string> storage;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (is_blank(line)) continue;
        ++report.rows_in;

        split_into(line, fields, storage);
        if (fields.size() != nb + 1) {
            ++report.rows_rejected;
            report.rejects.push_back({line_no, "expected " + std::to_string(nb + 1) + " fields, got " +
                                                   std::to_string(fields.size())});
            continue;
        }
        const auto ts = parse_timestamp(csv::trim(fields[0]));
        if (!ts) {
            ++report.rows_rejected;
            report.rejects.push_back({line_no, "unparseable timestamp '" + std::string(fields[0]) + "'"});
            continue;
        }
        table.timestamps.push_back(*ts);
        for (std::size_t b = 0; b < nb; ++b) {
            auto v = csv::parse_number(fields[b + 1]);
            double cell = kMissing;
            if (!v) {
                ++report.missing_cells;
            } else if (*v < 0.0) {
                ++report.negative_cells;
                if (report.warnings.size() < kMaxStoredWarnings) {
                    report.warnings.push_back("line " + std::to_string(line_no) + ": negative reading for '" +
                                              table.building_ids[b] + "' set to missing");
                }
            } else {
                cell = *v;
            }
            table.columns[b].push_back(cell);
        }
    }
    report.rows_out = table.timestamps.size();
    if (table.timestamps.empty()) throw Error(ErrorCode::EmptyInput, "meter CSV has no data rows");

    if (!std::is_sorted(table.timestamps.begin(), table.timestamps.end())) {
        std::vector<std::size_t> order(table.timestamps.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return table.timestamps[a] < table.timestamps[b]; });
        auto permute = [&](auto& v) {
            std::remove_reference_t<decltype(v)> out(v.size());
            for (std::size_t i = 0; i < order.size(); ++i) out[i] = v[order[i]];
            v = std::move(out);
        };
        permute(table.timestamps);
        for (auto& col : table.columns) permute(col);
    }

    for (std::size_t t = 0; t < table.timestamps.size(); ++t) {
        const Timestamp ts = table.timestamps[t];
        if (ts % kSecondsPerHour != 0) {
            throw Error(ErrorCode::IrregularGrid, "timestamp " + format_timestamp(ts) + " is not on the hour");
        }
        if (t == 0) continue;
        const Timestamp step = ts - table.timestamps[t - 1];
        if (step == 0) throw Error(ErrorCode::DuplicateTimestamp, format_timestamp(ts));
        if (step != kSecondsPerHour) {
            throw Error(ErrorCode::IrregularGrid, "step of " + std::to_string(step) + " s before " + format_timestamp(ts));
        }
    }
    if (report.negative_cells > report.warnings.size()) {
        report.warnings.push_back(std::to_string(report.negative_cells) + " negative readings in total set to missing");
    }
    return table;
}

MeterTable parse_meter_csv(std::istream& in) {
    IngestReport report;
    return parse_meter_csv(in, report);
}

void write_meter_csv(std::ostream& out, const MeterTable& table) {
    out << "timestamp";
    for (const auto& id : table.building_ids) out << ',' << csv::escape(id);
    out << '\n';
    std::string row;
    for (std::size_t t = 0; t < table.hours(); ++t) {
        row = format_timestamp(table.timestamps[t]);
        for (std::size_t b = 0; b < table.buildings(); ++b) {
            row.push_back(',');
            const double v = table.columns[b][t];
            if (!is_missing(v)) row += csv::format_number(v);
        }
        row.push_back('\n');
        out << row;
    }
}

std::vector<BuildingMetadata> parse_metadata_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::SchemaError, "metadata CSV has no header row");
    strip_bom(line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = csv::split(line);

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t c = 0; c < header.size(); ++c) index.emplace(lower(csv::trim(header[c])), c);
    auto find = [&](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
        for (const char* n : names) {
            if (auto it = index.find(n); it != index.end()) return it->second;
        }
        return std::nullopt;
    };
    const auto id_col = find({"building_id"});
    if (!id_col) throw Error(ErrorCode::SchemaError, "metadata CSV has no building_id column");
    const auto site_col = find({"site_id", "site"});
    const auto area_col = find({"sqft", "floor_area", "area", "floor_area_sqft"});
    const auto usage_col = find({"primaryspaceusage", "primary_usage", "usage"});

    std::vector<BuildingMetadata> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (is_blank(line)) continue;
        const auto fields = csv::split(line);
        auto field = [&](std::optional<std::size_t> col) -> std::string_view {
            if (!col || *col >= fields.size()) return {};
            return csv::trim(fields[*col]);
        };
        BuildingMetadata rec;
        rec.building_id = std::string(field(id_col));
        if (rec.building_id.empty()) {
            throw Error(ErrorCode::SchemaError, "line " + std::to_string(line_no) + ": empty building_id");
        }
        rec.site = std::string(field(site_col));
        const auto area_text = field(area_col);
        if (!area_text.empty() && lower(area_text) != "na" && lower(area_text) != "nan") {
            const auto area = csv::parse_number(area_text);
            if (!area || !(*area > 0.0)) {
                throw Error(ErrorCode::SchemaError, "line " + std::to_string(line_no) + ": floor area '" +
                                                        std::string(area_text) + "' is not a positive number");
            }
            rec.floor_area = *area;
        }
        if (const auto usage = field(usage_col); !usage.empty()) rec.primary_usage = std::string(usage);
        records.push_back(std::move(rec));
    }
    return records;
}

void write_metadata_csv(std::ostream& out, const std::vector<BuildingMetadata>& records) {
    out << "building_id,site_id,sqft,primaryspaceusage\n";
    for (const auto& r : records) {
        out << csv::escape(r.building_id) << ',' << csv::escape(r.site) << ',';
        if (r.floor_area) out << csv::format_number(*r.floor_area);
        out << ',';
        if (r.primary_usage) out << csv::escape(*r.primary_usage);
        out << '\n';
    }
}

HourlySeries extract_building(const MeterTable& table, const std::string& id) {
    const auto it = std::find(table.building_ids.begin(), table.building_ids.end(), id);
    if (it == table.building_ids.end()) throw Error(ErrorCode::UnknownBuilding, id);
    const auto b = static_cast<std::size_t>(it - table.building_ids.begin());
    return HourlySeries{id, table.timestamps, table.columns[b]};
}

MeterTable assemble_table(const std::vector<HourlySeries>& series) {
    MeterTable table;
    if (series.empty()) return table;
    table.timestamps = series.front().timestamps;
    for (const auto& s : series) {
        if (s.timestamps != table.timestamps) {
            throw Error(ErrorCode::ShapeError, "series '" + s.building_id + "' is on a different time grid");
        }
        table.building_ids.push_back(s.building_id);
        table.columns.push_back(s.values);
    }
    return table;
}

} // namespace ebprof
