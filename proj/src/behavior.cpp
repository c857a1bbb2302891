#include "ebprof/behavior.hpp"

#include "ebprof/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace ebprof {

ScaledSeries scale_series(const HourlySeries& series, const BuildingMetadata& meta) {
    if (!meta.floor_area) throw Error(ErrorCode::MissingArea, series.building_id);
    const double area = *meta.floor_area;
    if (!(area > 0.0) || !std::isfinite(area)) {
        throw Error(ErrorCode::MissingArea, series.building_id + ": floor area must be positive");
    }

    ScaledSeries out{series.building_id, series.timestamps, std::vector<double>(series.values.size(), kMissing)};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : series.values) {
        if (is_missing(v)) continue;
        lo = std::min(lo, v / area);
        hi = std::max(hi, v / area);
    }
    if (!(hi > lo)) {
        throw Error(ErrorCode::DegenerateSeries, series.building_id + ": fewer than two distinct readings");
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const double v = series.values[i];
        if (is_missing(v)) continue;
        out.values[i] = std::clamp((v / area - lo) / range, 0.0, 1.0);
    }
    return out;
}

double percentile_sorted(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

int bin_value(double v, const std::vector<double>& edges) {
    // Largest l with v >= edges[l] ...
    int l = 0;
    for (int e = static_cast<int>(edges.size()) - 1; e > 0; --e) {
        if (v >= edges[e]) {
            l = e;
            break;
        }
    }
    // ... then fall back to the first level of a run of equal edges.
    while (l > 0 && edges[l - 1] == edges[l]) --l;
    return l;
}

LabeledSeries quantile_bin(const ScaledSeries& scaled, int levels) {
    if (levels < 2) throw Error(ErrorCode::ShapeError, "category count must be at least 2");
    std::vector<double> sorted;
    sorted.reserve(scaled.values.size());
    for (double v : scaled.values) {
        if (!is_missing(v)) sorted.push_back(v);
    }
    if (sorted.empty()) throw Error(ErrorCode::DegenerateSeries, scaled.building_id + ": no readings to bin");
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> edges{sorted.front()};
    for (int l = 1; l < levels; ++l) edges.push_back(percentile_sorted(sorted, static_cast<double>(l) / levels));

    LabeledSeries out;
    out.building_id = scaled.building_id;
    out.timestamps = scaled.timestamps;
    out.levels = levels;
    out.thresholds.assign(edges.begin() + 1, edges.end());
    out.labels.resize(scaled.values.size());
    for (std::size_t i = 0; i < scaled.values.size(); ++i) {
        const double v = scaled.values[i];
        out.labels[i] = is_missing(v) ? kMissingLabel : bin_value(v, edges);
    }
    return out;
}

CategoricalDayMatrix build_day_matrix(const LabeledSeries& labeled) {
    // Day -> 24 slots; slot stays kMissingLabel until a labelled hour fills it.
    std::map<CivilDay, std::array<int, kHoursPerDay>> by_day;
    for (std::size_t i = 0; i < labeled.labels.size(); ++i) {
        const Timestamp t = labeled.timestamps[i];
        auto [it, inserted] = by_day.try_emplace(day_of(t));
        if (inserted) it->second.fill(kMissingLabel);
        it->second[hour_of(t)] = labeled.labels[i];
    }

    CategoricalDayMatrix cat;
    cat.building_id = labeled.building_id;
    cat.levels = labeled.levels;
    for (const auto& [day, hours] : by_day) {
        if (std::any_of(hours.begin(), hours.end(), [](int l) { return l == kMissingLabel; })) continue;
        cat.days.push_back(day);
        for (int l : hours) cat.labels.push_back(static_cast<std::uint8_t>(l));
    }
    if (cat.days.empty()) throw Error(ErrorCode::NoCompleteDays, labeled.building_id);
    return cat;
}

BinaryBehaviorMatrix binarize(const CategoricalDayMatrix& cat) {
    BinaryBehaviorMatrix bin;
    bin.building_id = cat.building_id;
    bin.days = cat.days;
    bin.levels = cat.levels;
    bin.rows = Matrix(cat.day_count(), static_cast<std::size_t>(kHoursPerDay * cat.levels));
    for (std::size_t d = 0; d < cat.day_count(); ++d) {
        for (int h = 0; h < kHoursPerDay; ++h) {
            bin.rows(d, static_cast<std::size_t>(cat.label(d, h) * kHoursPerDay + h)) = 1.0;
        }
    }
    return bin;
}

CategoricalDayMatrix decode_binary(const BinaryBehaviorMatrix& bin) {
    CategoricalDayMatrix cat;
    cat.building_id = bin.building_id;
    cat.days = bin.days;
    cat.levels = bin.levels;
    cat.labels.resize(bin.day_count() * kHoursPerDay);
    for (std::size_t d = 0; d < bin.day_count(); ++d) {
        for (int h = 0; h < kHoursPerDay; ++h) {
            int best = 0;
            for (int l = 1; l < bin.levels; ++l) {
                if (bin.rows(d, l * kHoursPerDay + h) > bin.rows(d, best * kHoursPerDay + h)) best = l;
            }
            cat.labels[d * kHoursPerDay + h] = static_cast<std::uint8_t>(best);
        }
    }
    return cat;
}

void write_day_matrix_csv(std::ostream& out, const CategoricalDayMatrix& cat) {
    out << "date";
    for (int h = 0; h < kHoursPerDay; ++h) out << ",h" << (h < 10 ? "0" : "") << h;
    out << '\n';
    for (std::size_t d = 0; d < cat.day_count(); ++d) {
        out << format_date(cat.days[d]);
        for (int h = 0; h < kHoursPerDay; ++h) out << ',' << cat.label(d, h);
        out << '\n';
    }
}

void write_binary_matrix_csv(std::ostream& out, const BinaryBehaviorMatrix& bin) {
    out << "date";
    for (std::size_t c = 0; c < bin.width(); ++c) out << ",c" << c;
    out << '\n';
    for (std::size_t d = 0; d < bin.day_count(); ++d) {
        out << format_date(bin.days[d]);
        for (std::size_t c = 0; c < bin.width(); ++c) out << ',' << (bin.rows(d, c) != 0.0 ? 1 : 0);
        out << '\n';
    }
}

} // namespace ebprof
