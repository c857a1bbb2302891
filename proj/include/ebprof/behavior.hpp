#ifndef EBPROF_BEHAVIOR_HPP
#define EBPROF_BEHAVIOR_HPP

#include "ebprof/ingest.hpp"
#include "ebprof/matrix.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ebprof {

inline constexpr int kHoursPerDay = 24;
inline constexpr int kDefaultLevels = 4;
inline constexpr int kMissingLabel = -1;

/// Per-square-foot readings min-max scaled into [0, 1]; MISSING preserved.
struct ScaledSeries {
    std::string building_id;
    std::vector<Timestamp> timestamps;
    std::vector<double> values;
};

/// Usage level per hour, 0 = low ... levels-1 = high, or kMissingLabel.
struct LabeledSeries {
    std::string building_id;
    std::vector<Timestamp> timestamps;
    std::vector<int> labels;
    int levels = kDefaultLevels;
    /// Interior quantile cut points q_1..q_{levels-1}.
    std::vector<double> thresholds;
};

/// B(x,y): one row of 24 hourly labels per retained day.
struct CategoricalDayMatrix {
    std::string building_id;
    std::vector<CivilDay> days;
    int levels = kDefaultLevels;
    std::vector<std::uint8_t> labels; // days.size() x 24, row-major

    std::size_t day_count() const { return days.size(); }
    int label(std::size_t day, int hour) const { return labels[day * kHoursPerDay + hour]; }
};

/// B'(x,y): one-hot expansion of B, column = level * 24 + hour. Row i is Gamma_i.
struct BinaryBehaviorMatrix {
    std::string building_id;
    std::vector<CivilDay> days;
    int levels = kDefaultLevels;
    Matrix rows;

    std::size_t day_count() const { return days.size(); }
    std::size_t width() const { return rows.cols(); }
};

/// Divides by floor area, then min-max scales over non-missing hours.
/// Throws MissingArea, DegenerateSeries.
ScaledSeries scale_series(const HourlySeries& series, const BuildingMetadata& meta);

/// Linear-interpolation percentile of sorted data (p in [0,1]).
double percentile_sorted(const std::vector<double>& sorted, double p);

/// Quantile thresholds q_l = percentile(l / levels) of the building's own non-missing values.
/// label(v) is the largest l with v >= q_l (q_0 = minimum); a run of equal thresholds collapses
/// onto its lowest level, so a constant series is all level 0. Throws DegenerateSeries when empty.
LabeledSeries quantile_bin(const ScaledSeries& scaled, int levels = kDefaultLevels);

/// Label for one value under precomputed edges (edges[0] = minimum, then the thresholds).
int bin_value(double v, const std::vector<double>& edges);

/// Groups hours by calendar day, keeping only days with all 24 hours labelled.
/// Throws NoCompleteDays.
CategoricalDayMatrix build_day_matrix(const LabeledSeries& labeled);

BinaryBehaviorMatrix binarize(const CategoricalDayMatrix& cat);

/// Inverse of binarize: argmax of each hour's level block.
CategoricalDayMatrix decode_binary(const BinaryBehaviorMatrix& bin);

/// Debug dumps: `date,h00..h23` and `date,c0..c{24n-1}`.
void write_day_matrix_csv(std::ostream& out, const CategoricalDayMatrix& cat);
void write_binary_matrix_csv(std::ostream& out, const BinaryBehaviorMatrix& bin);

} // namespace ebprof

#endif
