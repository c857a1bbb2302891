#ifndef EBPROF_SYNTH_HPP
#define EBPROF_SYNTH_HPP

#include "ebprof/behavior.hpp"
#include "ebprof/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ebprof {

struct SynthConfig {
    std::size_t buildings = 12;
    std::size_t days = 60;
    /// 1: every day alike; 2: weekday / weekend; 3: weekday / Saturday / Sunday.
    int regimes = 2;
    /// Number of building archetypes (distinct daily load shapes), assigned round-robin.
    std::size_t archetypes = 3;
    /// Standard deviation of the multiplicative hourly noise.
    double noise = 0.05;
    std::uint64_t seed = 7;
    CivilDay start_day = make_day(2016, 1, 1);

    /// Throws ConfigError.
    void validate() const;
};

struct SynthCorpus {
    MeterTable meters;
    std::vector<BuildingMetadata> metadata;
    std::vector<int> building_archetype;
    std::vector<CivilDay> days;
    std::vector<int> day_regime;
};

/// Regime of a calendar day under the weekday/weekend schedule.
int regime_of(CivilDay day, int regimes);

/// Meter + metadata corpus with ground truth. Deterministic given the config.
SynthCorpus generate_synthetic(const SynthConfig& cfg);

/// Writes meters.csv, metadata.csv, truth_buildings.csv and truth_days.csv into `dir`.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

/// Categorical day matrix with two fixed label patterns (weekday, weekend); each hour's
/// label is replaced by a uniformly random level with probability `label_noise`.
struct LabeledRegimes {
    CategoricalDayMatrix matrix;
    std::vector<int> regime;
};
LabeledRegimes generate_label_regimes(std::size_t days, double label_noise, std::uint64_t seed,
                                      CivilDay start_day = make_day(2016, 1, 1));

} // namespace ebprof

#endif
