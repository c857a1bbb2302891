#include "ebprof/synth.hpp"

#include "ebprof/csv.hpp"
#include "ebprof/error.hpp"
#include "ebprof/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ebprof {

namespace {

double logistic(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

// Smooth occupancy window in [0, 1]; wraps past midnight when close < open.
double window(double hour, double open, double close) {
    constexpr double kRamp = 0.15;
    if (open <= close) return logistic((hour - open) / kRamp) * logistic((close - hour) / kRamp);
    return 1.0 - logistic((hour - close) / kRamp) * logistic((open - hour) / kRamp);
}

struct Shape {
    double base;
    double amplitude;
    double open;
    double close;
};

// [archetype % 3][regime]. Within an archetype only one regime has occupied
// hours of its own; the others stay inside the baseline spread.
constexpr std::array<std::array<Shape, 3>, 3> kShapes{{
    // office-like: daytime peak on weekdays, flat weekends
    {{{1.0, 3.0, 9.0, 17.0}, {1.0, 0.4, 10.0, 14.0}, {0.9, 0.1, 10.0, 12.0}}},
    // retail-like: evening trade on weekdays, all-day trade at weekends
    {{{1.2, 3.5, 17.0, 21.0}, {1.2, 3.5, 11.0, 21.0}, {1.0, 2.0, 12.0, 17.0}}},
    // overnight operations
    {{{1.0, 2.5, 21.0, 5.0}, {1.0, 0.3, 6.0, 15.0}, {1.0, 0.2, 0.0, 8.0}}},
}};

const char* kUsage[] = {"Office", "Retail", "Warehouse"};

// Relative jitter on the unoccupied baseline. Baseline hours then scatter over
// the lower quantile levels while occupied hours stay on one level.
constexpr double kBaseJitter = 0.3;

Shape shape(std::size_t archetype, int regime) {
    Shape s = kShapes[archetype % 3][static_cast<std::size_t>(regime)];
    // Archetypes beyond the three base shapes shift their schedule.
    const double shift = 3.0 * static_cast<double>(archetype / 3);
    s.open = std::fmod(s.open + shift, 24.0);
    s.close = std::fmod(s.close + shift, 24.0);
    return s;
}

std::string pad_id(std::size_t i, std::size_t count) {
    std::string digits = std::to_string(i);
    const std::size_t width = std::max<std::size_t>(3, std::to_string(count == 0 ? 0 : count - 1).size());
    return "bldg_" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

} // namespace

void SynthConfig::validate() const {
    if (buildings < 1) throw Error(ErrorCode::ConfigError, "synthetic corpus needs at least one building");
    if (days < 7) throw Error(ErrorCode::ConfigError, "synthetic corpus needs at least 7 days");
    if (regimes < 1 || regimes > 3) throw Error(ErrorCode::ConfigError, "regimes must be 1, 2 or 3");
    if (archetypes < 1) throw Error(ErrorCode::ConfigError, "archetypes must be at least 1");
    if (!(noise >= 0.0)) throw Error(ErrorCode::ConfigError, "noise must be non-negative");
}

int regime_of(CivilDay day, int regimes) {
    const int wd = weekday_of(day);
    if (regimes <= 1 || wd < 5) return 0;
    if (regimes == 2) return 1;
    return wd == 5 ? 1 : 2;
}

SynthCorpus generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    SynthCorpus corpus;
    const std::size_t hours = cfg.days * kHoursPerDay;
    for (std::size_t d = 0; d < cfg.days; ++d) {
        const CivilDay day = cfg.start_day + static_cast<CivilDay>(d);
        corpus.days.push_back(day);
        corpus.day_regime.push_back(regime_of(day, cfg.regimes));
    }
    corpus.meters.timestamps.resize(hours);
    for (std::size_t t = 0; t < hours; ++t) {
        corpus.meters.timestamps[t] = cfg.start_day * kSecondsPerDay + static_cast<Timestamp>(t) * kSecondsPerHour;
    }

    Random meta_rng(derive_seed(cfg.seed, "metadata"));
    for (std::size_t b = 0; b < cfg.buildings; ++b) {
        const std::size_t archetype = b % cfg.archetypes;
        const std::string id = pad_id(b, cfg.buildings);
        const double area = std::round(20000.0 + 180000.0 * meta_rng.uniform());
        const double intensity = 0.002 * (0.5 + meta_rng.uniform());

        corpus.building_archetype.push_back(static_cast<int>(archetype));
        corpus.metadata.push_back({id, "site_" + std::to_string(b % 19), area,
                                   std::string(kUsage[archetype % 3])});
        corpus.meters.building_ids.push_back(id);

        Random rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(b)));
        std::vector<double> column(hours);
        for (std::size_t d = 0; d < cfg.days; ++d) {
            for (int h = 0; h < kHoursPerDay; ++h) {
                const Shape s = shape(archetype, corpus.day_regime[d]);
                double base = s.base;
                double peak = s.amplitude * window(h + 0.5, s.open, s.close);
                if (cfg.noise > 0.0) {
                    base *= std::max(0.05, 1.0 + kBaseJitter * rng.normal());
                    peak *= std::max(0.05, 1.0 + cfg.noise * rng.normal());
                }
                const double v = area * intensity * (base + peak);
                // Three decimals keeps the CSV compact; ties this creates are harmless.
                column[d * kHoursPerDay + static_cast<std::size_t>(h)] = std::round(v * 1000.0) / 1000.0;
            }
        }
        corpus.meters.columns.push_back(std::move(column));
    }
    return corpus;
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "meters.csv", std::ios::binary);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / "meters.csv").string());
        write_meter_csv(out, corpus.meters);
    }
    {
        std::ofstream out(dir / "metadata.csv", std::ios::binary);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / "metadata.csv").string());
        write_metadata_csv(out, corpus.metadata);
    }
    std::ostringstream buildings;
    buildings << "building_id,archetype\n";
    for (std::size_t b = 0; b < corpus.metadata.size(); ++b) {
        buildings << corpus.metadata[b].building_id << ',' << corpus.building_archetype[b] << '\n';
    }
    csv::write_file(dir / "truth_buildings.csv", buildings.str());
    std::ostringstream days;
    days << "date,regime\n";
    for (std::size_t d = 0; d < corpus.days.size(); ++d) days << format_date(corpus.days[d]) << ',' << corpus.day_regime[d] << '\n';
    csv::write_file(dir / "truth_days.csv", days.str());
}

LabeledRegimes generate_label_regimes(std::size_t days, double label_noise, std::uint64_t seed, CivilDay start_day) {
    // Level per hour for the weekday and weekend patterns.
    constexpr std::array<std::uint8_t, kHoursPerDay> kWeekday{0, 0, 0, 0, 0, 0, 0, 1, 1, 3, 3, 3,
                                                             3, 3, 3, 3, 3, 2, 2, 2, 1, 1, 1, 0};
    constexpr std::array<std::uint8_t, kHoursPerDay> kWeekend{0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1,
                                                             1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0};
    Random rng(seed);
    LabeledRegimes out;
    out.matrix.building_id = "two_regime";
    out.matrix.levels = kDefaultLevels;
    for (std::size_t d = 0; d < days; ++d) {
        const CivilDay day = start_day + static_cast<CivilDay>(d);
        const int regime = regime_of(day, 2);
        out.matrix.days.push_back(day);
        out.regime.push_back(regime);
        const auto& pattern = regime == 0 ? kWeekday : kWeekend;
        for (int h = 0; h < kHoursPerDay; ++h) {
            std::uint8_t label = pattern[static_cast<std::size_t>(h)];
            if (label_noise > 0.0 && rng.uniform() < label_noise) {
                label = static_cast<std::uint8_t>(rng.below(kDefaultLevels));
            }
            out.matrix.labels.push_back(label);
        }
    }
    return out;
}

} // namespace ebprof
