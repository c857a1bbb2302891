#ifndef EBPROF_PIPELINE_HPP
#define EBPROF_PIPELINE_HPP

#include "ebprof/behavior.hpp"
#include "ebprof/cluster.hpp"
#include "ebprof/eigen.hpp"
#include "ebprof/embed.hpp"
#include "ebprof/ingest.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ebprof {

enum class ClusterSpace {
    Embedded, // k-means on the 2-D embedding
    Raw,      // k-means on the 96-D primary eigenbehaviors
};

struct PipelineConfig {
    std::filesystem::path meters;
    std::filesystem::path metadata;
    std::filesystem::path out = "out";
    std::uint64_t seed = 42;
    int categories = kDefaultLevels;
    std::size_t top_k = 3;
    EmbedConfig embed;
    KMeansConfig cluster;
    ClusterSpace cluster_space = ClusterSpace::Embedded;
    /// Also write B and B' per building.
    bool dump_matrices = false;
    /// Write an inertia-vs-k table for k in [2, 12].
    bool elbow = false;
    /// OpenMP threads for the per-building stage; 0 keeps the runtime default.
    int threads = 0;
    /// Per-building figures for at most this many buildings (id order); 0 means all.
    std::size_t report_buildings = 0;

    /// Sub-seeds: derive_seed(seed, "embed") and derive_seed(seed, "cluster").
    std::uint64_t embed_seed() const;
    std::uint64_t cluster_seed() const;

    /// Throws ConfigError.
    void validate() const;
};

nlohmann::ordered_json to_json(const PipelineConfig& cfg);
/// Overlays the fields present in `doc` onto `base`. Throws ConfigError.
PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

struct BuildingStatus {
    std::string building_id;
    bool fitted = false;
    std::string reason; // error name when excluded
    std::string detail;
    std::size_t days = 0;
    double explained_top_k = 0.0;
};

struct BuildingFit {
    BuildingStatus status;
    std::optional<EigenModel> model;
    std::optional<DayClassification> classification;
    std::optional<BinaryBehaviorMatrix> binary; // kept only when matrices are dumped
};

/// scale -> bin -> B -> B' -> EigenModel -> day classification for one building.
/// Stage errors are captured in the status rather than thrown.
BuildingFit fit_building(const MeterTable& table, std::size_t column, const BuildingMetadata* meta,
                         const PipelineConfig& cfg);

/// All buildings, fanned out over OpenMP threads; result order follows the table.
std::vector<BuildingFit> fit_all(const MeterTable& table, const std::vector<BuildingMetadata>& metadata,
                                 const PipelineConfig& cfg);
std::vector<BuildingFit> fit_all_serial(const MeterTable& table, const std::vector<BuildingMetadata>& metadata,
                                        const PipelineConfig& cfg);

struct RunManifest {
    nlohmann::ordered_json config;
    std::vector<BuildingStatus> buildings;
    std::size_t fitted = 0;
    std::size_t excluded = 0;
    std::vector<std::string> cohort_dependent;
    std::map<std::string, std::string> artifacts; // relative path -> FNV-1a 64 hex
    double wall_time_seconds = 0.0;
};

nlohmann::ordered_json to_json(const RunManifest& manifest);

/// Stage drivers. Each reads its inputs from files and writes its outputs under cfg.out.
IngestReport stage_ingest(const PipelineConfig& cfg);
std::vector<BuildingStatus> stage_fit(const PipelineConfig& cfg);
void stage_classify(const PipelineConfig& cfg);
Embedding stage_embed(const PipelineConfig& cfg);
std::vector<ProfileSummary> stage_cluster(const PipelineConfig& cfg);

/// End-to-end run; writes every export, the figures and manifest.json.
/// Throws TooFewPoints when fewer than cluster.k buildings survive the per-building stage.
RunManifest run_pipeline(const PipelineConfig& cfg);

/// File-name-safe, collision-free names for building ids (same order).
std::vector<std::string> safe_names(const std::vector<std::string>& ids);

/// FNV-1a 64 of a file's bytes as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

/// Primary eigenbehavior table: building_id,e0..e{H-1}.
void write_eigenbehavior_csv(std::ostream& out, const std::vector<std::string>& ids, const Matrix& rows);
void read_eigenbehavior_csv(std::istream& in, std::vector<std::string>& ids, Matrix& rows);

} // namespace ebprof

#endif
