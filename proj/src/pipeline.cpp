#include "ebprof/pipeline.hpp"

#include "ebprof/csv.hpp"
#include "ebprof/error.hpp"
#include "ebprof/report.hpp"
#include "ebprof/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ebprof {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

const char* space_name(ClusterSpace s) {
    return s == ClusterSpace::Embedded ? "embedded" : "raw";
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return in;
}

template <typename Writer>
void write_with(const fs::path& path, Writer&& writer) {
    std::ostringstream ss;
    writer(ss);
    csv::write_file(path, ss.str());
}

std::unordered_map<std::string, const BuildingMetadata*> index_metadata(const std::vector<BuildingMetadata>& metadata) {
    std::unordered_map<std::string, const BuildingMetadata*> out;
    for (const auto& m : metadata) out.emplace(m.building_id, &m);
    return out;
}

MeterTable load_meters(const PipelineConfig& cfg, IngestReport& report) {
    if (cfg.meters.empty()) throw Error(ErrorCode::ConfigError, "no meter CSV given (--meters)");
    auto in = open_input(cfg.meters);
    return parse_meter_csv(in, report);
}

std::vector<BuildingMetadata> load_metadata(const PipelineConfig& cfg) {
    if (cfg.metadata.empty()) throw Error(ErrorCode::ConfigError, "no metadata CSV given (--metadata)");
    auto in = open_input(cfg.metadata);
    return parse_metadata_csv(in);
}

BinaryBehaviorMatrix behavior_matrix(const MeterTable& table, std::size_t column, const BuildingMetadata* meta,
                                     int categories) {
    const std::string& id = table.building_ids[column];
    if (!meta) throw Error(ErrorCode::MissingMetadata, id + " has no metadata row");
    const HourlySeries series{id, table.timestamps, table.columns[column]};
    return binarize(build_day_matrix(quantile_bin(scale_series(series, *meta), categories)));
}

ojson ingest_report_json(const IngestReport& r, const MeterTable& table) {
    ojson doc;
    doc["rows_in"] = r.rows_in;
    doc["rows_out"] = r.rows_out;
    doc["rows_rejected"] = r.rows_rejected;
    doc["missing_cells"] = r.missing_cells;
    doc["negative_cells"] = r.negative_cells;
    doc["buildings"] = table.buildings();
    doc["hours"] = table.hours();
    doc["first_timestamp"] = table.timestamps.empty() ? "" : format_timestamp(table.timestamps.front());
    doc["last_timestamp"] = table.timestamps.empty() ? "" : format_timestamp(table.timestamps.back());
    auto rejects = ojson::array();
    for (const auto& rej : r.rejects) rejects.push_back(ojson{{"line", rej.line}, {"reason", rej.reason}});
    doc["rejects"] = std::move(rejects);
    doc["warnings"] = r.warnings;
    return doc;
}

ojson status_json(const BuildingStatus& s) {
    ojson doc;
    doc["building_id"] = s.building_id;
    doc["status"] = s.fitted ? "fitted" : "excluded";
    if (s.fitted) {
        doc["days"] = s.days;
        doc["explained_top_k"] = s.explained_top_k;
    } else {
        doc["reason"] = s.reason;
        doc["detail"] = s.detail;
    }
    return doc;
}

void write_days_csv(std::ostream& out, const DayClassification& dc) {
    out << "date,assigned";
    for (std::size_t j = 0; j < dc.k; ++j) out << ",w" << j + 1;
    out << '\n';
    for (std::size_t i = 0; i < dc.days.size(); ++i) {
        out << format_date(dc.days[i]) << ',' << dc.assigned[i];
        for (std::size_t j = 0; j < dc.k; ++j) out << ',' << csv::format_number(dc.weights(i, j));
        out << '\n';
    }
}

void write_model(const fs::path& path, const EigenModel& model) {
    csv::write_file(path, to_json(model).dump() + "\n");
}

// Writes per-building artifacts for one fit. `name` is the file-safe stem.
void write_building_outputs(const fs::path& out, const std::string& name, const BuildingFit& fit) {
    if (!fit.status.fitted) return;
    write_model(out / "models" / (name + ".json"), *fit.model);
    write_with(out / "days" / (name + ".csv"), [&](std::ostream& os) { write_days_csv(os, *fit.classification); });
    if (fit.binary) {
        write_with(out / "matrices" / (name + "_B.csv"),
                   [&](std::ostream& os) { write_day_matrix_csv(os, decode_binary(*fit.binary)); });
        write_with(out / "matrices" / (name + "_Bprime.csv"),
                   [&](std::ostream& os) { write_binary_matrix_csv(os, *fit.binary); });
    }
}

struct Cohort {
    std::vector<std::string> ids;
    Matrix primary;
};

Cohort cohort_from_fits(const std::vector<BuildingFit>& fits) {
    Cohort c;
    std::size_t h = 0;
    for (const auto& f : fits) {
        if (f.status.fitted) {
            c.ids.push_back(f.status.building_id);
            h = f.model->dimension();
        }
    }
    c.primary = Matrix(c.ids.size(), h);
    std::size_t r = 0;
    for (const auto& f : fits) {
        if (!f.status.fitted) continue;
        const auto v = f.model->eigenvectors.row(0);
        std::copy(v.begin(), v.end(), c.primary.row(r++).begin());
    }
    return c;
}

Embedding run_embed(const Cohort& cohort, const PipelineConfig& cfg) {
    const std::size_t n = cohort.ids.size();
    if (n < 3) throw Error(ErrorCode::TooFewPoints, "embedding needs at least 3 buildings, have " + std::to_string(n));
    EmbedConfig ec = cfg.embed;
    ec.seed = cfg.embed_seed();
    ec.n_neighbors = std::min(ec.n_neighbors, n - 1);
    return embed(cohort.primary, ec, cohort.ids);
}

std::vector<ProfileSummary> run_cluster(const Cohort& cohort, const Embedding& emb, const PipelineConfig& cfg) {
    const Matrix& points = cfg.cluster_space == ClusterSpace::Embedded ? emb.coords : cohort.primary;
    KMeansConfig kc = cfg.cluster;
    kc.seed = cfg.cluster_seed();
    const KMeansModel model = kmeans_fit(points, kc);
    auto profiles = summarize_profiles(model.labels, cohort.primary, cohort.ids, model.centroids);

    std::vector<std::string> profile_of_cluster(model.k);
    for (const auto& p : profiles) profile_of_cluster[p.cluster] = p.profile_id;

    const fs::path& out = cfg.out;
    write_with(out / "clusters.csv", [&](std::ostream& os) {
        os << "building_id,profile\n";
        for (std::size_t i = 0; i < cohort.ids.size(); ++i) {
            os << csv::escape(cohort.ids[i]) << ',' << profile_of_cluster[model.labels[i]] << '\n';
        }
    });
    write_with(out / "centroids.csv", [&](std::ostream& os) {
        os << "profile";
        if (cfg.cluster_space == ClusterSpace::Embedded) {
            os << ",x,y";
        } else {
            for (std::size_t c = 0; c < model.centroids.cols(); ++c) os << ",c" << c;
        }
        os << '\n';
        for (const auto& p : profiles) {
            os << p.profile_id;
            for (double v : model.centroids.row(p.cluster)) os << ',' << csv::format_number(v);
            os << '\n';
        }
    });
    write_with(out / "profiles.csv", [&](std::ostream& os) {
        os << "profile,members";
        for (std::size_t c = 0; c < cohort.primary.cols(); ++c) os << ",e" << c;
        os << '\n';
        for (const auto& p : profiles) {
            os << p.profile_id << ',' << p.members.size();
            for (double v : p.median) os << ',' << csv::format_number(v);
            os << '\n';
        }
    });
    write_with(out / "profiles_grid.csv", [&](std::ostream& os) {
        os << "profile,level";
        for (int h = 0; h < kHoursPerDay; ++h) os << ",h" << (h < 10 ? "0" : "") << h;
        os << '\n';
        for (const auto& p : profiles) {
            const Matrix grid = reshape_behavior(p.median, cfg.categories);
            for (std::size_t l = 0; l < grid.rows(); ++l) {
                os << p.profile_id << ',' << l;
                for (double v : grid.row(l)) os << ',' << csv::format_number(v);
                os << '\n';
            }
        }
    });
    if (cfg.elbow) {
        const auto curve = elbow(points, 2, 12, kc);
        write_with(out / "elbow.csv", [&](std::ostream& os) {
            os << "k,inertia\n";
            for (const auto& e : curve) os << e.k << ',' << csv::format_number(e.inertia) << '\n';
        });
    }
    return profiles;
}

Cohort read_cohort(const PipelineConfig& cfg) {
    const fs::path path = cfg.out / "primary_eigenbehaviors.csv";
    if (!fs::exists(path)) throw Error(ErrorCode::IoError, path.string() + " not found; run `fit` first");
    auto in = open_input(path);
    Cohort c;
    read_eigenbehavior_csv(in, c.ids, c.primary);
    return c;
}

template <typename T>
void read_field(const json& doc, const char* key, T& target) {
    if (!doc.contains(key)) return;
    try {
        target = doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("config field '") + key + "': " + e.what());
    }
}

void reject_unknown(const json& doc, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, _] : doc.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
            throw Error(ErrorCode::ConfigError, "unknown config key '" + where + key + "'");
        }
    }
}

} // namespace

std::uint64_t PipelineConfig::embed_seed() const {
    return derive_seed(seed, "embed");
}

std::uint64_t PipelineConfig::cluster_seed() const {
    return derive_seed(seed, "cluster");
}

void PipelineConfig::validate() const {
    if (categories < 2) throw Error(ErrorCode::ConfigError, "categories must be at least 2");
    if (top_k < 1 || top_k > static_cast<std::size_t>(categories * kHoursPerDay)) {
        throw Error(ErrorCode::ConfigError, "top-k must lie in [1, 24 * categories]");
    }
    if (cluster.k < 1) throw Error(ErrorCode::ConfigError, "clusters must be at least 1");
    if (cluster.max_iter < 1) throw Error(ErrorCode::ConfigError, "cluster max_iter must be at least 1");
    if (threads < 0) throw Error(ErrorCode::ConfigError, "threads must be non-negative");
    embed.validate();
}

ojson to_json(const PipelineConfig& cfg) {
    ojson doc;
    doc["meters"] = cfg.meters.generic_string();
    doc["metadata"] = cfg.metadata.generic_string();
    doc["out"] = cfg.out.generic_string();
    doc["seed"] = cfg.seed;
    doc["categories"] = cfg.categories;
    doc["top_k"] = cfg.top_k;
    ojson e;
    e["neighbors"] = cfg.embed.n_neighbors;
    e["min_dist"] = cfg.embed.min_dist;
    e["epochs"] = cfg.embed.epochs;
    e["negative_samples"] = cfg.embed.negative_samples;
    if (cfg.embed.a) e["a"] = *cfg.embed.a;
    if (cfg.embed.b) e["b"] = *cfg.embed.b;
    e["parallel"] = cfg.embed.mode == LayoutMode::Parallel;
    e["check_every_epoch"] = cfg.embed.check_every_epoch;
    doc["embed"] = std::move(e);
    ojson c;
    c["k"] = cfg.cluster.k;
    c["restarts"] = cfg.cluster.restarts;
    c["max_iter"] = cfg.cluster.max_iter;
    c["space"] = space_name(cfg.cluster_space);
    doc["cluster"] = std::move(c);
    doc["dump_matrices"] = cfg.dump_matrices;
    doc["elbow"] = cfg.elbow;
    doc["threads"] = cfg.threads;
    doc["report_buildings"] = cfg.report_buildings;
    return doc;
}

PipelineConfig config_from_json(const json& doc, PipelineConfig cfg) {
    if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
    reject_unknown(doc,
                   {"meters", "metadata", "out", "seed", "categories", "top_k", "embed", "cluster", "dump_matrices",
                    "elbow", "threads", "report_buildings"},
                   "");
    std::string path;
    if (doc.contains("meters")) {
        read_field(doc, "meters", path);
        cfg.meters = path;
    }
    if (doc.contains("metadata")) {
        read_field(doc, "metadata", path);
        cfg.metadata = path;
    }
    if (doc.contains("out")) {
        read_field(doc, "out", path);
        cfg.out = path;
    }
    read_field(doc, "seed", cfg.seed);
    read_field(doc, "categories", cfg.categories);
    read_field(doc, "top_k", cfg.top_k);
    read_field(doc, "dump_matrices", cfg.dump_matrices);
    read_field(doc, "elbow", cfg.elbow);
    read_field(doc, "threads", cfg.threads);
    read_field(doc, "report_buildings", cfg.report_buildings);
    if (doc.contains("embed")) {
        const json& e = doc.at("embed");
        if (!e.is_object()) throw Error(ErrorCode::ConfigError, "'embed' must be an object");
        reject_unknown(e, {"neighbors", "min_dist", "epochs", "negative_samples", "a", "b", "parallel", "check_every_epoch"},
                       "embed.");
        read_field(e, "neighbors", cfg.embed.n_neighbors);
        read_field(e, "min_dist", cfg.embed.min_dist);
        read_field(e, "epochs", cfg.embed.epochs);
        read_field(e, "negative_samples", cfg.embed.negative_samples);
        if (e.contains("a")) {
            double a = 0.0;
            read_field(e, "a", a);
            cfg.embed.a = a;
        }
        if (e.contains("b")) {
            double b = 0.0;
            read_field(e, "b", b);
            cfg.embed.b = b;
        }
        bool parallel = cfg.embed.mode == LayoutMode::Parallel;
        read_field(e, "parallel", parallel);
        cfg.embed.mode = parallel ? LayoutMode::Parallel : LayoutMode::Sequential;
        read_field(e, "check_every_epoch", cfg.embed.check_every_epoch);
    }
    if (doc.contains("cluster")) {
        const json& c = doc.at("cluster");
        if (!c.is_object()) throw Error(ErrorCode::ConfigError, "'cluster' must be an object");
        reject_unknown(c, {"k", "restarts", "max_iter", "space"}, "cluster.");
        read_field(c, "k", cfg.cluster.k);
        read_field(c, "restarts", cfg.cluster.restarts);
        read_field(c, "max_iter", cfg.cluster.max_iter);
        std::string space = space_name(cfg.cluster_space);
        read_field(c, "space", space);
        if (space == "embedded") {
            cfg.cluster_space = ClusterSpace::Embedded;
        } else if (space == "raw") {
            cfg.cluster_space = ClusterSpace::Raw;
        } else {
            throw Error(ErrorCode::ConfigError, "cluster.space must be 'embedded' or 'raw'");
        }
    }
    return cfg;
}

PipelineConfig load_config(const fs::path& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
    PipelineConfig cfg = config_from_json(doc, std::move(base));
    // Relative paths in a config file are relative to the file itself.
    const fs::path dir = path.parent_path();
    auto resolve = [&](fs::path& p, const char* key) {
        if (doc.contains(key) && p.is_relative()) p = dir / p;
    };
    resolve(cfg.meters, "meters");
    resolve(cfg.metadata, "metadata");
    resolve(cfg.out, "out");
    return cfg;
}

BuildingFit fit_building(const MeterTable& table, std::size_t column, const BuildingMetadata* meta,
                         const PipelineConfig& cfg) {
    BuildingFit fit;
    fit.status.building_id = table.building_ids[column];
    try {
        BinaryBehaviorMatrix bin = behavior_matrix(table, column, meta, cfg.categories);
        EigenModel model = fit_eigen_model(bin);
        fit.status.explained_top_k = explained_variance(model, std::min(cfg.top_k, model.dimension()));
        fit.classification = classify_days(bin, model, cfg.top_k);
        fit.status.days = bin.day_count();
        fit.status.fitted = true;
        fit.model = std::move(model);
        if (cfg.dump_matrices) fit.binary = std::move(bin);
    } catch (const Error& e) {
        fit.status.fitted = false;
        fit.status.reason = std::string(to_string(e.code()));
        fit.status.detail = e.what();
        fit.model.reset();
        fit.classification.reset();
    }
    return fit;
}

std::vector<BuildingFit> fit_all(const MeterTable& table, const std::vector<BuildingMetadata>& metadata,
                                 const PipelineConfig& cfg) {
    const auto meta = index_metadata(metadata);
    std::vector<BuildingFit> fits(table.buildings());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(table.buildings()); ++b) {
        const auto col = static_cast<std::size_t>(b);
        const auto it = meta.find(table.building_ids[col]);
        fits[col] = fit_building(table, col, it == meta.end() ? nullptr : it->second, cfg);
    }
    return fits;
}

std::vector<BuildingFit> fit_all_serial(const MeterTable& table, const std::vector<BuildingMetadata>& metadata,
                                        const PipelineConfig& cfg) {
    const auto meta = index_metadata(metadata);
    std::vector<BuildingFit> fits;
    fits.reserve(table.buildings());
    for (std::size_t b = 0; b < table.buildings(); ++b) {
        const auto it = meta.find(table.building_ids[b]);
        fits.push_back(fit_building(table, b, it == meta.end() ? nullptr : it->second, cfg));
    }
    return fits;
}

ojson to_json(const RunManifest& m) {
    ojson doc;
    doc["config"] = m.config;
    doc["counts"] = ojson{{"input", m.buildings.size()}, {"fitted", m.fitted}, {"excluded", m.excluded}};
    auto buildings = ojson::array();
    for (const auto& s : m.buildings) buildings.push_back(status_json(s));
    doc["buildings"] = std::move(buildings);
    doc["cohort_dependent"] = m.cohort_dependent;
    ojson artifacts = ojson::object();
    for (const auto& [path, sum] : m.artifacts) artifacts[path] = sum;
    doc["artifacts"] = std::move(artifacts);
    doc["wall_time_seconds"] = m.wall_time_seconds;
    return doc;
}

std::vector<std::string> safe_names(const std::vector<std::string>& ids) {
    std::vector<std::string> out;
    std::set<std::string> used;
    for (const auto& id : ids) {
        std::string name;
        for (char c : id) {
            const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                            c == '-' || c == '.';
            name.push_back(ok ? c : '_');
        }
        if (name.empty() || name.front() == '.') name.insert(name.begin(), '_');
        std::string candidate = name;
        for (int n = 2; used.count(candidate) != 0; ++n) candidate = name + "_" + std::to_string(n);
        used.insert(candidate);
        out.push_back(std::move(candidate));
    }
    return out;
}

std::string file_checksum(const fs::path& path) {
    const std::string bytes = csv::read_file(path);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

void write_eigenbehavior_csv(std::ostream& out, const std::vector<std::string>& ids, const Matrix& rows) {
    out << "building_id";
    for (std::size_t c = 0; c < rows.cols(); ++c) out << ",e" << c;
    out << '\n';
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        out << csv::escape(ids[i]);
        for (double v : rows.row(i)) out << ',' << csv::format_number(v);
        out << '\n';
    }
}

void read_eigenbehavior_csv(std::istream& in, std::vector<std::string>& ids, Matrix& rows) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyInput, "eigenbehavior CSV is empty");
    const std::size_t width = csv::split(line).size() - 1;
    std::vector<double> values;
    ids.clear();
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != width + 1) throw Error(ErrorCode::SchemaError, "eigenbehavior row has the wrong width");
        ids.push_back(f[0]);
        for (std::size_t c = 1; c < f.size(); ++c) {
            const auto v = csv::parse_number(f[c]);
            if (!v) throw Error(ErrorCode::SchemaError, "non-numeric eigenbehavior entry");
            values.push_back(*v);
        }
    }
    rows = Matrix(ids.size(), width);
    std::copy(values.begin(), values.end(), rows.data().begin());
}

IngestReport stage_ingest(const PipelineConfig& cfg) {
    IngestReport report;
    const MeterTable table = load_meters(cfg, report);
    fs::create_directories(cfg.out);
    ojson doc = ingest_report_json(report, table);
    if (!cfg.metadata.empty()) {
        const auto metadata = load_metadata(cfg);
        const auto meta = index_metadata(metadata);
        std::size_t with_area = 0, without = 0;
        for (const auto& id : table.building_ids) {
            const auto it = meta.find(id);
            if (it != meta.end() && it->second->floor_area) {
                ++with_area;
            } else {
                ++without;
            }
        }
        doc["metadata_records"] = metadata.size();
        doc["buildings_with_area"] = with_area;
        doc["buildings_without_area"] = without;
    }
    csv::write_file(cfg.out / "ingest_report.json", doc.dump(2) + "\n");
    write_with(cfg.out / "meters_normalized.csv", [&](std::ostream& os) { write_meter_csv(os, table); });
    return report;
}

std::vector<BuildingStatus> stage_fit(const PipelineConfig& cfg) {
    cfg.validate();
    IngestReport report;
    const MeterTable table = load_meters(cfg, report);
    const auto metadata = load_metadata(cfg);
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    auto fits = fit_all(table, metadata, cfg);

    const auto names = safe_names(table.building_ids);
    fs::remove_all(cfg.out / "models");
    fs::remove_all(cfg.out / "matrices");
    for (std::size_t b = 0; b < fits.size(); ++b) {
        if (!fits[b].status.fitted) continue;
        write_model(cfg.out / "models" / (names[b] + ".json"), *fits[b].model);
        if (fits[b].binary) {
            write_with(cfg.out / "matrices" / (names[b] + "_B.csv"),
                       [&](std::ostream& os) { write_day_matrix_csv(os, decode_binary(*fits[b].binary)); });
            write_with(cfg.out / "matrices" / (names[b] + "_Bprime.csv"),
                       [&](std::ostream& os) { write_binary_matrix_csv(os, *fits[b].binary); });
        }
    }
    const Cohort cohort = cohort_from_fits(fits);
    write_with(cfg.out / "primary_eigenbehaviors.csv",
               [&](std::ostream& os) { write_eigenbehavior_csv(os, cohort.ids, cohort.primary); });

    std::vector<BuildingStatus> statuses;
    auto arr = ojson::array();
    for (const auto& f : fits) {
        statuses.push_back(f.status);
        arr.push_back(status_json(f.status));
    }
    csv::write_file(cfg.out / "fit_status.json", arr.dump(2) + "\n");
    return statuses;
}

void stage_classify(const PipelineConfig& cfg) {
    cfg.validate();
    IngestReport report;
    const MeterTable table = load_meters(cfg, report);
    const auto metadata = load_metadata(cfg);
    const auto meta = index_metadata(metadata);
    const auto names = safe_names(table.building_ids);
    if (!fs::exists(cfg.out / "models")) throw Error(ErrorCode::IoError, "no models directory; run `fit` first");
    fs::remove_all(cfg.out / "days");
    for (std::size_t b = 0; b < table.buildings(); ++b) {
        const fs::path model_path = cfg.out / "models" / (names[b] + ".json");
        if (!fs::exists(model_path)) continue;
        const EigenModel model = eigen_model_from_json(json::parse(csv::read_file(model_path)));
        const auto it = meta.find(table.building_ids[b]);
        const auto bin = behavior_matrix(table, b, it == meta.end() ? nullptr : it->second, cfg.categories);
        const auto dc = classify_days(bin, model, cfg.top_k);
        write_with(cfg.out / "days" / (names[b] + ".csv"), [&](std::ostream& os) { write_days_csv(os, dc); });
    }
}

Embedding stage_embed(const PipelineConfig& cfg) {
    cfg.validate();
    const Cohort cohort = read_cohort(cfg);
    Embedding emb = run_embed(cohort, cfg);
    write_with(cfg.out / "embedding.csv", [&](std::ostream& os) { write_embedding_csv(os, emb); });
    return emb;
}

std::vector<ProfileSummary> stage_cluster(const PipelineConfig& cfg) {
    cfg.validate();
    const Cohort cohort = read_cohort(cfg);
    Embedding emb;
    if (cfg.cluster_space == ClusterSpace::Embedded) {
        const fs::path path = cfg.out / "embedding.csv";
        if (!fs::exists(path)) throw Error(ErrorCode::IoError, path.string() + " not found; run `embed` first");
        auto in = open_input(path);
        emb = read_embedding_csv(in);
        if (emb.building_ids != cohort.ids) {
            throw Error(ErrorCode::SchemaError, "embedding.csv and primary_eigenbehaviors.csv list different buildings");
        }
    }
    return run_cluster(cohort, emb, cfg);
}

RunManifest run_pipeline(const PipelineConfig& cfg) {
    const auto started = std::chrono::steady_clock::now();
    cfg.validate();
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

    IngestReport report;
    const MeterTable table = load_meters(cfg, report);
    const auto metadata = load_metadata(cfg);

    const fs::path& out = cfg.out;
    fs::create_directories(out);
    for (const char* sub : {"models", "days", "matrices", "figures"}) fs::remove_all(out / sub);
    for (const char* file : {"elbow.csv", "manifest.json"}) fs::remove(out / file);
    csv::write_file(out / "ingest_report.json", ingest_report_json(report, table).dump(2) + "\n");

    auto fits = fit_all(table, metadata, cfg);
    const auto names = safe_names(table.building_ids);
    RunManifest manifest;
    manifest.config = to_json(cfg);
    for (std::size_t b = 0; b < fits.size(); ++b) {
        write_building_outputs(out, names[b], fits[b]);
        manifest.buildings.push_back(fits[b].status);
        ++(fits[b].status.fitted ? manifest.fitted : manifest.excluded);
    }
    csv::write_file(out / "fit_status.json", [&] {
        auto arr = ojson::array();
        for (const auto& s : manifest.buildings) arr.push_back(status_json(s));
        return arr.dump(2) + "\n";
    }());

    if (manifest.fitted < cfg.cluster.k) {
        throw Error(ErrorCode::TooFewPoints, std::to_string(manifest.fitted) + " buildings fitted, clustering needs " +
                                                 std::to_string(cfg.cluster.k));
    }

    const Cohort cohort = cohort_from_fits(fits);
    fits.clear();
    write_with(out / "primary_eigenbehaviors.csv",
               [&](std::ostream& os) { write_eigenbehavior_csv(os, cohort.ids, cohort.primary); });
    const Embedding emb = run_embed(cohort, cfg);
    write_with(out / "embedding.csv", [&](std::ostream& os) { write_embedding_csv(os, emb); });
    run_cluster(cohort, emb, cfg);

    ReportOptions ropts;
    ropts.top_k = cfg.top_k;
    ropts.levels = cfg.categories;
    ropts.max_buildings = cfg.report_buildings;
    report_figures(out, ropts);

    manifest.cohort_dependent = {"embedding.csv", "clusters.csv", "centroids.csv", "profiles.csv",
                                 "profiles_grid.csv", "figures/embedding_scatter.csv", "figures/profile_medians.csv"};
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(out)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    for (const auto& f : files) {
        const std::string rel = fs::relative(f, out).generic_string();
        if (rel == "manifest.json") continue;
        manifest.artifacts[rel] = file_checksum(f);
    }
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    csv::write_file(out / "manifest.json", to_json(manifest).dump(2) + "\n");
    return manifest;
}

} // namespace ebprof
