// ebprof: eigenbehavior profiling of hourly building meter data.

#include "ebprof/error.hpp"
#include "ebprof/pipeline.hpp"
#include "ebprof/report.hpp"
#include "ebprof/synth.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct CommonFlags {
    std::string config;
    std::string meters;
    std::string metadata;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> categories;
    std::optional<std::size_t> top_k;
    std::optional<std::size_t> clusters;
    std::optional<std::size_t> neighbors;
    std::optional<double> min_dist;
    std::optional<int> epochs;
    std::optional<std::string> cluster_space;
    std::optional<int> threads;
    std::optional<std::size_t> report_buildings;
    bool dump_matrices = false;
    bool elbow = false;
    bool parallel_layout = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON config file (CLI flags override it)");
    cmd->add_option("--meters", f.meters, "Wide hourly meter CSV");
    cmd->add_option("--metadata", f.metadata, "Building metadata CSV");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--seed", f.seed, "Global seed");
    cmd->add_option("--categories", f.categories, "Usage categories per hour (default 4)");
    cmd->add_option("--top-k", f.top_k, "Eigenbehaviors used for day classification (default 3)");
    cmd->add_option("--clusters", f.clusters, "Number of behavior profiles (default 6)");
    cmd->add_option("--neighbors", f.neighbors, "Embedding neighbourhood size (default 15)");
    cmd->add_option("--min-dist", f.min_dist, "Embedding min_dist (default 0.1)");
    cmd->add_option("--epochs", f.epochs, "Embedding epochs (default 200)");
    cmd->add_option("--cluster-space", f.cluster_space, "Cluster in 'embedded' (default) or 'raw' space");
    cmd->add_option("--threads", f.threads, "OpenMP threads (0 = runtime default)");
    cmd->add_option("--report-buildings", f.report_buildings, "Per-building figures for at most N buildings (0 = all)");
    cmd->add_flag("--dump-matrices", f.dump_matrices, "Write B and B' per building");
    cmd->add_flag("--elbow", f.elbow, "Write inertia for k = 2..12");
    cmd->add_flag("--parallel-layout", f.parallel_layout, "Multi-threaded layout optimisation (not bitwise reproducible)");
}

ebprof::PipelineConfig resolve(const CommonFlags& f) {
    using namespace ebprof;
    PipelineConfig cfg;
    if (!f.config.empty()) cfg = load_config(f.config);
    if (!f.meters.empty()) cfg.meters = f.meters;
    if (!f.metadata.empty()) cfg.metadata = f.metadata;
    if (!f.out.empty()) cfg.out = f.out;
    if (f.seed) cfg.seed = *f.seed;
    if (f.categories) cfg.categories = *f.categories;
    if (f.top_k) cfg.top_k = *f.top_k;
    if (f.clusters) cfg.cluster.k = *f.clusters;
    if (f.neighbors) cfg.embed.n_neighbors = *f.neighbors;
    if (f.min_dist) cfg.embed.min_dist = *f.min_dist;
    if (f.epochs) cfg.embed.epochs = *f.epochs;
    if (f.threads) cfg.threads = *f.threads;
    if (f.report_buildings) cfg.report_buildings = *f.report_buildings;
    if (f.cluster_space) {
        if (*f.cluster_space == "embedded") {
            cfg.cluster_space = ClusterSpace::Embedded;
        } else if (*f.cluster_space == "raw") {
            cfg.cluster_space = ClusterSpace::Raw;
        } else {
            throw Error(ErrorCode::ConfigError, "--cluster-space must be 'embedded' or 'raw'");
        }
    }
    if (f.dump_matrices) cfg.dump_matrices = true;
    if (f.elbow) cfg.elbow = true;
    if (f.parallel_layout) cfg.embed.mode = LayoutMode::Parallel;
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    using namespace ebprof;
    CLI::App app{"Eigenbehavior profiling of hourly building energy data"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto* ingest = app.add_subcommand("ingest", "Validate a meter CSV and write an ingest report");
    auto* fit = app.add_subcommand("fit", "Fit per-building eigenbehavior models");
    auto* classify = app.add_subcommand("classify", "Classify each day against fitted models");
    auto* embed_cmd = app.add_subcommand("embed", "Embed primary eigenbehaviors in 2-D");
    auto* cluster = app.add_subcommand("cluster", "Cluster the embedding into behavior profiles");
    auto* report = app.add_subcommand("report", "Write figure data and SVGs for a finished run");
    auto* run = app.add_subcommand("run", "Run every stage end to end");
    for (auto* cmd : {ingest, fit, classify, embed_cmd, cluster, report, run}) add_common(cmd, flags);

    SynthConfig synth_cfg;
    std::string synth_out = "synthetic";
    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
    synth->add_option("--out", synth_out, "Output directory");
    synth->add_option("--buildings", synth_cfg.buildings, "Number of buildings");
    synth->add_option("--days", synth_cfg.days, "Number of days (>= 7)");
    synth->add_option("--regimes", synth_cfg.regimes, "1, 2 (weekday/weekend) or 3 (weekday/Sat/Sun)");
    synth->add_option("--archetypes", synth_cfg.archetypes, "Distinct building load shapes");
    synth->add_option("--noise", synth_cfg.noise, "Multiplicative hourly noise (std dev)");
    synth->add_option("--seed", synth_cfg.seed, "Seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) {
            const SynthCorpus corpus = generate_synthetic(synth_cfg);
            write_corpus(corpus, synth_out);
            std::cout << "wrote " << corpus.meters.buildings() << " buildings x " << synth_cfg.days << " days to "
                      << synth_out << '\n';
            return 0;
        }
        const PipelineConfig cfg = resolve(flags);
        if (ingest->parsed()) {
            const IngestReport r = stage_ingest(cfg);
            std::cout << "rows in " << r.rows_in << ", kept " << r.rows_out << ", rejected " << r.rows_rejected
                      << ", missing cells " << r.missing_cells << ", negative cells " << r.negative_cells << '\n';
        } else if (fit->parsed()) {
            const auto statuses = stage_fit(cfg);
            std::size_t fitted = 0;
            for (const auto& s : statuses) {
                if (s.fitted) {
                    ++fitted;
                } else {
                    std::cerr << "excluded " << s.building_id << ": " << s.reason << '\n';
                }
            }
            std::cout << fitted << " of " << statuses.size() << " buildings fitted\n";
        } else if (classify->parsed()) {
            stage_classify(cfg);
        } else if (embed_cmd->parsed()) {
            const Embedding emb = stage_embed(cfg);
            std::cout << "embedded " << emb.coords.rows() << " buildings\n";
        } else if (cluster->parsed()) {
            for (const auto& p : stage_cluster(cfg)) std::cout << p.profile_id << ": " << p.members.size() << " buildings\n";
        } else if (report->parsed()) {
            ReportOptions opts;
            opts.top_k = cfg.top_k;
            opts.levels = cfg.categories;
            opts.max_buildings = cfg.report_buildings;
            std::cout << report_figures(cfg.out, opts).size() << " figure files written\n";
        } else if (run->parsed()) {
            const RunManifest m = run_pipeline(cfg);
            for (const auto& s : m.buildings) {
                if (!s.fitted) std::cerr << "excluded " << s.building_id << ": " << s.reason << '\n';
            }
            std::cout << m.fitted << " fitted, " << m.excluded << " excluded, " << m.artifacts.size()
                      << " artifacts in " << cfg.out.string() << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
