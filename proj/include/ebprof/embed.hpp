#ifndef EBPROF_EMBED_HPP
#define EBPROF_EMBED_HPP

// UMAP-style 2-D embedding: exact kNN graph, fuzzy simplicial set, SGD layout.

#include "ebprof/matrix.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ebprof {

struct NeighborGraph {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::size_t> indices; // n * k, row i ascending by distance
    std::vector<double> distances;

    std::span<const std::size_t> neighbors(std::size_t i) const { return {indices.data() + i * k, k}; }
    std::span<const double> neighbor_distances(std::size_t i) const { return {distances.data() + i * k, k}; }
};

/// Exact brute-force kNN. Throws TooFewPoints when N <= k.
NeighborGraph knn(const Matrix& points, std::size_t k);

struct FuzzyEdge {
    std::size_t i = 0; // i < j
    std::size_t j = 0;
    double weight = 0.0;
};

struct FuzzyGraph {
    std::size_t n = 0;
    std::vector<double> rho;
    std::vector<double> sigma;    // 0 for points whose neighbours all sit at distance 0
    std::vector<double> directed; // a_ij, aligned with NeighborGraph::indices
    std::vector<FuzzyEdge> edges; // symmetrised, sorted by (i, j), all weights in (0, 1]

    /// Symmetrised weight, 0 when the pair is not an edge.
    double weight(std::size_t i, std::size_t j) const;
};

/// sum_j exp(-max(0, d_j - rho) / sigma)
double membership_sum(std::span<const double> distances, double rho, double sigma);

/// Per-point rho/sigma calibration (sum hits log2(k)) and fuzzy-union symmetrisation
/// w = a_ij + a_ji - a_ij * a_ji.
FuzzyGraph fuzzy_memberships(const NeighborGraph& graph);

/// Low-dimensional kernel 1 / (1 + a d^(2b)).
struct CurveParams {
    double a = 0.0;
    double b = 0.0;
};

/// Least-squares fit of the kernel to 1 for d < min_dist and exp(-(d - min_dist)) beyond,
/// on 300 evenly spaced d in [0, 3].
CurveParams fit_curve(double min_dist);

enum class LayoutMode {
    Sequential, // bitwise reproducible
    Parallel,   // epoch-snapshot updates across OpenMP threads
};

struct EmbedConfig {
    std::size_t n_neighbors = 15;
    double min_dist = 0.1;
    int epochs = 200;
    int negative_samples = 5;
    std::uint64_t seed = 42;
    std::optional<double> a;
    std::optional<double> b;
    LayoutMode mode = LayoutMode::Sequential;
    /// Check coordinates for NaN/Inf after every epoch instead of only at the end.
    bool check_every_epoch = false;

    /// Throws ConfigError.
    void validate() const;
    /// Explicit (a, b) when both are set, otherwise fit_curve(min_dist).
    CurveParams curve() const;
};

struct Embedding {
    std::vector<std::string> building_ids;
    Matrix coords; // N x 2
};

/// SGD on the fuzzy cross-entropy. Throws OptimizationDiverged.
Embedding optimize_layout(const FuzzyGraph& fuzzy, const EmbedConfig& cfg, const Matrix& init);

/// Projection on the first two principal components, each axis rescaled to [-extent, extent].
Matrix pca_init(const Matrix& points, double extent = 10.0);

/// knn -> fuzzy_memberships -> optimize_layout from pca_init. Points are processed in a
/// canonical (lexicographic) order and results mapped back, so reordering the input
/// reorders the output identically.
Embedding embed(const Matrix& points, const EmbedConfig& cfg, std::vector<std::string> ids = {});

void write_embedding_csv(std::ostream& out, const Embedding& emb);
Embedding read_embedding_csv(std::istream& in);

} // namespace ebprof

#endif
