#include "ebprof/embed.hpp"

#include "ebprof/csv.hpp"
#include "ebprof/error.hpp"
#include "ebprof/jacobi.hpp"
#include "ebprof/kernels.hpp"
#include "ebprof/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

namespace ebprof {

namespace {

constexpr int kSigmaIterations = 64;
constexpr double kSigmaLow = 1e-12;
constexpr double kSigmaHigh = 1e4;
constexpr double kGradientClip = 4.0;

double clip(double g) {
    return std::clamp(g, -kGradientClip, kGradientClip);
}

struct DirectedEdge {
    std::size_t head;
    std::size_t tail;
    double weight;
};

std::vector<DirectedEdge> directed_edges(const FuzzyGraph& fuzzy) {
    std::vector<DirectedEdge> out;
    out.reserve(fuzzy.edges.size() * 2);
    for (const auto& e : fuzzy.edges) {
        out.push_back({e.i, e.j, e.weight});
        out.push_back({e.j, e.i, e.weight});
    }
    return out;
}

double attractive_coefficient(double dist2, const CurveParams& c) {
    if (dist2 <= 0.0) return 0.0;
    const double pd = std::pow(dist2, c.b);
    return -2.0 * c.a * c.b * std::pow(dist2, c.b - 1.0) / (c.a * pd + 1.0);
}

double repulsive_coefficient(double dist2, const CurveParams& c) {
    if (dist2 <= 0.0) return 0.0;
    return 2.0 * c.b / ((0.001 + dist2) * (c.a * std::pow(dist2, c.b) + 1.0));
}

// Visits the updates one directed edge produces in one epoch. `emit(point, dx, dy)`.
template <typename Positions, typename Emit>
void edge_updates(const DirectedEdge& e, std::size_t edge_index, int epoch, double lr, double wmax,
                  const CurveParams& curve, const EmbedConfig& cfg, std::size_t n, const Positions& pos,
                  Emit&& emit) {
    const auto ep = static_cast<std::uint64_t>(epoch);
    if (to_unit(counter_hash(cfg.seed, ep, edge_index, 0)) >= e.weight / wmax) return;

    {
        const double dx = pos(e.head, 0) - pos(e.tail, 0);
        const double dy = pos(e.head, 1) - pos(e.tail, 1);
        const double gc = attractive_coefficient(dx * dx + dy * dy, curve);
        const double gx = clip(gc * dx) * lr;
        const double gy = clip(gc * dy) * lr;
        emit(e.head, gx, gy);
        emit(e.tail, -gx, -gy);
    }
    for (int s = 0; s < cfg.negative_samples; ++s) {
        const std::size_t other = counter_hash(cfg.seed, ep, edge_index, static_cast<std::uint64_t>(s) + 1) % n;
        if (other == e.head) continue;
        const double dx = pos(e.head, 0) - pos(other, 0);
        const double dy = pos(e.head, 1) - pos(other, 1);
        const double gc = repulsive_coefficient(dx * dx + dy * dy, curve);
        const double gx = gc > 0.0 ? clip(gc * dx) : kGradientClip;
        const double gy = gc > 0.0 ? clip(gc * dy) : kGradientClip;
        emit(e.head, gx * lr, gy * lr);
    }
}

bool all_finite(const Matrix& m) {
    return std::all_of(m.data().begin(), m.data().end(), [](double v) { return std::isfinite(v); });
}

} // namespace

NeighborGraph knn(const Matrix& points, std::size_t k) {
    if (k == 0) throw Error(ErrorCode::ConfigError, "k must be positive");
    if (points.rows() <= k) {
        throw Error(ErrorCode::TooFewPoints, std::to_string(points.rows()) + " points for k = " + std::to_string(k));
    }
    auto nb = kernels::knn(points, k);
    return NeighborGraph{points.rows(), k, std::move(nb.indices), std::move(nb.distances)};
}

double FuzzyGraph::weight(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    const auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{i, j}, [](const FuzzyEdge& e, const auto& key) {
        return std::pair{e.i, e.j} < key;
    });
    if (it != edges.end() && it->i == i && it->j == j) return it->weight;
    return 0.0;
}

double membership_sum(std::span<const double> distances, double rho, double sigma) {
    double s = 0.0;
    for (double d : distances) s += std::exp(-std::max(0.0, d - rho) / sigma);
    return s;
}

FuzzyGraph fuzzy_memberships(const NeighborGraph& graph) {
    const std::size_t n = graph.n;
    const std::size_t k = graph.k;
    FuzzyGraph fuzzy;
    fuzzy.n = n;
    fuzzy.rho.assign(n, 0.0);
    fuzzy.sigma.assign(n, 0.0);
    fuzzy.directed.assign(n * k, 1.0);
    const double target = std::log2(static_cast<double>(k));

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto dist = graph.neighbor_distances(i);
        double rho = 0.0;
        for (double d : dist) {
            if (d > 0.0) {
                rho = d;
                break;
            }
        }
        if (rho == 0.0) continue; // every neighbour coincides with the point: weights stay 1

        double lo = kSigmaLow;
        double hi = kSigmaHigh;
        for (int it = 0; it < kSigmaIterations; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (membership_sum(dist, rho, mid) > target) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        const double sigma = 0.5 * (lo + hi);
        fuzzy.rho[i] = rho;
        fuzzy.sigma[i] = sigma;
        for (std::size_t m = 0; m < k; ++m) {
            fuzzy.directed[i * k + m] = std::exp(-std::max(0.0, dist[m] - rho) / sigma);
        }
    }

    std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        const auto nbrs = graph.neighbors(i);
        for (std::size_t m = 0; m < k; ++m) {
            const std::size_t j = nbrs[m];
            const double a = fuzzy.directed[i * k + m];
            auto& slot = pairs[{std::min(i, j), std::max(i, j)}];
            (i < j ? slot.first : slot.second) = a;
        }
    }
    fuzzy.edges.reserve(pairs.size());
    for (const auto& [key, ab] : pairs) {
        const auto [a, b] = ab;
        const double w = std::min(1.0, a + b - a * b);
        if (w > 0.0) fuzzy.edges.push_back({key.first, key.second, w});
    }
    return fuzzy;
}

CurveParams fit_curve(double min_dist) {
    if (!(min_dist > 0.0)) throw Error(ErrorCode::ConfigError, "min_dist must be positive");
    constexpr int kSamples = 300;
    std::vector<double> xs(kSamples), ys(kSamples);
    for (int m = 0; m < kSamples; ++m) {
        xs[m] = 3.0 * m / (kSamples - 1);
        ys[m] = xs[m] < min_dist ? 1.0 : std::exp(-(xs[m] - min_dist));
    }

    auto cost = [&](double a, double b) {
        double s = 0.0;
        for (int m = 0; m < kSamples; ++m) {
            const double r = 1.0 / (1.0 + a * std::pow(xs[m], 2.0 * b)) - ys[m];
            s += r * r;
        }
        return s;
    };

    // Levenberg-Marquardt on two parameters from (1, 1).
    double a = 1.0, b = 1.0, lambda = 1e-3;
    double current = cost(a, b);
    for (int iter = 0; iter < 500; ++iter) {
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, g0 = 0, g1 = 0;
        for (int m = 0; m < kSamples; ++m) {
            const double x = xs[m];
            const double u = x > 0.0 ? std::pow(x, 2.0 * b) : 0.0;
            const double denom = 1.0 + a * u;
            const double r = 1.0 / denom - ys[m];
            const double da = -u / (denom * denom);
            const double db = x > 0.0 ? -a * u * 2.0 * std::log(x) / (denom * denom) : 0.0;
            jtj00 += da * da;
            jtj01 += da * db;
            jtj11 += db * db;
            g0 += da * r;
            g1 += db * r;
        }
        bool improved = false;
        while (lambda < 1e12) {
            const double m00 = jtj00 * (1.0 + lambda), m11 = jtj11 * (1.0 + lambda);
            const double det = m00 * m11 - jtj01 * jtj01;
            const double step_a = -(m11 * g0 - jtj01 * g1) / det;
            const double step_b = -(m00 * g1 - jtj01 * g0) / det;
            const double trial = cost(a + step_a, b + step_b);
            if (trial < current) {
                a += step_a;
                b += step_b;
                const bool tiny = std::abs(step_a) < 1e-12 * (1.0 + std::abs(a)) &&
                                  std::abs(step_b) < 1e-12 * (1.0 + std::abs(b));
                current = trial;
                lambda = std::max(lambda * 0.1, 1e-12);
                improved = !tiny;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) break;
    }
    return {a, b};
}

void EmbedConfig::validate() const {
    if (n_neighbors < 2) throw Error(ErrorCode::ConfigError, "n_neighbors must be at least 2");
    if (!(min_dist > 0.0)) throw Error(ErrorCode::ConfigError, "min_dist must be positive");
    if (epochs < 1) throw Error(ErrorCode::ConfigError, "epochs must be at least 1");
    if (negative_samples < 0) throw Error(ErrorCode::ConfigError, "negative_samples must be non-negative");
    if (a.has_value() != b.has_value()) throw Error(ErrorCode::ConfigError, "curve parameters a and b go together");
}

CurveParams EmbedConfig::curve() const {
    if (a && b) return {*a, *b};
    return fit_curve(min_dist);
}

Embedding optimize_layout(const FuzzyGraph& fuzzy, const EmbedConfig& cfg, const Matrix& init) {
    if (init.cols() != 2 || init.rows() != fuzzy.n) throw Error(ErrorCode::ShapeError, "init must be N x 2");
    if (!all_finite(init)) throw Error(ErrorCode::OptimizationDiverged, "initial coordinates are not finite");
    if (cfg.epochs > 0 && fuzzy.edges.empty()) throw Error(ErrorCode::TooFewPoints, "fuzzy graph has no edges");

    Embedding out;
    out.coords = init;
    if (cfg.epochs == 0) return out;

    const CurveParams curve = cfg.curve();
    const auto edges = directed_edges(fuzzy);
    double wmax = 0.0;
    for (const auto& e : edges) wmax = std::max(wmax, e.weight);
    const std::size_t n = fuzzy.n;
    Matrix& y = out.coords;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = 1.0 - static_cast<double>(epoch) / cfg.epochs;
        if (cfg.mode == LayoutMode::Sequential) {
            auto pos = [&](std::size_t p, std::size_t d) { return y(p, d); };
            auto emit = [&](std::size_t p, double dx, double dy) {
                y(p, 0) += dx;
                y(p, 1) += dy;
            };
            for (std::size_t e = 0; e < edges.size(); ++e) {
                edge_updates(edges[e], e, epoch, lr, wmax, curve, cfg, n, pos, emit);
            }
        } else {
            // Every thread reads the epoch-start snapshot; per-point deltas are averaged
            // over the updates each point received so hubs do not overshoot.
            const Matrix snapshot = y;
            auto pos = [&](std::size_t p, std::size_t d) { return snapshot(p, d); };
            const int threads = omp_get_max_threads();
            std::vector<Matrix> deltas(static_cast<std::size_t>(threads), Matrix(n, 3));
#pragma omp parallel num_threads(threads)
            {
                Matrix& local = deltas[static_cast<std::size_t>(omp_get_thread_num())];
                auto emit = [&](std::size_t p, double dx, double dy) {
                    local(p, 0) += dx;
                    local(p, 1) += dy;
                    local(p, 2) += 1.0;
                };
#pragma omp for schedule(static)
                for (std::ptrdiff_t e = 0; e < static_cast<std::ptrdiff_t>(edges.size()); ++e) {
                    edge_updates(edges[static_cast<std::size_t>(e)], static_cast<std::size_t>(e), epoch, lr, wmax,
                                 curve, cfg, n, pos, emit);
                }
            }
            for (std::size_t p = 0; p < n; ++p) {
                double dx = 0.0, dy = 0.0, count = 0.0;
                for (const auto& d : deltas) {
                    dx += d(p, 0);
                    dy += d(p, 1);
                    count += d(p, 2);
                }
                if (count > 0.0) {
                    y(p, 0) += dx / count;
                    y(p, 1) += dy / count;
                }
            }
        }
        if (cfg.check_every_epoch && !all_finite(y)) {
            throw Error(ErrorCode::OptimizationDiverged, "non-finite coordinate after epoch " + std::to_string(epoch));
        }
    }
    if (!all_finite(y)) throw Error(ErrorCode::OptimizationDiverged, "non-finite coordinate after optimisation");
    return out;
}

Matrix pca_init(const Matrix& points, double extent) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    Matrix out(n, 2);
    if (n == 0 || d == 0) return out;

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < d; ++c) mean[c] += points(i, c);
    }
    for (double& m : mean) m /= static_cast<double>(n);
    const Matrix cov = kernels::covariance(points, mean);
    const Eigensystem es = eigendecompose(cov);

    for (std::size_t axis = 0; axis < 2 && axis < d; ++axis) {
        const auto v = es.vectors.row(axis);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += (points(i, c) - mean[c]) * v[c];
            out(i, axis) = s;
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        for (std::size_t i = 0; i < n; ++i) {
            out(i, axis) = hi > lo ? -extent + 2.0 * extent * (out(i, axis) - lo) / (hi - lo) : 0.0;
        }
    }
    return out;
}

Embedding embed(const Matrix& points, const EmbedConfig& cfg, std::vector<std::string> ids) {
    cfg.validate();
    const std::size_t n = points.rows();
    if (!ids.empty() && ids.size() != n) throw Error(ErrorCode::ShapeError, "id count differs from point count");
    if (n <= cfg.n_neighbors) {
        throw Error(ErrorCode::TooFewPoints,
                    std::to_string(n) + " points for n_neighbors = " + std::to_string(cfg.n_neighbors));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto rx = points.row(x), ry = points.row(y);
        return std::lexicographical_compare(rx.begin(), rx.end(), ry.begin(), ry.end());
    });
    Matrix canonical(n, points.cols());
    for (std::size_t r = 0; r < n; ++r) {
        const auto src = points.row(order[r]);
        std::copy(src.begin(), src.end(), canonical.row(r).begin());
    }

    const NeighborGraph graph = knn(canonical, cfg.n_neighbors);
    const FuzzyGraph fuzzy = fuzzy_memberships(graph);
    const Embedding layout = optimize_layout(fuzzy, cfg, pca_init(canonical));

    Embedding out;
    out.building_ids = std::move(ids);
    out.coords = Matrix(n, 2);
    for (std::size_t r = 0; r < n; ++r) {
        out.coords(order[r], 0) = layout.coords(r, 0);
        out.coords(order[r], 1) = layout.coords(r, 1);
    }
    return out;
}

void write_embedding_csv(std::ostream& out, const Embedding& emb) {
    out << "building_id,x,y\n";
    for (std::size_t i = 0; i < emb.coords.rows(); ++i) {
        const std::string id = i < emb.building_ids.size() ? emb.building_ids[i] : std::to_string(i);
        out << csv::escape(id) << ',' << csv::format_number(emb.coords(i, 0)) << ','
            << csv::format_number(emb.coords(i, 1)) << '\n';
    }
}

Embedding read_embedding_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyInput, "embedding CSV is empty");
    std::vector<std::array<double, 2>> rows;
    Embedding emb;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 3) throw Error(ErrorCode::SchemaError, "embedding row needs building_id,x,y");
        const auto x = csv::parse_number(f[1]);
        const auto y = csv::parse_number(f[2]);
        if (!x || !y) throw Error(ErrorCode::SchemaError, "non-numeric embedding coordinate");
        emb.building_ids.push_back(f[0]);
        rows.push_back({*x, *y});
    }
    emb.coords = Matrix(rows.size(), 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        emb.coords(i, 0) = rows[i][0];
        emb.coords(i, 1) = rows[i][1];
    }
    return emb;
}

} // namespace ebprof
