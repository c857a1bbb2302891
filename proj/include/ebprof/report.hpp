#ifndef EBPROF_REPORT_HPP
#define EBPROF_REPORT_HPP

#include "ebprof/behavior.hpp"
#include "ebprof/matrix.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ebprof {

struct ReportOptions {
    std::size_t top_k = 3;
    int levels = kDefaultLevels;
    /// Per-building figures for at most this many buildings; 0 means all.
    std::size_t max_buildings = 0;
};

/// Figure data under `<out>/figures` from a completed run:
///   buildings/<name>/explained_variance.csv|svg   component,fraction,cumulative
///   buildings/<name>/eigenbehavior_<j>.csv|svg    levels x 24 grid
///   buildings/<name>/days_<YYYY-MM>.csv|svg       date,assigned
///   embedding_scatter.csv|svg                     kind,id,x,y,profile
///   profile_medians.csv|svg                       profile,level,hour,weight
/// Throws ReportInputMissing when an upstream artifact is absent. Returns written paths.
std::vector<std::filesystem::path> report_figures(const std::filesystem::path& out_dir, const ReportOptions& options = {});

namespace svg {

/// Diverging heatmap of a grid (rows drawn top to bottom).
std::string heatmap(const Matrix& grid, std::string_view title);

/// One polyline per series over a shared x axis.
std::string lines(const std::vector<std::vector<double>>& series, const std::vector<std::string>& names,
                  std::string_view title);

/// Points coloured by group, optional centroids drawn as black dots.
std::string scatter(const Matrix& points, const std::vector<std::size_t>& groups, const Matrix& centroids,
                    std::string_view title);

/// One cell per entry, coloured by category (1-based values).
std::string strip(const std::vector<std::size_t>& values, const std::vector<std::string>& labels,
                  std::string_view title);

} // namespace svg

} // namespace ebprof

#endif
