#include "ebprof/report.hpp"

#include "ebprof/csv.hpp"
#include "ebprof/eigen.hpp"
#include "ebprof/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace ebprof {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

const char* colour(std::size_t i) {
    return kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string header(double w, double h, std::string_view title) {
    std::ostringstream os;
    os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << w << R"(" height=")" << h << R"(" viewBox="0 0 )"
       << w << ' ' << h << "\">\n"
       << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n'
       << R"(<text x="10" y="18" font-family="sans-serif" font-size="13">)" << title << "</text>\n";
    return os.str();
}

std::string diverging(double v, double scale) {
    const double t = scale > 0.0 ? std::clamp(v / scale, -1.0, 1.0) : 0.0;
    int r = 255, g = 255, b = 255;
    if (t >= 0) {
        g = b = static_cast<int>(255 * (1.0 - t));
    } else {
        r = g = static_cast<int>(255 * (1.0 + t));
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_table(const fs::path& path) {
    if (!fs::exists(path)) throw Error(ErrorCode::ReportInputMissing, path.string());
    std::istringstream in(csv::read_file(path));
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::ReportInputMissing, path.string() + " is empty");
    t.header = csv::split(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!csv::trim(line).empty()) t.rows.push_back(csv::split(line));
    }
    return t;
}

double to_double(const std::string& s) {
    const auto v = csv::parse_number(s);
    if (!v) throw Error(ErrorCode::SchemaError, "expected a number, got '" + s + "'");
    return *v;
}

std::string grid_csv(const Matrix& grid) {
    std::ostringstream os;
    for (int h = 0; h < kHoursPerDay; ++h) os << (h ? "," : "") << 'h' << (h < 10 ? "0" : "") << h;
    os << '\n';
    for (std::size_t l = 0; l < grid.rows(); ++l) {
        for (std::size_t h = 0; h < grid.cols(); ++h) os << (h ? "," : "") << csv::format_number(grid(l, h));
        os << '\n';
    }
    return os.str();
}

} // namespace

namespace svg {

std::string heatmap(const Matrix& grid, std::string_view title) {
    constexpr double cell = 18.0, left = 40.0, top = 30.0;
    const double w = left + cell * static_cast<double>(grid.cols()) + 10.0;
    const double h = top + cell * static_cast<double>(grid.rows()) + 25.0;
    double scale = 0.0;
    for (double v : grid.data()) scale = std::max(scale, std::abs(v));
    std::ostringstream os;
    os << header(w, h, title);
    for (std::size_t r = 0; r < grid.rows(); ++r) {
        os << R"(<text x="5" y=")" << num(top + cell * (r + 0.7)) << R"(" font-family="sans-serif" font-size="10">L)"
           << r << "</text>\n";
        for (std::size_t c = 0; c < grid.cols(); ++c) {
            os << R"(<rect x=")" << num(left + cell * c) << R"(" y=")" << num(top + cell * r) << R"(" width=")" << cell
               << R"(" height=")" << cell << R"(" fill=")" << diverging(grid(r, c), scale) << R"(" stroke="#ddd"/>)"
               << '\n';
        }
    }
    for (std::size_t c = 0; c < grid.cols(); c += 3) {
        os << R"(<text x=")" << num(left + cell * c + 2) << R"(" y=")" << num(top + cell * grid.rows() + 14)
           << R"(" font-family="sans-serif" font-size="10">)" << c << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string lines(const std::vector<std::vector<double>>& series, const std::vector<std::string>& names,
                  std::string_view title) {
    constexpr double w = 640.0, h = 320.0, left = 50.0, right = 120.0, top = 30.0, bottom = 30.0;
    double lo = 0.0, hi = 0.0;
    std::size_t len = 0;
    bool first = true;
    for (const auto& s : series) {
        len = std::max(len, s.size());
        for (double v : s) {
            lo = first ? v : std::min(lo, v);
            hi = first ? v : std::max(hi, v);
            first = false;
        }
    }
    if (hi <= lo) hi = lo + 1.0;
    const double span_x = len > 1 ? static_cast<double>(len - 1) : 1.0;
    auto px = [&](std::size_t i) { return left + (w - left - right) * static_cast<double>(i) / span_x; };
    auto py = [&](double v) { return top + (h - top - bottom) * (1.0 - (v - lo) / (hi - lo)); };

    std::ostringstream os;
    os << header(w, h, title);
    os << R"(<line x1=")" << left << R"(" y1=")" << h - bottom << R"(" x2=")" << w - right << R"(" y2=")" << h - bottom
       << R"(" stroke="black"/>)" << '\n';
    os << R"(<line x1=")" << left << R"(" y1=")" << top << R"(" x2=")" << left << R"(" y2=")" << h - bottom
       << R"(" stroke="black"/>)" << '\n';
    os << R"(<text x="5" y=")" << num(py(hi) + 4) << R"(" font-family="sans-serif" font-size="10">)" << num(hi)
       << "</text>\n";
    os << R"(<text x="5" y=")" << num(py(lo) + 4) << R"(" font-family="sans-serif" font-size="10">)" << num(lo)
       << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        os << R"(<polyline fill="none" stroke=")" << colour(s) << R"(" stroke-width="1.5" points=")";
        for (std::size_t i = 0; i < series[s].size(); ++i) os << (i ? " " : "") << num(px(i)) << ',' << num(py(series[s][i]));
        os << "\"/>\n";
        if (s < names.size()) {
            os << R"(<text x=")" << num(w - right + 8) << R"(" y=")" << num(top + 14.0 * (s + 1))
               << R"(" font-family="sans-serif" font-size="11" fill=")" << colour(s) << "\">" << names[s] << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string scatter(const Matrix& points, const std::vector<std::size_t>& groups, const Matrix& centroids,
                    std::string_view title) {
    constexpr double w = 520.0, h = 520.0, pad = 30.0;
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool first = true;
    auto extend = [&](double x, double y) {
        if (first) {
            xlo = xhi = x;
            ylo = yhi = y;
            first = false;
        }
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
    };
    for (std::size_t i = 0; i < points.rows(); ++i) extend(points(i, 0), points(i, 1));
    for (std::size_t i = 0; i < centroids.rows(); ++i) extend(centroids(i, 0), centroids(i, 1));
    if (xhi <= xlo) xhi = xlo + 1.0;
    if (yhi <= ylo) yhi = ylo + 1.0;
    auto px = [&](double x) { return pad + (w - 2 * pad) * (x - xlo) / (xhi - xlo); };
    auto py = [&](double y) { return h - pad - (h - 2 * pad) * (y - ylo) / (yhi - ylo); };

    std::ostringstream os;
    os << header(w, h, title);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const std::size_t g = i < groups.size() ? groups[i] : 0;
        os << R"(<circle cx=")" << num(px(points(i, 0))) << R"(" cy=")" << num(py(points(i, 1)))
           << R"(" r="3" fill-opacity="0.7" fill=")" << colour(g) << "\"/>\n";
    }
    for (std::size_t i = 0; i < centroids.rows(); ++i) {
        os << R"(<circle cx=")" << num(px(centroids(i, 0))) << R"(" cy=")" << num(py(centroids(i, 1)))
           << R"(" r="6" fill="black"/>)" << '\n';
    }
    os << "</svg>\n";
    return os.str();
}

std::string strip(const std::vector<std::size_t>& values, const std::vector<std::string>& labels,
                  std::string_view title) {
    constexpr double cell = 20.0, top = 30.0;
    const double w = std::max(200.0, cell * static_cast<double>(values.size()) + 20.0);
    const double h = top + cell + 30.0;
    std::ostringstream os;
    os << header(w, h, title);
    for (std::size_t i = 0; i < values.size(); ++i) {
        os << R"(<rect x=")" << num(10 + cell * i) << R"(" y=")" << top << R"(" width=")" << cell << R"(" height=")"
           << cell << R"(" fill=")" << colour(values[i] == 0 ? 0 : values[i] - 1) << R"(" stroke="white">)";
        if (i < labels.size()) os << "<title>" << labels[i] << ": " << values[i] << "</title>";
        os << "</rect>\n";
        os << R"(<text x=")" << num(10 + cell * i + 6) << R"(" y=")" << num(top + cell - 6)
           << R"(" font-family="sans-serif" font-size="10" fill="white">)" << values[i] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace svg

std::vector<fs::path> report_figures(const fs::path& out_dir, const ReportOptions& options) {
    const fs::path models_dir = out_dir / "models";
    if (!fs::is_directory(models_dir)) throw Error(ErrorCode::ReportInputMissing, models_dir.string());
    const fs::path fig = out_dir / "figures";
    std::vector<fs::path> written;
    auto emit = [&](const fs::path& path, const std::string& contents) {
        csv::write_file(path, contents);
        written.push_back(path);
    };

    std::vector<fs::path> model_files;
    for (const auto& entry : fs::directory_iterator(models_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") model_files.push_back(entry.path());
    }
    std::sort(model_files.begin(), model_files.end());
    if (options.max_buildings > 0 && model_files.size() > options.max_buildings) model_files.resize(options.max_buildings);

    for (const auto& path : model_files) {
        const std::string name = path.stem().string();
        const EigenModel model = eigen_model_from_json(nlohmann::json::parse(csv::read_file(path)));
        const fs::path dir = fig / "buildings" / name;

        std::ostringstream ev;
        ev << "component,fraction,cumulative\n";
        std::vector<double> cumulative;
        double run = 0.0;
        for (std::size_t j = 0; j < model.explained.size(); ++j) {
            run += model.explained[j];
            const double c = j + 1 == model.explained.size() ? 1.0 : std::min(1.0, run);
            cumulative.push_back(c);
            ev << j + 1 << ',' << csv::format_number(model.explained[j]) << ',' << csv::format_number(c) << '\n';
        }
        emit(dir / "explained_variance.csv", ev.str());
        emit(dir / "explained_variance.svg",
             svg::lines({cumulative, model.explained}, {"cumulative", "fraction"}, model.building_id + " explained variance"));

        const std::size_t top = std::min(options.top_k, model.eigenvectors.rows());
        for (std::size_t j = 0; j < top; ++j) {
            const Matrix grid = reshape_behavior(model.eigenvectors.row(j), model.levels);
            const std::string stem = "eigenbehavior_" + std::to_string(j + 1);
            emit(dir / (stem + ".csv"), grid_csv(grid));
            emit(dir / (stem + ".svg"), svg::heatmap(grid, model.building_id + " eigenbehavior " + std::to_string(j + 1)));
        }

        const CsvTable days = read_table(out_dir / "days" / (name + ".csv"));
        std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> months;
        for (const auto& row : days.rows) {
            if (row.size() < 2) throw Error(ErrorCode::SchemaError, "malformed day classification row");
            months[row[0].substr(0, 7)].emplace_back(row[0], static_cast<std::size_t>(to_double(row[1])));
        }
        for (const auto& [month, entries] : months) {
            std::ostringstream os;
            os << "date,assigned\n";
            std::vector<std::size_t> values;
            std::vector<std::string> labels;
            for (const auto& [date, assigned] : entries) {
                os << date << ',' << assigned << '\n';
                values.push_back(assigned);
                labels.push_back(date);
            }
            emit(dir / ("days_" + month + ".csv"), os.str());
            emit(dir / ("days_" + month + ".svg"), svg::strip(values, labels, model.building_id + " " + month));
        }
    }

    // Cohort figures.
    const CsvTable embedding = read_table(out_dir / "embedding.csv");
    const CsvTable clusters = read_table(out_dir / "clusters.csv");
    const CsvTable centroids = read_table(out_dir / "centroids.csv");
    const CsvTable profiles = read_table(out_dir / "profiles.csv");

    std::map<std::string, std::string> profile_of;
    for (const auto& row : clusters.rows) profile_of[row.at(0)] = row.at(1);
    std::vector<std::string> profile_names;
    for (const auto& row : profiles.rows) profile_names.push_back(row.at(0));
    auto profile_index = [&](const std::string& p) {
        return static_cast<std::size_t>(std::find(profile_names.begin(), profile_names.end(), p) - profile_names.begin());
    };

    Matrix points(embedding.rows.size(), 2);
    std::vector<std::size_t> groups;
    std::ostringstream sc;
    sc << "kind,id,x,y,profile\n";
    std::map<std::string, std::pair<std::array<double, 2>, std::size_t>> member_sums;
    for (std::size_t i = 0; i < embedding.rows.size(); ++i) {
        const auto& row = embedding.rows[i];
        points(i, 0) = to_double(row.at(1));
        points(i, 1) = to_double(row.at(2));
        const std::string p = profile_of.count(row[0]) ? profile_of[row[0]] : "";
        groups.push_back(profile_index(p));
        auto& acc = member_sums[p];
        acc.first[0] += points(i, 0);
        acc.first[1] += points(i, 1);
        ++acc.second;
        sc << "building," << csv::escape(row[0]) << ',' << row[1] << ',' << row[2] << ',' << p << '\n';
    }
    // Centroids in the 2-D plane: k-means centroids when clustering ran there, member means otherwise.
    const bool planar = centroids.header.size() == 3 && centroids.header[1] == "x";
    Matrix cpoints(centroids.rows.size(), 2);
    for (std::size_t i = 0; i < centroids.rows.size(); ++i) {
        const auto& row = centroids.rows[i];
        if (planar) {
            cpoints(i, 0) = to_double(row.at(1));
            cpoints(i, 1) = to_double(row.at(2));
        } else if (const auto& acc = member_sums[row.at(0)]; acc.second > 0) {
            cpoints(i, 0) = acc.first[0] / static_cast<double>(acc.second);
            cpoints(i, 1) = acc.first[1] / static_cast<double>(acc.second);
        }
        sc << "centroid," << row.at(0) << ',' << csv::format_number(cpoints(i, 0)) << ','
           << csv::format_number(cpoints(i, 1)) << ',' << row.at(0) << '\n';
    }
    emit(fig / "embedding_scatter.csv", sc.str());
    emit(fig / "embedding_scatter.svg", svg::scatter(points, groups, cpoints, "primary eigenbehaviors, 2-D embedding"));

    std::ostringstream pm;
    pm << "profile,level,hour,weight\n";
    std::vector<std::vector<double>> curves;
    std::vector<std::string> curve_names;
    for (const auto& row : profiles.rows) {
        std::vector<double> median;
        for (std::size_t c = 2; c < row.size(); ++c) median.push_back(to_double(row[c]));
        const Matrix grid = reshape_behavior(median, options.levels);
        for (std::size_t l = 0; l < grid.rows(); ++l) {
            std::vector<double> curve;
            for (int h = 0; h < kHoursPerDay; ++h) {
                pm << row[0] << ',' << l << ',' << h << ',' << csv::format_number(grid(l, h)) << '\n';
                curve.push_back(grid(l, h));
            }
            curves.push_back(std::move(curve));
            curve_names.push_back(row[0] + " L" + std::to_string(l));
        }
    }
    emit(fig / "profile_medians.csv", pm.str());
    emit(fig / "profile_medians.svg", svg::lines(curves, curve_names, "profile median eigenbehaviors by hour"));
    return written;
}

} // namespace ebprof
