#include "sigcausal/path_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sigcausal/error.hpp"

namespace sigcausal {

using nlohmann::json;

void write_sample_jsonl(const PathSample& sample, std::ostream& os) {
    json cmap = json::array();
    for (const auto& b : sample.coord_map().blocks()) cmap.push_back({b.variable, b.start, b.length});
    for (const auto& p : sample.paths()) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < p.values().rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < p.values().cols(); ++c) row.push_back(p.values()(r, c));
            rows.push_back(std::move(row));
        }
        json line = {{"t", p.grid().points()}, {"x", std::move(rows)}, {"coord_map", cmap}};
        if (p.has_time_column()) line["aux_time"] = true;
        if (p.grid().horizon() != p.grid().back()) line["horizon"] = p.grid().horizon();
        os << line.dump() << '\n';
    }
}

PathSample read_sample_jsonl(std::istream& is) {
    std::vector<Path> paths;
    CoordMap cmap;
    bool have_map = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j = json::parse(line);
            auto t = j.at("t").get<std::vector<double>>();
            const auto& x = j.at("x");
            if (x.size() != t.size()) throw UsageError("row count does not match time stamps");
            const std::size_t dim = x.empty() ? 0 : x.front().size();
            Eigen::MatrixXd vals(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(dim));
            for (std::size_t r = 0; r < x.size(); ++r) {
                if (x[r].size() != dim) throw UsageError("ragged value rows");
                for (std::size_t c = 0; c < dim; ++c)
                    vals(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = x[r][c].get<double>();
            }
            std::vector<CoordBlock> blocks;
            for (const auto& b : j.at("coord_map")) blocks.push_back({b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>()});
            CoordMap m(std::move(blocks));
            if (!have_map) {
                cmap = m;
                have_map = true;
            } else if (!(m == cmap)) {
                throw UsageError("coord_map differs from the first path");
            }
            const double horizon = j.contains("horizon") ? j["horizon"].get<double>() : (t.empty() ? 0.0 : t.back());
            const bool aux = j.value("aux_time", false);
            paths.emplace_back(TimeGrid(std::move(t), horizon), std::move(vals), aux);
        } catch (const json::exception& e) {
            throw UsageError("path JSONL line " + std::to_string(lineno) + ": " + e.what());
        } catch (const UsageError& e) {
            throw UsageError("path JSONL line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (paths.empty()) throw UsageError("path JSONL: no paths found");
    return PathSample(std::move(paths), std::move(cmap));
}

void save_sample_jsonl(const PathSample& sample, const std::filesystem::path& file) {
    std::ofstream os(file);
    if (!os) throw IoError("cannot open " + file.string() + " for writing");
    write_sample_jsonl(sample, os);
    if (!os) throw IoError("write failed: " + file.string());
}

PathSample load_sample_jsonl(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw IoError("cannot open " + file.string());
    return read_sample_jsonl(is);
}

namespace {

// Value of a sparse series at time t: linear inside, constant outside.
double interpolate(const std::vector<std::pair<double, double>>& series, double t) {
    if (t <= series.front().first) return series.front().second;
    if (t >= series.back().first) return series.back().second;
    auto it = std::upper_bound(series.begin(), series.end(), t,
                               [](double v, const std::pair<double, double>& p) { return v < p.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (t - lo.first) / (hi.first - lo.first);
    return (1.0 - w) * lo.second + w * hi.second;
}

}  // namespace

PathSample read_sample_csv_long(std::istream& is, double horizon) {
    // path_id -> coord -> sorted (t, value)
    std::map<long long, std::map<int, std::vector<std::pair<double, double>>>> raw;
    int max_coord = -1;
    double max_t = 0.0;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("path_id", 0) == 0) continue;
        }
        std::stringstream ss(line);
        std::string f[4];
        for (auto& s : f)
            if (!std::getline(ss, s, ',')) throw UsageError("CSV line " + std::to_string(lineno) + ": expected 4 fields");
        try {
            const long long pid = std::stoll(f[0]);
            const double t = std::stod(f[1]);
            const int coord = std::stoi(f[2]);
            const double v = std::stod(f[3]);
            if (coord < 0) throw UsageError("negative coord");
            raw[pid][coord].emplace_back(t, v);
            max_coord = std::max(max_coord, coord);
            max_t = std::max(max_t, t);
        } catch (const std::logic_error&) {
            throw UsageError("CSV line " + std::to_string(lineno) + ": malformed number");
        }
    }
    if (raw.empty()) throw UsageError("CSV: no observations");
    const double T = horizon > 0.0 ? horizon : max_t;
    const int dim = max_coord + 1;

    std::vector<Path> paths;
    for (auto& [pid, coords] : raw) {
        std::vector<double> times;
        for (auto& [c, series] : coords) {
            std::sort(series.begin(), series.end());
            for (const auto& obs : series) times.push_back(obs.first);
        }
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        Eigen::MatrixXd vals(static_cast<Eigen::Index>(times.size()), dim);
        for (int c = 0; c < dim; ++c) {
            auto it = coords.find(c);
            if (it == coords.end())
                throw UsageError("CSV: path " + std::to_string(pid) + " has no observations of coord " + std::to_string(c));
            for (std::size_t r = 0; r < times.size(); ++r)
                vals(static_cast<Eigen::Index>(r), c) = interpolate(it->second, times[r]);
        }
        paths.emplace_back(TimeGrid(std::move(times), T), std::move(vals));
    }
    return PathSample(std::move(paths), CoordMap::identity(dim));
}

}  // namespace sigcausal
