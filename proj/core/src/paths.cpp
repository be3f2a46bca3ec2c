#include "sigcausal/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sigcausal/error.hpp"

namespace sigcausal {

TimeGrid::TimeGrid(std::vector<double> points, double horizon) : points_(std::move(points)), horizon_(horizon) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw UsageError("time grid: horizon must be positive");
    if (points_.size() < 2) throw UsageError("time grid: at least 2 points required");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]) || points_[i] < 0.0 || points_[i] > horizon_)
            throw UsageError("time grid: point " + std::to_string(points_[i]) + " outside [0, horizon]");
        if (i > 0 && !(points_[i] > points_[i - 1])) throw UsageError("time grid: points must be strictly increasing");
    }
}

TimeGrid TimeGrid::uniform(std::size_t n, double horizon) {
    if (n < 2) throw UsageError("time grid: at least 2 points required");
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = horizon * static_cast<double>(i) / static_cast<double>(n - 1);
    pts.back() = horizon;
    return TimeGrid(std::move(pts), horizon);
}

CoordMap::CoordMap(std::vector<CoordBlock> blocks) : blocks_(std::move(blocks)) {
    std::sort(blocks_.begin(), blocks_.end(), [](const CoordBlock& x, const CoordBlock& y) { return x.start < y.start; });
    int next = 0;
    for (const auto& b : blocks_) {
        if (b.length < 1) throw UsageError("coord map: block length must be >= 1");
        if (b.start != next) throw UsageError("coord map: column ranges must partition [0, dim)");
        next += b.length;
    }
    std::vector<int> vars = variables();
    std::sort(vars.begin(), vars.end());
    if (std::adjacent_find(vars.begin(), vars.end()) != vars.end())
        throw UsageError("coord map: duplicate variable index");
    dim_ = next;
}

CoordMap CoordMap::identity(int d) {
    std::vector<CoordBlock> blocks;
    for (int k = 0; k < d; ++k) blocks.push_back({k, k, 1});
    return CoordMap(std::move(blocks));
}

bool CoordMap::has_variable(int k) const noexcept {
    return std::any_of(blocks_.begin(), blocks_.end(), [k](const CoordBlock& b) { return b.variable == k; });
}

const CoordBlock& CoordMap::block(int k) const {
    for (const auto& b : blocks_)
        if (b.variable == k) return b;
    throw IndexError("unknown variable index " + std::to_string(k));
}

std::vector<int> CoordMap::variables() const {
    std::vector<int> out;
    for (const auto& b : blocks_) out.push_back(b.variable);
    return out;
}

std::vector<int> CoordMap::columns(std::span<const int> vars) const {
    std::vector<int> sorted(vars.begin(), vars.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> cols;
    for (int k : sorted) {
        const auto& b = block(k);
        for (int c = 0; c < b.length; ++c) cols.push_back(b.start + c);
    }
    return cols;
}

Path::Path(TimeGrid grid, Eigen::MatrixXd values, bool has_time_column)
    : grid_(std::move(grid)), values_(std::move(values)), has_time_column_(has_time_column) {
    if (static_cast<std::size_t>(values_.rows()) != grid_.size())
        throw UsageError("path: one value row per grid point required");
    if (values_.cols() < 1) throw UsageError("path: dim must be >= 1");
}

Eigen::RowVectorXd Path::value_at(double t) const {
    const auto& pts = grid_.points();
    if (t <= pts.front()) return values_.row(0);
    if (t >= pts.back()) return values_.row(values_.rows() - 1);
    auto it = std::upper_bound(pts.begin(), pts.end(), t);
    auto hi = static_cast<Eigen::Index>(it - pts.begin());
    auto lo = hi - 1;
    double w = (t - pts[lo]) / (pts[hi] - pts[lo]);
    return (1.0 - w) * values_.row(lo) + w * values_.row(hi);
}

PathSample::PathSample(std::vector<Path> paths, CoordMap coord_map)
    : paths_(std::move(paths)), coord_map_(std::move(coord_map)) {
    if (paths_.empty()) return;
    const int dim = paths_.front().dim();
    for (const auto& p : paths_) {
        if (p.dim() != dim) throw UsageError("path sample: all paths must have identical dim");
        const int expected = coord_map_.dim() + (p.has_time_column() ? 1 : 0);
        if (p.dim() != expected) throw UsageError("path sample: coord map does not cover path columns");
    }
}

Path restrict_and_rebase(const Path& path, const CoordMap& map, std::span<const int> coords, Interval iv) {
    if (coords.empty()) throw UsageError("restrict_and_rebase: coordinate set must be nonempty");
    if (!(iv.a >= 0.0) || !(iv.b <= path.grid().horizon()) || !(iv.a < iv.b))
        throw DegenerateIntervalError("restrict_and_rebase: interval [" + std::to_string(iv.a) + ", " +
                                      std::to_string(iv.b) + "] not inside the path horizon");
    const std::vector<int> cols = map.columns(coords);

    const auto& pts = path.grid().points();
    const double a = std::max(iv.a, pts.front());
    const double b = std::min(iv.b, pts.back());
    if (!(a < b))
        throw DegenerateIntervalError("restrict_and_rebase: interval has fewer than 2 observations");

    std::vector<double> times;
    times.push_back(a);
    for (double t : pts)
        if (t > a && t < b) times.push_back(t);
    times.push_back(b);

    Eigen::MatrixXd out(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < times.size(); ++r) {
        Eigen::RowVectorXd row = path.value_at(times[r]);
        for (std::size_t c = 0; c < cols.size(); ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row(cols[c]);
    }
    Eigen::RowVectorXd base = out.row(0);
    out.rowwise() -= base;
    return Path(TimeGrid(std::move(times), path.grid().horizon()), std::move(out));
}

Path augment_time(const Path& path) {
    if (path.has_time_column()) throw UsageError("augment_time: path already carries a time column");
    Eigen::MatrixXd out(path.values().rows(), path.values().cols() + 1);
    out.leftCols(path.values().cols()) = path.values();
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, out.cols() - 1) = path.grid()[static_cast<std::size_t>(r)];
    return Path(path.grid(), std::move(out), true);
}

Path apply_missingness(const Path& path, double drop_fraction, Rng& rng) {
    if (!(drop_fraction >= 0.0) || !(drop_fraction < 1.0))
        throw UsageError("apply_missingness: drop fraction must lie in [0, 1)");
    const std::size_t n = path.size();
    const auto n_drop = static_cast<std::size_t>(std::llround(drop_fraction * static_cast<double>(n)));
    if (n_drop == 0) return path;
    if (n_drop > n - 2)
        throw UsageError("apply_missingness: cannot drop " + std::to_string(n_drop) + " of " + std::to_string(n) +
                         " observations while keeping the endpoints");

    // Partial Fisher-Yates over the interior indices.
    std::vector<std::size_t> interior(n - 2);
    std::iota(interior.begin(), interior.end(), std::size_t{1});
    for (std::size_t i = 0; i < n_drop; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, interior.size() - 1);
        std::swap(interior[i], interior[pick(rng)]);
    }
    std::vector<bool> keep(n, true);
    for (std::size_t i = 0; i < n_drop; ++i) keep[interior[i]] = false;

    std::vector<double> times;
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        times.push_back(path.grid()[i]);
        rows.push_back(static_cast<Eigen::Index>(i));
    }
    Eigen::MatrixXd vals(static_cast<Eigen::Index>(rows.size()), path.values().cols());
    for (std::size_t r = 0; r < rows.size(); ++r) vals.row(static_cast<Eigen::Index>(r)) = path.values().row(rows[r]);
    return Path(TimeGrid(std::move(times), path.grid().horizon()), std::move(vals), path.has_time_column());
}

PathSample apply_missingness(const PathSample& sample, double drop_fraction, std::uint64_t seed) {
    std::vector<Path> out;
    out.reserve(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        Rng rng = make_rng(seed, {0x6d697373ULL, i});
        out.push_back(apply_missingness(sample[i], drop_fraction, rng));
    }
    return PathSample(std::move(out), sample.coord_map());
}

PathSample select_variables(const PathSample& sample, std::span<const int> vars) {
    std::vector<CoordBlock> blocks;
    std::vector<int> cols;
    int next = 0;
    for (std::size_t idx = 0; idx < vars.size(); ++idx) {
        const auto& b = sample.coord_map().block(vars[idx]);
        blocks.push_back({static_cast<int>(idx), next, b.length});
        for (int c = 0; c < b.length; ++c) cols.push_back(b.start + c);
        next += b.length;
    }
    std::vector<Path> out;
    out.reserve(sample.size());
    for (const auto& p : sample.paths()) {
        if (p.has_time_column()) throw UsageError("select_variables: strip the time column first");
        Eigen::MatrixXd vals(p.values().rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) vals.col(static_cast<Eigen::Index>(c)) = p.values().col(cols[c]);
        out.emplace_back(p.grid(), std::move(vals));
    }
    return PathSample(std::move(out), CoordMap(std::move(blocks)));
}

}  // namespace sigcausal
