#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sigcausal/rng.hpp"

namespace sigcausal {

/// Strictly increasing observation times inside [0, horizon].
class TimeGrid {
public:
    TimeGrid(std::vector<double> points, double horizon);

    /// `n` equally spaced points covering [0, horizon].
    static TimeGrid uniform(std::size_t n, double horizon);

    const std::vector<double>& points() const noexcept { return points_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return points_.size(); }
    double front() const noexcept { return points_.front(); }
    double back() const noexcept { return points_.back(); }
    double operator[](std::size_t i) const noexcept { return points_[i]; }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    std::vector<double> points_;
    double horizon_;
};

struct CoordBlock {
    int variable;
    int start;
    int length;

    friend bool operator==(const CoordBlock&, const CoordBlock&) = default;
};

/// Assigns each variable k a contiguous column range of width n_k.
/// The blocks must partition [0, dim).
class CoordMap {
public:
    CoordMap() = default;
    explicit CoordMap(std::vector<CoordBlock> blocks);

    /// One scalar column per variable, variable k at column k.
    static CoordMap identity(int d);

    const std::vector<CoordBlock>& blocks() const noexcept { return blocks_; }
    int dim() const noexcept { return dim_; }
    int num_variables() const noexcept { return static_cast<int>(blocks_.size()); }
    bool has_variable(int k) const noexcept;
    const CoordBlock& block(int k) const;
    std::vector<int> variables() const;

    /// Column indices of the given variables, in ascending variable order.
    std::vector<int> columns(std::span<const int> vars) const;

    friend bool operator==(const CoordMap&, const CoordMap&) = default;

private:
    std::vector<CoordBlock> blocks_;
    int dim_ = 0;
};

/// One sampled path: a value row per grid point. An optional trailing
/// auxiliary column holds the time stamps (see augment_time).
class Path {
public:
    Path(TimeGrid grid, Eigen::MatrixXd values, bool has_time_column = false);

    const TimeGrid& grid() const noexcept { return grid_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    int dim() const noexcept { return static_cast<int>(values_.cols()); }
    std::size_t size() const noexcept { return grid_.size(); }
    bool has_time_column() const noexcept { return has_time_column_; }

    /// Linear interpolation of the value row at time t (clamped to the grid).
    Eigen::RowVectorXd value_at(double t) const;

private:
    TimeGrid grid_;
    Eigen::MatrixXd values_;
    bool has_time_column_;
};

/// i.i.d. path realizations sharing one coordinate map; grids may differ per path.
class PathSample {
public:
    PathSample(std::vector<Path> paths, CoordMap coord_map);

    const std::vector<Path>& paths() const noexcept { return paths_; }
    const CoordMap& coord_map() const noexcept { return coord_map_; }
    std::size_t size() const noexcept { return paths_.size(); }
    const Path& operator[](std::size_t i) const noexcept { return paths_[i]; }

private:
    std::vector<Path> paths_;
    CoordMap coord_map_;
};

struct Interval {
    double a;
    double b;
};

/// Selects the columns of `coords` on [a, b] and subtracts the value at a.
/// Endpoints that are not grid points are inserted by linear interpolation;
/// the interval is clipped to the observed range of the path first.
Path restrict_and_rebase(const Path& path, const CoordMap& map, std::span<const int> coords, Interval iv);

/// Appends the time stamps as an auxiliary last column.
Path augment_time(const Path& path);

/// Drops round(drop_fraction * size) interior observations uniformly at random.
/// First and last observation are always kept.
Path apply_missingness(const Path& path, double drop_fraction, Rng& rng);

/// Per-path missingness with substreams derived from `seed`.
PathSample apply_missingness(const PathSample& sample, double drop_fraction, std::uint64_t seed);

/// Keeps only the listed variables (renumbered 0..k-1 in the given order).
PathSample select_variables(const PathSample& sample, std::span<const int> vars);

}  // namespace sigcausal
