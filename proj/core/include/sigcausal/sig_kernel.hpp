#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sigcausal/paths.hpp"

namespace sigcausal {

enum class Lifting { euclidean, rbf };

struct KernelConfig {
    Lifting lifting = Lifting::euclidean;
    double bandwidth = 1.0;  // rbf only
    int refinement = 2;      // dyadic refinement order of the PDE grid
    bool add_time = false;   // append the time stamps before lifting

    static constexpr int kMaxRefinement = 6;
    void validate() const;
};

struct GramMatrix {
    Eigen::MatrixXd entries;
    bool symmetric = false;

    Eigen::Index rows() const noexcept { return entries.rows(); }
    Eigen::Index cols() const noexcept { return entries.cols(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return entries(i, j); }
};

/// Median of pairwise Euclidean distances between all observations (any
/// path, any time point) of the given paths. Pairs of one observation with
/// itself are excluded. Above 1e6 pairs a fixed-seed random subset is used.
/// Returns 0 when all observations coincide.
double median_bandwidth(std::span<const Path> paths);
double median_bandwidth(const PathSample& sample);

/// Signature kernel of two paths as the terminal value of the Goursat PDE
/// on the (refined) product of their native grids.
double sig_kernel_pde(const Path& x, const Path& y, const KernelConfig& cfg);

GramMatrix gram(std::span<const Path> a, std::span<const Path> b, const KernelConfig& cfg);
/// Symmetric Gram of `a` with itself; only the upper triangle is solved.
GramMatrix gram(std::span<const Path> a, const KernelConfig& cfg);

/// Levels 0..depth; level n is a dense tensor of dim^n entries (row-major).
struct TruncatedSignature {
    int dim = 0;
    std::vector<std::vector<double>> levels;

    int depth() const noexcept { return static_cast<int>(levels.size()) - 1; }
};

/// Exact signature of the piecewise-linear interpolant, via Chen's identity.
TruncatedSignature truncated_signature(const Path& x, int depth);
TruncatedSignature truncated_signature(const Eigen::MatrixXd& points, int depth);

/// Tensor (Chen) product truncated at the common depth.
TruncatedSignature chen_product(const TruncatedSignature& a, const TruncatedSignature& b);

/// Sum of levelwise inner products.
double signature_inner(const TruncatedSignature& a, const TruncatedSignature& b);

/// Inner product of truncated signatures. Under rbf lifting both paths are
/// first mapped through `rff_features` random Fourier features of the static
/// kernel (an approximation, for testing only).
double truncated_sig_kernel_oracle(const Path& x, const Path& y, int depth, const KernelConfig& cfg,
                                   int rff_features = 4, std::uint64_t rff_seed = 0);

}  // namespace sigcausal
