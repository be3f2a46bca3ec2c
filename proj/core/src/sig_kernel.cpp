#include "sigcausal/sig_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sigcausal/error.hpp"
#include "sigcausal/parallel.hpp"
#include "sigcausal/rng.hpp"

namespace sigcausal {

namespace {

constexpr std::size_t kMaxMedianPairs = 1'000'000;
constexpr std::uint64_t kMedianSeed = 0x6d656469616eULL;
constexpr std::size_t kMaxSignatureEntries = std::size_t{1} << 27;

// Lifted representation: the value rows the static kernel sees.
Eigen::MatrixXd lifted_points(const Path& p, const KernelConfig& cfg) {
    if (p.size() < 2) throw UsageError("signature kernel: path needs at least 2 observations");
    if (cfg.add_time && !p.has_time_column()) return augment_time(p).values();
    return p.values();
}

// Inserts 2^r - 1 equally spaced points into every segment.
Eigen::MatrixXd refine(const Eigen::MatrixXd& pts, int r) {
    if (r == 0) return pts;
    const Eigen::Index R = Eigen::Index{1} << r;
    const Eigen::Index n = pts.rows();
    Eigen::MatrixXd out((n - 1) * R + 1, pts.cols());
    for (Eigen::Index a = 0; a + 1 < n; ++a)
        for (Eigen::Index q = 0; q < R; ++q) {
            const double w = static_cast<double>(q) / static_cast<double>(R);
            out.row(a * R + q) = (1.0 - w) * pts.row(a) + w * pts.row(a + 1);
        }
    out.row(out.rows() - 1) = pts.row(n - 1);
    return out;
}

Eigen::MatrixXd increments(const Eigen::MatrixXd& pts) {
    return pts.bottomRows(pts.rows() - 1) - pts.topRows(pts.rows() - 1);
}

Eigen::MatrixXd rbf_matrix(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double sigma) {
    const Eigen::VectorXd nx = x.rowwise().squaredNorm();
    const Eigen::VectorXd ny = y.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = -2.0 * x * y.transpose();
    d2.colwise() += nx;
    d2.rowwise() += ny.transpose();
    const double scale = -1.0 / (2.0 * sigma * sigma);
    return (d2.cwiseMax(0.0) * scale).array().exp().matrix();
}

// Explicit second-order scheme over a rows x cols grid of cell increments.
// inc(a, b) is the driving increment of cell (a, b).
template <class Inc>
double solve_goursat(Eigen::Index rows, Eigen::Index cols, Inc&& inc) {
    std::vector<double> prev(static_cast<std::size_t>(cols + 1), 1.0);
    std::vector<double> cur(static_cast<std::size_t>(cols + 1), 1.0);
    for (Eigen::Index a = 0; a < rows; ++a) {
        cur[0] = 1.0;
        for (Eigen::Index b = 0; b < cols; ++b) {
            const double c = inc(a, b);
            const double c2 = c * c / 12.0;
            const auto ub = static_cast<std::size_t>(b);
            cur[ub + 1] = (cur[ub] + prev[ub + 1]) * (1.0 + 0.5 * c + c2) - prev[ub] * (1.0 - c2);
        }
        if (!std::isfinite(cur.back()))
            throw NumericError("signature kernel PDE: non-finite value in grid row " + std::to_string(a + 1) + " of " +
                               std::to_string(rows) + " (" + std::to_string(cols) + " columns)");
        std::swap(prev, cur);
    }
    return prev.back();
}

// Preprocessed path: lifted points and, for euclidean lifting, increments.
struct Prepared {
    Eigen::MatrixXd points;
    Eigen::MatrixXd incs;
};

Prepared prepare(const Path& p, const KernelConfig& cfg) {
    Prepared out;
    if (cfg.lifting == Lifting::euclidean) {
        out.incs = increments(lifted_points(p, cfg));
    } else {
        out.points = refine(lifted_points(p, cfg), cfg.refinement);
    }
    return out;
}

double solve_prepared(const Prepared& x, const Prepared& y, const KernelConfig& cfg) {
    if (cfg.lifting == Lifting::euclidean) {
        if (x.incs.cols() != y.incs.cols())
            throw UsageError("signature kernel: lifted dims differ (" + std::to_string(x.incs.cols()) + " vs " +
                             std::to_string(y.incs.cols()) + ")");
        const int r = cfg.refinement;
        const double scale = std::ldexp(1.0, -2 * r);
        const Eigen::MatrixXd m = (x.incs * y.incs.transpose()) * scale;
        return solve_goursat(m.rows() << r, m.cols() << r,
                             [&](Eigen::Index a, Eigen::Index b) { return m(a >> r, b >> r); });
    }
    if (x.points.cols() != y.points.cols())
        throw UsageError("signature kernel: lifted dims differ (" + std::to_string(x.points.cols()) + " vs " +
                         std::to_string(y.points.cols()) + ")");
    const Eigen::MatrixXd k = rbf_matrix(x.points, y.points, cfg.bandwidth);
    return solve_goursat(k.rows() - 1, k.cols() - 1, [&](Eigen::Index a, Eigen::Index b) {
        return k(a + 1, b + 1) - k(a + 1, b) - k(a, b + 1) + k(a, b);
    });
}

std::vector<Prepared> prepare_all(std::span<const Path> ps, const KernelConfig& cfg) {
    std::vector<Prepared> out(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) out[i] = prepare(ps[i], cfg);
    return out;
}

template <class Fn>
double with_context(std::size_t row, std::size_t col, Fn&& fn) {
    try {
        return fn();
    } catch (const NumericError& e) {
        throw NumericError("gram entry (" + std::to_string(row) + ", " + std::to_string(col) + "): " + e.what());
    } catch (const UsageError& e) {
        throw UsageError("gram entry (" + std::to_string(row) + ", " + std::to_string(col) + "): " + e.what());
    }
}

void debug_check_psd(const GramMatrix& g) {
#ifndef NDEBUG
    const Eigen::MatrixXd j = g.entries + 1e-8 * Eigen::MatrixXd::Identity(g.rows(), g.cols());
    if (Eigen::LLT<Eigen::MatrixXd>(j).info() != Eigen::Success)
        throw NumericError("gram: symmetric Gram is not positive semi-definite after jitter");
#else
    (void)g;
#endif
}

}  // namespace

void KernelConfig::validate() const {
    if (lifting == Lifting::rbf && !(bandwidth > 0.0 && std::isfinite(bandwidth)))
        throw UsageError("kernel config: rbf bandwidth must be positive");
    if (refinement < 0 || refinement > kMaxRefinement)
        throw UsageError("kernel config: refinement must lie in [0, " + std::to_string(kMaxRefinement) + "]");
}

double median_bandwidth(std::span<const Path> paths) {
    if (paths.empty()) throw UsageError("median_bandwidth: empty sample");
    std::vector<const double*> rows;
    std::vector<Eigen::RowVectorXd> store;
    std::size_t total = 0;
    const Eigen::Index dim = paths.front().values().cols();
    for (const auto& p : paths) {
        if (p.values().cols() != dim) throw UsageError("median_bandwidth: paths differ in dim");
        total += p.size();
    }
    Eigen::MatrixXd obs(static_cast<Eigen::Index>(total), dim);
    Eigen::Index r = 0;
    for (const auto& p : paths) {
        obs.middleRows(r, p.values().rows()) = p.values();
        r += p.values().rows();
    }
    const auto n = static_cast<std::size_t>(obs.rows());
    if (n < 2) return 0.0;

    std::vector<double> dists;
    const std::size_t n_pairs = n * (n - 1) / 2;
    if (n_pairs <= kMaxMedianPairs) {
        dists.reserve(n_pairs);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                dists.push_back((obs.row(static_cast<Eigen::Index>(i)) - obs.row(static_cast<Eigen::Index>(j))).norm());
    } else {
        Rng rng(kMedianSeed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        dists.reserve(kMaxMedianPairs);
        while (dists.size() < kMaxMedianPairs) {
            const std::size_t i = pick(rng), j = pick(rng);
            if (i == j) continue;
            dists.push_back((obs.row(static_cast<Eigen::Index>(i)) - obs.row(static_cast<Eigen::Index>(j))).norm());
        }
    }
    const std::size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
    const double upper = dists[mid];
    if (dists.size() % 2 == 1) return upper;
    const double lower = *std::max_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double median_bandwidth(const PathSample& sample) { return median_bandwidth(std::span<const Path>(sample.paths())); }

double sig_kernel_pde(const Path& x, const Path& y, const KernelConfig& cfg) {
    cfg.validate();
    return solve_prepared(prepare(x, cfg), prepare(y, cfg), cfg);
}

GramMatrix gram(std::span<const Path> a, std::span<const Path> b, const KernelConfig& cfg) {
    cfg.validate();
    const auto pa = prepare_all(a, cfg);
    const auto pb = prepare_all(b, cfg);
    GramMatrix g{Eigen::MatrixXd(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size())), false};
    const std::size_t m = b.size();
    parallel_for(a.size() * m, [&](std::size_t idx) {
        const std::size_t i = idx / m, j = idx % m;
        g.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            with_context(i, j, [&] { return solve_prepared(pa[i], pb[j], cfg); });
    });
    return g;
}

GramMatrix gram(std::span<const Path> a, const KernelConfig& cfg) {
    cfg.validate();
    const auto pa = prepare_all(a, cfg);
    const std::size_t n = a.size();
    GramMatrix g{Eigen::MatrixXd(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), true};
    // Upper-triangle pairs in row-major order.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
    parallel_for(pairs.size(), [&](std::size_t idx) {
        const auto [i, j] = pairs[idx];
        const double v = with_context(i, j, [&] { return solve_prepared(pa[i], pa[j], cfg); });
        g.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        g.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    });
    debug_check_psd(g);
    return g;
}

// ---------------------------------------------------------------- truncated signatures

namespace {

void check_signature_size(int dim, int depth) {
    if (depth < 1) throw UsageError("truncated_signature: depth must be >= 1");
    double total = 0.0;
    for (int n = 0; n <= depth; ++n) total += std::pow(static_cast<double>(dim), n);
    if (total * static_cast<double>(depth) > static_cast<double>(kMaxSignatureEntries))
        throw UsageError("truncated_signature: dim^depth too large (dim " + std::to_string(dim) + ", depth " +
                         std::to_string(depth) + ")");
}

// Tensor exponential of one increment.
TruncatedSignature segment_signature(const Eigen::RowVectorXd& delta, int depth) {
    const int dim = static_cast<int>(delta.size());
    TruncatedSignature s{dim, {}};
    s.levels.resize(static_cast<std::size_t>(depth + 1));
    s.levels[0] = {1.0};
    for (int n = 1; n <= depth; ++n) {
        const auto& lower = s.levels[static_cast<std::size_t>(n - 1)];
        auto& level = s.levels[static_cast<std::size_t>(n)];
        level.resize(lower.size() * static_cast<std::size_t>(dim));
        for (std::size_t i = 0; i < lower.size(); ++i)
            for (int k = 0; k < dim; ++k)
                level[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)] = lower[i] * delta(k) / n;
    }
    return s;
}

}  // namespace

TruncatedSignature chen_product(const TruncatedSignature& a, const TruncatedSignature& b) {
    if (a.dim != b.dim) throw UsageError("chen_product: dims differ");
    const int depth = std::min(a.depth(), b.depth());
    TruncatedSignature out{a.dim, {}};
    out.levels.resize(static_cast<std::size_t>(depth + 1));
    for (int n = 0; n <= depth; ++n) {
        auto& level = out.levels[static_cast<std::size_t>(n)];
        level.assign(a.levels[static_cast<std::size_t>(n)].size(), 0.0);
        for (int k = 0; k <= n; ++k) {
            const auto& left = a.levels[static_cast<std::size_t>(k)];
            const auto& right = b.levels[static_cast<std::size_t>(n - k)];
            for (std::size_t i = 0; i < left.size(); ++i) {
                if (left[i] == 0.0) continue;
                double* dst = level.data() + i * right.size();
                for (std::size_t j = 0; j < right.size(); ++j) dst[j] += left[i] * right[j];
            }
        }
    }
    return out;
}

TruncatedSignature truncated_signature(const Eigen::MatrixXd& points, int depth) {
    if (points.rows() < 1) throw UsageError("truncated_signature: empty path");
    const int dim = static_cast<int>(points.cols());
    check_signature_size(dim, depth);
    TruncatedSignature s = segment_signature(Eigen::RowVectorXd::Zero(dim), depth);
    for (Eigen::Index r = 1; r < points.rows(); ++r)
        s = chen_product(s, segment_signature(points.row(r) - points.row(r - 1), depth));
    return s;
}

TruncatedSignature truncated_signature(const Path& x, int depth) { return truncated_signature(x.values(), depth); }

double signature_inner(const TruncatedSignature& a, const TruncatedSignature& b) {
    if (a.dim != b.dim) throw UsageError("signature_inner: dims differ");
    const int depth = std::min(a.depth(), b.depth());
    double acc = 0.0;
    for (int n = 0; n <= depth; ++n) {
        const auto& u = a.levels[static_cast<std::size_t>(n)];
        const auto& v = b.levels[static_cast<std::size_t>(n)];
        for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    }
    return acc;
}

double truncated_sig_kernel_oracle(const Path& x, const Path& y, int depth, const KernelConfig& cfg, int rff_features,
                                   std::uint64_t rff_seed) {
    cfg.validate();
    Eigen::MatrixXd px = lifted_points(x, cfg);
    Eigen::MatrixXd py = lifted_points(y, cfg);
    if (px.cols() != py.cols()) throw UsageError("truncated_sig_kernel_oracle: lifted dims differ");
    if (cfg.lifting == Lifting::rbf) {
        if (rff_features < 1) throw UsageError("truncated_sig_kernel_oracle: rff_features must be >= 1");
        // Piecewise-linear in feature space between refined points, matching the PDE discretization.
        px = refine(px, cfg.refinement);
        py = refine(py, cfg.refinement);
        Rng rng(rff_seed);
        std::normal_distribution<double> normal(0.0, 1.0 / cfg.bandwidth);
        Eigen::MatrixXd w(px.cols(), rff_features);
        Eigen::RowVectorXd phase(rff_features);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
        for (int k = 0; k < rff_features; ++k) phase(k) = uniform(rng, 0.0, 2.0 * 3.14159265358979323846);
        const double amp = std::sqrt(2.0 / rff_features);
        auto features = [&](const Eigen::MatrixXd& p) {
            Eigen::MatrixXd z = p * w;
            z.rowwise() += phase;
            return Eigen::MatrixXd(amp * z.array().cos().matrix());
        };
        px = features(px);
        py = features(py);
    }
    return signature_inner(truncated_signature(px, depth), truncated_signature(py, depth));
}

}  // namespace sigcausal
