#include "sigcausal/backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "sigcausal/error.hpp"
#include "sigcausal/rng.hpp"

namespace sigcausal {

namespace {

std::uint64_t bits(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    return u;
}

// Per-query seed: the same query always gets the same permutation stream.
std::uint64_t query_seed(std::uint64_t base, const CiQuery& q) {
    std::uint64_t h = derive_seed(base, {static_cast<std::uint64_t>(q.relation), static_cast<std::uint64_t>(q.i),
                                         static_cast<std::uint64_t>(q.j), bits(q.s), bits(q.h)});
    for (int k : q.K) h = derive_seed(h, {static_cast<std::uint64_t>(k)});
    return h;
}

std::string describe(const CiQuery& q) {
    std::string k;
    for (int v : q.K) k += (k.empty() ? "" : ",") + std::to_string(v);
    return relation_name(q.relation) + "(i=" + std::to_string(q.i) + ", j=" + std::to_string(q.j) + ", K={" + k + "})";
}

}  // namespace

std::string relation_name(Relation r) {
    switch (r) {
        case Relation::sym: return "sym";
        case Relation::future: return "future";
        case Relation::self: return "self";
        case Relation::init: return "init";
    }
    return "?";
}

Relation parse_relation(const std::string& name) {
    for (Relation r : {Relation::sym, Relation::future, Relation::self, Relation::init})
        if (relation_name(r) == name) return r;
    throw UsageError("unknown relation '" + name + "' (expected sym, future, self or init)");
}

void CiQuery::validate(int d) const {
    auto in_range = [d](int v) { return v >= 0 && v < d; };
    if (!in_range(i)) throw IndexError("query: variable " + std::to_string(i) + " out of range");
    const bool uses_j = relation != Relation::self;
    if (uses_j) {
        if (!in_range(j)) throw IndexError("query: variable " + std::to_string(j) + " out of range");
        if (i == j) throw UsageError("query: i and j must differ");
    }
    NodeSet sorted(K);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw UsageError("query: duplicate variable in K");
    for (int k : K) {
        if (!in_range(k)) throw IndexError("query: variable " + std::to_string(k) + " out of range");
        if (k == i || (uses_j && k == j)) throw UsageError("query: K must be disjoint from i and j");
    }
    if (relation == Relation::init && !K.empty()) throw UsageError("query: init relation takes no conditioning set");
}

bool CiBackend::ask(const CiQuery& q) {
    q.validate(d());
    if (q.relation == Relation::future || q.relation == Relation::self) {
        if (!(q.s > 0.0) || !(q.h > 0.0) || q.s + q.h > horizon() * (1.0 + 1e-12))
            throw DegenerateIntervalError("query " + describe(q) + ": need 0 < s < s + h <= T");
    }
    Answer a;
    try {
        a = do_answer(q);
    } catch (const NumericError& e) {
        throw NumericError("query " + describe(q) + ": " + e.what());
    } catch (const UsageError& e) {
        throw UsageError("query " + describe(q) + ": " + e.what());
    }
    log_.push_back({q, a.independent, a.p_value});
    return a.independent;
}

// ---------------------------------------------------------------- oracle

OracleBackend::OracleBackend(Dag truth, double horizon)
    : truth_(std::move(truth)), lifted_(lift(truth_)), horizon_(horizon) {}

CiBackend::Answer OracleBackend::do_answer(const CiQuery& q) {
    const int d = truth_.d();
    switch (q.relation) {
        case Relation::sym: {
            const int a[] = {q.i}, b[] = {q.j};
            return {d_separated(truth_, a, b, q.K), std::nullopt};
        }
        case Relation::future: {
            const int a[] = {q.i}, b[] = {d + q.j};
            NodeSet c{q.j};
            for (int k : q.K) {
                c.push_back(k);
                c.push_back(d + k);
            }
            return {d_separated(lifted_.graph(), a, b, c), std::nullopt};
        }
        case Relation::self: {
            const int a[] = {q.i}, b[] = {d + q.i};
            NodeSet c;
            for (int k : q.K) {
                c.push_back(k);
                c.push_back(d + k);
            }
            return {d_separated(lifted_.graph(), a, b, c), std::nullopt};
        }
        case Relation::init: {
            const NodeSet an = ancestors(truth_, q.j);
            return {std::find(an.begin(), an.end(), q.i) == an.end(), std::nullopt};
        }
    }
    throw UsageError("unknown relation");
}

// ---------------------------------------------------------------- statistical

StatisticalBackend::StatisticalBackend(PathSample sample, StatisticalOptions opts)
    : sample_(std::move(sample)), opts_(std::move(opts)) {
    opts_.kernel.validate();
    opts_.test.validate();
    if (sample_.size() < 8) throw UsageError("statistical backend: at least 8 sample paths required");
    const auto vars = sample_.coord_map().variables();
    for (int k = 0; k < static_cast<int>(vars.size()); ++k)
        if (!sample_.coord_map().has_variable(k))
            throw UsageError("statistical backend: variables must be numbered 0..d-1");
    for (const auto& p : sample_.paths())
        if (p.has_time_column()) throw UsageError("statistical backend: strip the auxiliary time column first");
}

double StatisticalBackend::horizon() const { return sample_[0].grid().horizon(); }

const GramMatrix& StatisticalBackend::segment_gram(int k, Interval iv) {
    const auto key = std::make_tuple(k, iv.a, iv.b);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    const int vars[] = {k};
    std::vector<Path> segs;
    segs.reserve(sample_.size());
    for (const auto& p : sample_.paths()) segs.push_back(restrict_and_rebase(p, sample_.coord_map(), vars, iv));

    KernelConfig kc = opts_.kernel;
    if (kc.lifting == Lifting::rbf && opts_.median_heuristic) {
        std::vector<Path> lifted;
        if (kc.add_time) {
            lifted.reserve(segs.size());
            for (const auto& s : segs) lifted.push_back(augment_time(s));
        }
        const double bw = median_bandwidth(kc.add_time ? std::span<const Path>(lifted) : std::span<const Path>(segs));
        if (!(bw > 0.0))
            throw UsageError("median bandwidth is 0 for variable " + std::to_string(k) +
                             " (all observations identical)");
        kc.bandwidth = bw;
    }
    return cache_.emplace(key, gram(std::span<const Path>(segs), kc)).first->second;
}

GramMatrix StatisticalBackend::product_gram(const NodeSet& vars, Interval iv) {
    const auto n = static_cast<Eigen::Index>(sample_.size());
    GramMatrix g{Eigen::MatrixXd::Ones(n, n), true};
    for (int k : vars) g.entries.array() *= segment_gram(k, iv).entries.array();
    return g;
}

const GramMatrix& StatisticalBackend::initial_gram(int k) {
    if (auto it = init_cache_.find(k); it != init_cache_.end()) return it->second;
    const auto& b = sample_.coord_map().block(k);
    const auto n = static_cast<Eigen::Index>(sample_.size());
    Eigen::MatrixXd x0(n, b.length);
    for (Eigen::Index r = 0; r < n; ++r)
        x0.row(r) = sample_[static_cast<std::size_t>(r)].values().row(0).segment(b.start, b.length);

    Eigen::MatrixXd d2(n, n);
    std::vector<double> dists;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            d2(i, j) = (x0.row(i) - x0.row(j)).squaredNorm();
            if (i < j) dists.push_back(std::sqrt(d2(i, j)));
        }
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2), dists.end());
    double bw = dists[dists.size() / 2];
    if (!(bw > 0.0)) bw = 1.0;  // constant initial values: the Gram is all ones
    GramMatrix g{(-d2 / (2.0 * bw * bw)).array().exp().matrix(), true};
    return init_cache_.emplace(k, std::move(g)).first->second;
}

TestResult StatisticalBackend::run(const CiQuery& q) {
    q.validate(d());
    TestConfig tc = opts_.test;
    tc.seed = query_seed(opts_.test.seed, q);
    const double T = horizon();
    const Interval full{0.0, T};
    auto conditional = [&](const GramMatrix& kx, const GramMatrix& ky, const GramMatrix& kz) {
        return opts_.use_kcipt ? kcipt(kx, ky, kz, tc) : sdcit(kx, ky, kz, tc);
    };
    switch (q.relation) {
        case Relation::sym: {
            const GramMatrix& kx = segment_gram(q.i, full);
            const GramMatrix& ky = segment_gram(q.j, full);
            if (q.K.empty()) return hsic_bootstrap(kx, ky, tc);
            return conditional(kx, ky, product_gram(q.K, full));
        }
        case Relation::future: {
            const Interval past{0.0, q.s}, fut{q.s, std::min(q.s + q.h, T)};
            const GramMatrix& kx = segment_gram(q.i, past);
            const GramMatrix& ky = segment_gram(q.j, fut);
            GramMatrix kz = segment_gram(q.j, past);
            kz.entries.array() *= product_gram(q.K, past).entries.array();
            kz.entries.array() *= product_gram(q.K, fut).entries.array();
            return conditional(kx, ky, kz);
        }
        case Relation::self: {
            const Interval past{0.0, q.s}, fut{q.s, std::min(q.s + q.h, T)};
            const GramMatrix& kx = segment_gram(q.i, past);
            const GramMatrix& ky = segment_gram(q.i, fut);
            if (q.K.empty()) return hsic_bootstrap(kx, ky, tc);
            return conditional(kx, ky, product_gram(q.K, {0.0, fut.b}));
        }
        case Relation::init:
            return hsic_bootstrap(initial_gram(q.i), segment_gram(q.j, full), tc);
    }
    throw UsageError("unknown relation");
}

CiBackend::Answer StatisticalBackend::do_answer(const CiQuery& q) {
    const TestResult r = run(q);
    return {!r.reject, r.p_value};
}

}  // namespace sigcausal
