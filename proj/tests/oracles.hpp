#pragma once

// Brute-force reference implementations used to check the library. They are
// deliberately naive (path enumeration, exhaustive search) and share no code
// with the implementations under test.

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include <sigcausal/graph.hpp>

namespace oracle {

using sigcausal::Digraph;
using sigcausal::MixedGraph;

inline bool edge(const Digraph& g, int i, int j) { return i != j && g.has_edge(i, j); }
inline bool linked(const Digraph& g, int i, int j) { return edge(g, i, j) || edge(g, j, i); }

inline std::vector<std::vector<int>> descendants_table(const Digraph& g) {
    const int d = g.d();
    std::vector<std::vector<int>> desc(static_cast<std::size_t>(d));
    for (int v = 0; v < d; ++v) {
        std::vector<char> seen(static_cast<std::size_t>(d), 0);
        std::vector<int> stack{v};
        seen[static_cast<std::size_t>(v)] = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            desc[static_cast<std::size_t>(v)].push_back(u);
            for (int w = 0; w < d; ++w)
                if (edge(g, u, w) && !seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    stack.push_back(w);
                }
        }
    }
    return desc;
}

inline bool is_ancestor(const Digraph& g, int a, int b) {
    const auto desc = descendants_table(g);
    const auto& db = desc[static_cast<std::size_t>(a)];
    return std::find(db.begin(), db.end(), b) != db.end();
}

/// Calls fn(path) for every simple path (vertex list) in the skeleton from a to b.
inline void for_each_simple_path(const Digraph& g, int a, int b, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> path{a};
    std::vector<char> on(static_cast<std::size_t>(g.d()), 0);
    on[static_cast<std::size_t>(a)] = 1;
    std::function<void(int)> rec = [&](int u) {
        if (u == b) {
            fn(path);
            return;
        }
        for (int w = 0; w < g.d(); ++w) {
            if (on[static_cast<std::size_t>(w)] || !linked(g, u, w)) continue;
            on[static_cast<std::size_t>(w)] = 1;
            path.push_back(w);
            rec(w);
            path.pop_back();
            on[static_cast<std::size_t>(w)] = 0;
        }
    };
    rec(a);
}

inline bool collider_at(const Digraph& g, const std::vector<int>& p, std::size_t k) {
    return edge(g, p[k - 1], p[k]) && edge(g, p[k + 1], p[k]);
}

/// d-separation by enumerating every simple path and checking activity.
inline bool d_separated(const Digraph& g, const std::vector<int>& A, const std::vector<int>& B, const std::vector<int>& C) {
    const auto desc = descendants_table(g);
    auto in_c = [&](int v) { return std::find(C.begin(), C.end(), v) != C.end(); };
    bool separated = true;
    for (int a : A)
        for (int b : B)
            for_each_simple_path(g, a, b, [&](const std::vector<int>& p) {
                if (!separated) return;
                for (std::size_t k = 1; k + 1 < p.size(); ++k) {
                    if (collider_at(g, p, k)) {
                        const auto& dk = desc[static_cast<std::size_t>(p[k])];
                        if (std::none_of(dk.begin(), dk.end(), in_c)) return;
                    } else if (in_c(p[k])) {
                        return;
                    }
                }
                separated = false;
            });
    return separated;
}

inline std::set<std::tuple<int, int, int>> v_structures(const Digraph& g) {
    std::set<std::tuple<int, int, int>> out;
    for (int c = 0; c < g.d(); ++c)
        for (int a = 0; a < g.d(); ++a)
            for (int b = a + 1; b < g.d(); ++b)
                if (edge(g, a, c) && edge(g, b, c) && !linked(g, a, b)) out.insert({a, c, b});
    return out;
}

/// Every DAG with the same skeleton and v-structures as g (loops ignored).
inline std::vector<Digraph> equivalence_class(const Digraph& g) {
    std::vector<std::pair<int, int>> sk;
    for (int i = 0; i < g.d(); ++i)
        for (int j = i + 1; j < g.d(); ++j)
            if (linked(g, i, j)) sk.emplace_back(i, j);
    const auto target = v_structures(g);
    std::vector<Digraph> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << sk.size()); ++mask) {
        Digraph h(g.d());
        for (std::size_t e = 0; e < sk.size(); ++e) {
            const auto [i, j] = sk[e];
            if (mask >> e & 1)
                h.set_edge(j, i);
            else
                h.set_edge(i, j);
        }
        if (h.is_acyclic() && v_structures(h) == target) out.push_back(h);
    }
    return out;
}

/// CPDAG from the equivalence class: an edge is directed iff every member agrees.
inline MixedGraph cpdag(const Digraph& g) {
    using sigcausal::Mark;
    const auto members = equivalence_class(g);
    MixedGraph out(g.d());
    for (int i = 0; i < g.d(); ++i)
        for (int j = i + 1; j < g.d(); ++j) {
            if (!linked(g, i, j)) continue;
            bool fwd = false, bwd = false;
            for (const auto& m : members) (edge(m, i, j) ? fwd : bwd) = true;
            if (fwd && bwd)
                out.set_edge(i, j, Mark::tail, Mark::tail);
            else if (fwd)
                out.set_edge(i, j, Mark::tail, Mark::arrow);
            else
                out.set_edge(i, j, Mark::arrow, Mark::tail);
        }
    return out;
}

/// MAG over `observed` from the inducing-path characterization.
inline MixedGraph mag(const Digraph& g, const std::vector<int>& observed) {
    using sigcausal::Mark;
    auto is_obs = [&](int v) { return std::find(observed.begin(), observed.end(), v) != observed.end(); };
    MixedGraph out(g.d());
    for (std::size_t x = 0; x < observed.size(); ++x)
        for (std::size_t y = x + 1; y < observed.size(); ++y) {
            const int a = observed[x], b = observed[y];
            bool inducing = false;
            for_each_simple_path(g, a, b, [&](const std::vector<int>& p) {
                if (inducing) return;
                for (std::size_t k = 1; k + 1 < p.size(); ++k) {
                    if (collider_at(g, p, k)) {
                        if (!is_ancestor(g, p[k], a) && !is_ancestor(g, p[k], b)) return;
                    } else if (is_obs(p[k])) {
                        return;
                    }
                }
                inducing = true;
            });
            if (!inducing) continue;
            const bool ab = is_ancestor(g, a, b), ba = is_ancestor(g, b, a);
            out.set_edge(a, b, ab ? Mark::tail : Mark::arrow, ba ? Mark::tail : Mark::arrow);
        }
    return out;
}

/// Minimum-cost permutation by exhaustive search; optionally fixed-point free.
inline std::optional<double> brute_assignment(const Eigen::MatrixXd& cost, bool derangement) {
    const int n = static_cast<int>(cost.rows());
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::optional<double> best;
    do {
        bool ok = true;
        double c = 0.0;
        for (int i = 0; i < n; ++i) {
            if (derangement && p[static_cast<std::size_t>(i)] == i) ok = false;
            c += cost(i, p[static_cast<std::size_t>(i)]);
        }
        if (ok && (!best || c < *best)) best = c;
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

}  // namespace oracle
