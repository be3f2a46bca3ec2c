#include "sigcausal/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sigcausal/error.hpp"

namespace sigcausal {

namespace {

using Matrix = std::vector<std::vector<char>>;

Matrix square(int d, char v) { return Matrix(static_cast<std::size_t>(d), std::vector<char>(static_cast<std::size_t>(d), v)); }

char& at(Matrix& m, int i, int j) { return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
char at(const Matrix& m, int i, int j) { return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }

int cond_cap(int d, const DiscoveryConfig& cfg) {
    const int exact = std::max(0, d - 2);
    return cfg.max_cond_size < 0 ? exact : std::min(exact, cfg.max_cond_size);
}

NodeSet remove_from(NodeSet pool, std::initializer_list<int> drop) {
    pool.erase(std::remove_if(pool.begin(), pool.end(),
                              [&](int v) { return std::find(drop.begin(), drop.end(), v) != drop.end(); }),
               pool.end());
    return pool;
}

// Loop removal: start with every loop present, drop k's loop when its past and
// future are independent given the discovered parents' paths.
void remove_loops(CiBackend& bk, Digraph& g, const DiscoveryConfig& cfg) {
    for (int k = 0; k < g.d(); ++k) g.set_loop(k);
    for (int k = 0; k < g.d(); ++k)
        if (test_self_loop(bk, k, g.parents(k), cfg.s, cfg.h)) g.set_loop(k, false);
}

// Skeleton search with symmetric tests. Conditioning sets are drawn from the
// current neighbours of j (ordered pairs) or of both endpoints (unordered).
MixedGraph skeleton(CiBackend& bk, const NodeSet& nodes, const DiscoveryConfig& cfg, bool both_endpoints,
                    SepSetTable& sepsets) {
    const int d = bk.d();
    Matrix adj = square(d, 0);
    for (int i : nodes)
        for (int j : nodes)
            if (i != j) at(adj, i, j) = 1;
    auto neighbours = [&](int v) {
        NodeSet out;
        for (int u : nodes)
            if (at(adj, v, u)) out.push_back(u);
        return out;
    };

    const int cap = cond_cap(static_cast<int>(nodes.size()), cfg);
    for (int c = 0; c <= cap; ++c) {
        bool any_pool = false;
        for (int i : nodes)
            for (int j : nodes) {
                if (i == j || !at(adj, i, j)) continue;
                if (both_endpoints && i > j) continue;
                NodeSet pool = neighbours(j);
                if (both_endpoints) {
                    const NodeSet ni = neighbours(i);
                    pool.insert(pool.end(), ni.begin(), ni.end());
                    std::sort(pool.begin(), pool.end());
                    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
                }
                pool = remove_from(std::move(pool), {i, j});
                if (static_cast<int>(pool.size()) < c) continue;
                any_pool = true;
                for (const NodeSet& K : subsets_of_size(pool, static_cast<std::size_t>(c))) {
                    if (test_sym(bk, i, j, K)) {
                        at(adj, i, j) = 0;
                        at(adj, j, i) = 0;
                        sepsets.record(i, j, K);
                        break;
                    }
                }
            }
        if (!any_pool) break;
    }

    MixedGraph g(d);
    for (int i : nodes)
        for (int j : nodes)
            if (i < j && at(adj, i, j)) g.set_edge(i, j, Mark::tail, Mark::tail);
    return g;
}

bool separated_by(const SepSetTable& sepsets, int i, int k, int j) {
    if (!sepsets.contains(i, k)) return false;
    const NodeSet& s = sepsets.at(i, k);
    return std::find(s.begin(), s.end(), j) == s.end();
}

// Unshielded colliders i -> j <- k of the skeleton; first orientation wins on conflicts.
void orient_colliders(MixedGraph& g, const NodeSet& nodes, const SepSetTable& sepsets) {
    for (int j : nodes) {
        const NodeSet nb = g.neighbors(j);
        for (std::size_t a = 0; a < nb.size(); ++a)
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                const int i = nb[a], k = nb[b];
                if (g.adjacent(i, k) || !separated_by(sepsets, i, k, j)) continue;
                for (int x : {i, k})
                    if (g.is_undirected(x, j)) g.set_edge(x, j, Mark::tail, Mark::arrow);
            }
    }
}

MixedGraph pattern(CiBackend& bk, const NodeSet& nodes, const DiscoveryConfig& cfg, SepSetTable& sepsets) {
    MixedGraph g = skeleton(bk, nodes, cfg, false, sepsets);
    orient_colliders(g, nodes, sepsets);
    return apply_meek_rules(std::move(g));
}

NodeSet all_nodes(int d) {
    NodeSet v(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) v[static_cast<std::size_t>(k)] = k;
    return v;
}

}  // namespace

DiscoveryConfig DiscoveryConfig::for_horizon(double T) {
    DiscoveryConfig c;
    c.s = 0.1 * T;
    c.h = 0.9 * T;
    return c;
}

void DiscoveryConfig::validate(double T) const {
    if (!(s > 0.0) || !(h > 0.0) || s + h > T * (1.0 + 1e-12))
        throw UsageError("discovery config: need 0 < s < s + h <= T (s=" + std::to_string(s) +
                         ", h=" + std::to_string(h) + ", T=" + std::to_string(T) + ")");
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("discovery config: alpha must lie in (0, 1)");
}

bool test_sym(CiBackend& bk, int i, int j, const NodeSet& K) { return bk.ask({Relation::sym, i, j, K, 0.0, 0.0}); }

bool test_future_extended(CiBackend& bk, int i, int j, const NodeSet& K, double s, double h) {
    return bk.ask({Relation::future, i, j, K, s, h});
}

bool test_self_loop(CiBackend& bk, int k, const NodeSet& K, double s, double h) {
    return bk.ask({Relation::self, k, k, K, s, h});
}

bool test_initial_value(CiBackend& bk, int i, int j) { return bk.ask({Relation::init, i, j, {}, 0.0, 0.0}); }

std::size_t algorithm1_query_budget(int d, int max_cond_size) {
    const int cap = max_cond_size < 0 ? std::max(0, d - 2) : std::min(std::max(0, d - 2), max_cond_size);
    double sum = 0.0;
    for (int c = 0; c <= cap; ++c) {
        double binom = 1.0;
        for (int q = 0; q < c; ++q) binom = binom * (d - 2 - q) / (q + 1);
        sum += binom;
    }
    return static_cast<std::size_t>(std::llround(static_cast<double>(d) * d * sum));
}

Digraph run_algorithm1(CiBackend& bk, const DiscoveryConfig& cfg) {
    cfg.validate(bk.horizon());
    const int d = bk.d();
    // cross(i, j): lifted edge i_0 -> j_1 (with i_0 -> j_0 and i_1 -> j_1) still present.
    Matrix cross = square(d, 1);
    for (int k = 0; k < d; ++k) at(cross, k, k) = 0;

    const int cap = cond_cap(d, cfg);
    for (int c = 0; c <= cap; ++c) {
        const Matrix snapshot = cross;
        std::vector<Edge> removals;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                if (i == j || !at(cross, i, j)) continue;
                const Matrix& basis = cfg.batched ? snapshot : cross;
                NodeSet pool;
                for (int k = 0; k < d; ++k)
                    if (k != i && k != j && at(basis, k, j)) pool.push_back(k);
                for (const NodeSet& K : subsets_of_size(pool, static_cast<std::size_t>(c))) {
                    if (test_future_extended(bk, i, j, K, cfg.s, cfg.h)) {
                        if (cfg.batched)
                            removals.emplace_back(i, j);
                        else
                            at(cross, i, j) = 0;
                        break;
                    }
                }
            }
        for (const auto& [i, j] : removals) at(cross, i, j) = 0;
    }

    Digraph g(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j && at(cross, i, j)) g.set_edge(i, j);
    remove_loops(bk, g, cfg);
    return g;
}

Digraph run_pc_with_init_postprocessing(CiBackend& bk, const DiscoveryConfig& cfg, PcTrace* trace) {
    cfg.validate(bk.horizon());
    const int d = bk.d();
    SepSetTable sepsets;
    const MixedGraph cp = pattern(bk, all_nodes(d), cfg, sepsets);

    Digraph g(d);
    std::vector<Edge> init_oriented;
    for (const auto& e : cp.edges()) {
        if (cp.is_directed(e.i, e.j)) {
            g.set_edge(e.i, e.j);
        } else if (cp.is_directed(e.j, e.i)) {
            g.set_edge(e.j, e.i);
        } else {
            // X^i_0 independent of X^j means i is not an ancestor of j.
            const Edge oriented = test_initial_value(bk, e.i, e.j) ? Edge{e.j, e.i} : Edge{e.i, e.j};
            g.set_edge(oriented.first, oriented.second);
            init_oriented.push_back(oriented);
        }
    }
    remove_loops(bk, g, cfg);
    if (trace) *trace = {cp, sepsets, std::move(init_oriented)};
    return g;
}

Digraph run_robust_no_init(CiBackend& bk, const DiscoveryConfig& cfg) {
    cfg.validate(bk.horizon());
    const int d = bk.d();
    SepSetTable sepsets;
    const MixedGraph cp = pattern(bk, all_nodes(d), cfg, sepsets);

    Matrix cross = square(d, 0);
    for (const auto& e : cp.edges()) {
        at(cross, e.i, e.j) = e.at_i != Mark::arrow;
        at(cross, e.j, e.i) = e.at_j != Mark::arrow;
    }

    const int cap = cfg.max_cond_size < 0 ? d : cfg.max_cond_size;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (i == j || !at(cross, i, j) || !at(cross, j, i)) continue;
            NodeSet known, undirected;
            for (int k = 0; k < d; ++k) {
                if (k == i || k == j || !at(cross, k, j)) continue;
                (at(cross, j, k) ? undirected : known).push_back(k);
            }
            if (static_cast<int>(undirected.size()) > cap)
                throw CapExceededError("robust discovery: " + std::to_string(undirected.size()) +
                                       " undirected neighbours of " + std::to_string(j) + " exceed max_cond_size " +
                                       std::to_string(cap));
            bool removed = false;
            for (std::size_t c = 0; c <= undirected.size() && !removed; ++c)
                for (const NodeSet& u : subsets_of_size(undirected, c)) {
                    NodeSet K = known;
                    K.insert(K.end(), u.begin(), u.end());
                    std::sort(K.begin(), K.end());
                    if (test_future_extended(bk, i, j, K, cfg.s, cfg.h)) {
                        at(cross, i, j) = 0;
                        removed = true;
                        break;
                    }
                }
        }

    Digraph g(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j && at(cross, i, j)) g.set_edge(i, j);
    remove_loops(bk, g, cfg);
    return g;
}

MixedGraph run_partially_observed(CiBackend& bk, const NodeSet& observed, const DiscoveryConfig& cfg) {
    const int d = bk.d();
    NodeSet nodes(observed);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (int v : nodes)
        if (v < 0 || v >= d) throw IndexError("partially observed discovery: node " + std::to_string(v) + " out of range");

    SepSetTable sepsets;
    MixedGraph g = skeleton(bk, nodes, cfg, true, sepsets);

    // Circle pattern with unshielded colliders, used to bound Possible-D-SEP.
    MixedGraph pag(d);
    for (const auto& e : g.edges()) pag.set_edge(e.i, e.j, Mark::circle, Mark::circle);
    for (int j : nodes) {
        const NodeSet nb = pag.neighbors(j);
        for (std::size_t a = 0; a < nb.size(); ++a)
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                const int i = nb[a], k = nb[b];
                if (pag.adjacent(i, k) || !separated_by(sepsets, i, k, j)) continue;
                pag.set_mark(j, i, Mark::arrow);
                pag.set_mark(j, k, Mark::arrow);
            }
    }
    auto possible_dsep = [&](int x) {
        std::vector<char> seen(static_cast<std::size_t>(d), 0);
        std::vector<std::pair<int, int>> stack;
        std::vector<std::vector<char>> visited = square(d, 0);
        for (int b : pag.neighbors(x)) {
            stack.emplace_back(x, b);
            at(visited, x, b) = 1;
        }
        while (!stack.empty()) {
            const auto [a, b] = stack.back();
            stack.pop_back();
            seen[static_cast<std::size_t>(b)] = 1;
            for (int c : pag.neighbors(b)) {
                if (c == a || at(visited, b, c)) continue;
                const bool collider = pag.mark(b, a) == Mark::arrow && pag.mark(b, c) == Mark::arrow;
                if (collider || pag.adjacent(a, c)) {
                    at(visited, b, c) = 1;
                    stack.emplace_back(b, c);
                }
            }
        }
        NodeSet out;
        for (int v = 0; v < d; ++v)
            if (seen[static_cast<std::size_t>(v)] && v != x) out.push_back(v);
        return out;
    };
    std::vector<NodeSet> pds(static_cast<std::size_t>(d));
    for (int v : nodes) pds[static_cast<std::size_t>(v)] = possible_dsep(v);

    const int cap = cfg.max_cond_size < 0 ? d : cfg.max_cond_size;
    for (const auto& e : g.edges()) {
        bool removed = false;
        for (int end : {e.i, e.j}) {
            const NodeSet pool = remove_from(pds[static_cast<std::size_t>(end)], {e.i, e.j});
            const std::size_t top = std::min(pool.size(), static_cast<std::size_t>(cap));
            for (std::size_t c = 0; c <= top && !removed; ++c)
                for (const NodeSet& K : subsets_of_size(pool, c))
                    if (test_sym(bk, e.i, e.j, K)) {
                        g.remove_edge(e.i, e.j);
                        sepsets.record(e.i, e.j, K);
                        removed = true;
                        break;
                    }
            if (removed) break;
        }
    }

    // Orientation from ancestry: X^i_0 dependent on X^j iff i is an ancestor of j.
    MixedGraph out(d);
    for (const auto& e : g.edges()) {
        const bool i_not_anc = test_initial_value(bk, e.i, e.j);
        const bool j_not_anc = test_initial_value(bk, e.j, e.i);
        if (!i_not_anc && j_not_anc)
            out.set_edge(e.i, e.j, Mark::tail, Mark::arrow);
        else if (i_not_anc && !j_not_anc)
            out.set_edge(e.i, e.j, Mark::arrow, Mark::tail);
        else if (i_not_anc && j_not_anc)
            out.set_edge(e.i, e.j, Mark::arrow, Mark::arrow);
        else
            out.set_edge(e.i, e.j, Mark::circle, Mark::circle);
    }
    return out;
}

}  // namespace sigcausal
