#include "sigcausal/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <string>

#include "sigcausal/error.hpp"

namespace sigcausal {

// ---------------------------------------------------------------- Digraph

Digraph::Digraph(int d) : d_(d), adj_(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), 0) {
    if (d < 0) throw UsageError("graph: negative node count");
}

Digraph::Digraph(int d, std::span<const Edge> edges, std::span<const int> loops) : Digraph(d) {
    for (const auto& [i, j] : edges) set_edge(i, j);
    for (int k : loops) set_loop(k);
}

void Digraph::check(int i) const {
    if (i < 0 || i >= d_) throw IndexError("graph: node " + std::to_string(i) + " out of range");
}

bool Digraph::has_edge(int i, int j) const {
    check(i);
    check(j);
    return adj_[static_cast<std::size_t>(i) * static_cast<std::size_t>(d_) + static_cast<std::size_t>(j)] != 0;
}

void Digraph::set_edge(int i, int j, bool present) {
    check(i);
    check(j);
    adj_[static_cast<std::size_t>(i) * static_cast<std::size_t>(d_) + static_cast<std::size_t>(j)] = present ? 1 : 0;
}

NodeSet Digraph::parents(int j) const {
    NodeSet out;
    for (int i = 0; i < d_; ++i)
        if (i != j && has_edge(i, j)) out.push_back(i);
    return out;
}

NodeSet Digraph::children(int i) const {
    NodeSet out;
    for (int j = 0; j < d_; ++j)
        if (i != j && has_edge(i, j)) out.push_back(j);
    return out;
}

std::vector<Edge> Digraph::edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j)
            if (i != j && has_edge(i, j)) out.emplace_back(i, j);
    return out;
}

NodeSet Digraph::loops() const {
    NodeSet out;
    for (int k = 0; k < d_; ++k)
        if (has_loop(k)) out.push_back(k);
    return out;
}

std::size_t Digraph::num_edges() const { return edges().size(); }

bool Digraph::is_acyclic() const {
    // Kahn's algorithm on off-diagonal edges.
    std::vector<int> indeg(static_cast<std::size_t>(d_), 0);
    for (const auto& [i, j] : edges()) ++indeg[static_cast<std::size_t>(j)];
    std::deque<int> ready;
    for (int k = 0; k < d_; ++k)
        if (indeg[static_cast<std::size_t>(k)] == 0) ready.push_back(k);
    int seen = 0;
    while (!ready.empty()) {
        int v = ready.front();
        ready.pop_front();
        ++seen;
        for (int c : children(v))
            if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
    return seen == d_;
}

Dag::Dag(int d, std::span<const Edge> edges, std::span<const int> loops) : Dag(Digraph(d, edges, loops)) {}

Dag::Dag(Digraph g) : Digraph(std::move(g)) {
    if (!is_acyclic()) throw UsageError("graph contains a directed cycle of length > 1");
}

// ---------------------------------------------------------------- LiftedGraph

LiftedGraph::LiftedGraph(Digraph g) : g_(std::move(g)) {
    if (g_.d() % 2 != 0) throw UsageError("lifted graph: node count must be even");
    const int d = g_.d() / 2;
    if (!g_.loops().empty()) throw UsageError("lifted graph: self-loops are not allowed");
    if (!g_.is_acyclic()) throw UsageError("lifted graph: contains a directed cycle");
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (g_.has_edge(d + i, j)) throw UsageError("lifted graph: edge from V1 to V0");
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            const bool a = g_.has_edge(i, j), b = g_.has_edge(d + i, d + j), c = g_.has_edge(i, d + j);
            if (a != b || b != c)
                throw UsageError("lifted graph: inconsistent edge pattern for pair (" + std::to_string(i) + ", " +
                                 std::to_string(j) + ")");
        }
}

LiftedGraph lift(const Dag& g) {
    const int d = g.d();
    Digraph out(2 * d);
    for (int k = 0; k < d; ++k)
        if (g.has_loop(k)) out.set_edge(k, d + k);
    for (const auto& [i, j] : g.edges()) {
        out.set_edge(i, j);
        out.set_edge(d + i, d + j);
        out.set_edge(i, d + j);
    }
    return LiftedGraph(std::move(out));
}

Dag collapse(const LiftedGraph& lg) {
    const int d = lg.d();
    Digraph out(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (lg.graph().has_edge(i, d + j)) out.set_edge(i, j);
    return Dag(std::move(out));
}

// ---------------------------------------------------------------- MixedGraph

MixedGraph::MixedGraph(int d) : d_(d), loops_(static_cast<std::size_t>(d), 0) {}

bool MixedGraph::adjacent(int i, int j) const { return marks_.contains(key(i, j)); }

Mark MixedGraph::mark(int at, int other) const {
    auto it = marks_.find(key(at, other));
    if (it == marks_.end()) throw UsageError("mixed graph: nodes are not adjacent");
    return at < other ? it->second.first : it->second.second;
}

void MixedGraph::set_edge(int i, int j, Mark at_i, Mark at_j) {
    if (i == j || i < 0 || j < 0 || i >= d_ || j >= d_) throw IndexError("mixed graph: invalid edge");
    marks_[key(i, j)] = i < j ? std::pair{at_i, at_j} : std::pair{at_j, at_i};
}

void MixedGraph::set_mark(int at, int other, Mark m) {
    auto it = marks_.find(key(at, other));
    if (it == marks_.end()) throw UsageError("mixed graph: nodes are not adjacent");
    (at < other ? it->second.first : it->second.second) = m;
}

void MixedGraph::remove_edge(int i, int j) { marks_.erase(key(i, j)); }

bool MixedGraph::is_directed(int from, int to) const {
    return adjacent(from, to) && mark(from, to) == Mark::tail && mark(to, from) == Mark::arrow;
}

bool MixedGraph::is_undirected(int i, int j) const {
    return adjacent(i, j) && mark(i, j) == Mark::tail && mark(j, i) == Mark::tail;
}

bool MixedGraph::is_bidirected(int i, int j) const {
    return adjacent(i, j) && mark(i, j) == Mark::arrow && mark(j, i) == Mark::arrow;
}

NodeSet MixedGraph::neighbors(int i) const {
    NodeSet out;
    for (int j = 0; j < d_; ++j)
        if (j != i && adjacent(i, j)) out.push_back(j);
    return out;
}

std::vector<MixedGraph::EdgeMarks> MixedGraph::edges() const {
    std::vector<EdgeMarks> out;
    for (const auto& [k, m] : marks_) out.push_back({k.first, k.second, m.first, m.second});
    return out;
}

MixedGraph MixedGraph::from_digraph(const Digraph& g) {
    MixedGraph out(g.d());
    for (const auto& [i, j] : g.edges()) {
        if (g.has_edge(j, i))
            out.set_edge(i, j, Mark::tail, Mark::tail);
        else
            out.set_edge(i, j, Mark::tail, Mark::arrow);
    }
    for (int k : g.loops()) out.set_loop(k);
    return out;
}

// ---------------------------------------------------------------- SepSetTable

void SepSetTable::record(int i, int j, NodeSet s) { sets_[i < j ? std::pair{i, j} : std::pair{j, i}] = std::move(s); }

bool SepSetTable::contains(int i, int j) const { return sets_.contains(i < j ? std::pair{i, j} : std::pair{j, i}); }

const NodeSet& SepSetTable::at(int i, int j) const {
    auto it = sets_.find(i < j ? std::pair{i, j} : std::pair{j, i});
    if (it == sets_.end()) throw UsageError("no separating set recorded for this pair");
    return it->second;
}

// ---------------------------------------------------------------- sampling

Dag sample_er_dag(int d, double edge_prob, double loop_prob, Rng& rng) {
    if (d < 1) throw UsageError("sample_er_dag: d must be >= 1");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0) || !(loop_prob >= 0.0 && loop_prob <= 1.0))
        throw UsageError("sample_er_dag: probabilities must lie in [0, 1]");
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution edge(edge_prob), loop(loop_prob);
    Digraph g(d);
    for (std::size_t a = 0; a < order.size(); ++a)
        for (std::size_t b = a + 1; b < order.size(); ++b)
            if (edge(rng)) g.set_edge(order[a], order[b]);
    for (int k = 0; k < d; ++k)
        if (loop(rng)) g.set_loop(k);
    return Dag(std::move(g));
}

// ---------------------------------------------------------------- d-separation

namespace {

std::vector<std::uint8_t> membership(int d, std::span<const int> s) {
    std::vector<std::uint8_t> m(static_cast<std::size_t>(d), 0);
    for (int v : s) {
        if (v < 0 || v >= d) throw IndexError("node " + std::to_string(v) + " out of range");
        m[static_cast<std::size_t>(v)] = 1;
    }
    return m;
}

}  // namespace

NodeSet ancestors(const Digraph& g, std::span<const int> vs) {
    std::vector<std::uint8_t> seen = membership(g.d(), vs);
    std::deque<int> queue(vs.begin(), vs.end());
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int p : g.parents(v))
            if (!seen[static_cast<std::size_t>(p)]) {
                seen[static_cast<std::size_t>(p)] = 1;
                queue.push_back(p);
            }
    }
    NodeSet out;
    for (int k = 0; k < g.d(); ++k)
        if (seen[static_cast<std::size_t>(k)]) out.push_back(k);
    return out;
}

NodeSet ancestors(const Digraph& g, int v) {
    const int vs[] = {v};
    return ancestors(g, vs);
}

bool d_separated(const Digraph& g, std::span<const int> a, std::span<const int> b, std::span<const int> c) {
    const int d = g.d();
    auto in_a = membership(d, a), in_b = membership(d, b), in_c = membership(d, c);
    for (int k = 0; k < d; ++k) {
        const auto u = static_cast<std::size_t>(k);
        if ((in_a[u] && in_b[u]) || (in_a[u] && in_c[u]) || (in_b[u] && in_c[u]))
            throw UsageError("d_separated: node sets must be pairwise disjoint");
    }
    std::vector<std::uint8_t> anc_c = membership(d, ancestors(g, c));

    // State: node x direction, 0 = arrived from a child (moving up), 1 = from a parent (moving down).
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(2 * d), 0);
    std::deque<std::pair<int, int>> queue;
    for (int s : a) queue.emplace_back(s, 0);
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        auto& flag = visited[static_cast<std::size_t>(2 * v + dir)];
        if (flag) continue;
        flag = 1;
        const auto u = static_cast<std::size_t>(v);
        if (!in_c[u] && in_b[u]) return false;
        if (dir == 0) {
            if (in_c[u]) continue;
            for (int p : g.parents(v)) queue.emplace_back(p, 0);
            for (int ch : g.children(v)) queue.emplace_back(ch, 1);
        } else {
            if (!in_c[u])
                for (int ch : g.children(v)) queue.emplace_back(ch, 1);
            if (anc_c[u])
                for (int p : g.parents(v)) queue.emplace_back(p, 0);
        }
    }
    return true;
}

// ---------------------------------------------------------------- Meek rules

namespace {

void orient(MixedGraph& g, int from, int to) {
    g.set_mark(from, to, Mark::tail);
    g.set_mark(to, from, Mark::arrow);
}

bool meek_pass(MixedGraph& g) {
    const int d = g.d();
    bool changed = false;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            if (a == b || !g.is_undirected(a, b)) continue;
            // R1: c -> a - b, c and b non-adjacent.
            bool fire = false;
            for (int c = 0; c < d && !fire; ++c)
                fire = c != a && c != b && g.is_directed(c, a) && !g.adjacent(c, b);
            // R2: a -> c -> b.
            for (int c = 0; c < d && !fire; ++c)
                fire = c != a && c != b && g.is_directed(a, c) && g.is_directed(c, b);
            // R3: a - c -> b, a - e -> b, c and e non-adjacent.
            for (int c = 0; c < d && !fire; ++c) {
                if (c == a || c == b || !g.is_undirected(a, c) || !g.is_directed(c, b)) continue;
                for (int e = c + 1; e < d && !fire; ++e)
                    fire = e != a && e != b && g.is_undirected(a, e) && g.is_directed(e, b) && !g.adjacent(c, e);
            }
            // R4: a - c -> e -> b, a adjacent e, c and b non-adjacent.
            for (int c = 0; c < d && !fire; ++c) {
                if (c == a || c == b || !g.is_undirected(a, c) || g.adjacent(c, b)) continue;
                for (int e = 0; e < d && !fire; ++e)
                    fire = e != a && e != b && e != c && g.is_directed(c, e) && g.is_directed(e, b) && g.adjacent(a, e);
            }
            if (fire) {
                orient(g, a, b);
                changed = true;
            }
        }
    return changed;
}

}  // namespace

MixedGraph apply_meek_rules(MixedGraph pg) {
    while (meek_pass(pg)) {
    }
    return pg;
}

MixedGraph cpdag(const Dag& g) {
    const int d = g.d();
    MixedGraph out(d);
    for (const auto& [i, j] : g.edges()) out.set_edge(i, j, Mark::tail, Mark::tail);
    for (int j = 0; j < d; ++j) {
        NodeSet pa = g.parents(j);
        for (std::size_t x = 0; x < pa.size(); ++x)
            for (std::size_t y = x + 1; y < pa.size(); ++y)
                if (!out.adjacent(pa[x], pa[y])) {
                    orient(out, pa[x], j);
                    orient(out, pa[y], j);
                }
    }
    for (int k : g.loops()) out.set_loop(k);
    return apply_meek_rules(std::move(out));
}

// ---------------------------------------------------------------- MAG projection

namespace {

struct InducingSearch {
    const Digraph& g;
    const std::vector<std::uint8_t>& observed;
    const std::vector<std::uint8_t>& anc;
    int target;
    std::vector<std::uint8_t> on_path;

    bool adj(int x, int y) const { return g.has_edge(x, y) || g.has_edge(y, x); }

    // Path so far ends with prev -> cur (prev == -1 at the start).
    bool extend(int prev, int cur) {
        for (int next = 0; next < g.d(); ++next) {
            if (next == cur || on_path[static_cast<std::size_t>(next)] || !adj(cur, next)) continue;
            if (prev >= 0) {
                const bool collider = g.has_edge(prev, cur) && g.has_edge(next, cur);
                const auto c = static_cast<std::size_t>(cur);
                if (collider ? !anc[c] : observed[c]) continue;
            }
            if (next == target) return true;
            on_path[static_cast<std::size_t>(next)] = 1;
            const bool found = extend(cur, next);
            on_path[static_cast<std::size_t>(next)] = 0;
            if (found) return true;
        }
        return false;
    }
};

}  // namespace

MixedGraph project_to_mag(const Dag& g, std::span<const int> observed) {
    const int d = g.d();
    std::vector<std::uint8_t> obs = membership(d, observed);
    NodeSet obs_nodes;
    for (int k = 0; k < d; ++k)
        if (obs[static_cast<std::size_t>(k)]) obs_nodes.push_back(k);

    std::vector<std::vector<std::uint8_t>> an_of(static_cast<std::size_t>(d));
    for (int v = 0; v < d; ++v) an_of[static_cast<std::size_t>(v)] = membership(d, ancestors(g, v));

    MixedGraph out(d);
    for (std::size_t x = 0; x < obs_nodes.size(); ++x)
        for (std::size_t y = x + 1; y < obs_nodes.size(); ++y) {
            const int v1 = obs_nodes[x], v2 = obs_nodes[y];
            const int pair[] = {v1, v2};
            std::vector<std::uint8_t> anc = membership(d, ancestors(g, pair));
            InducingSearch search{g, obs, anc, v2, std::vector<std::uint8_t>(static_cast<std::size_t>(d), 0)};
            search.on_path[static_cast<std::size_t>(v1)] = 1;
            if (!search.extend(-1, v1)) continue;
            const bool v1_anc_v2 = an_of[static_cast<std::size_t>(v2)][static_cast<std::size_t>(v1)];
            const bool v2_anc_v1 = an_of[static_cast<std::size_t>(v1)][static_cast<std::size_t>(v2)];
            if (v1_anc_v2 && !v2_anc_v1)
                out.set_edge(v1, v2, Mark::tail, Mark::arrow);
            else if (v2_anc_v1 && !v1_anc_v2)
                out.set_edge(v1, v2, Mark::arrow, Mark::tail);
            else
                out.set_edge(v1, v2, Mark::arrow, Mark::arrow);
        }
    return out;
}

// ---------------------------------------------------------------- metrics

std::size_t shd(const Digraph& g1, const Digraph& g2, bool include_loops) {
    if (g1.d() != g2.d()) throw UsageError("shd: graphs have different node counts");
    std::size_t dist = 0;
    for (int i = 0; i < g1.d(); ++i)
        for (int j = 0; j < g1.d(); ++j) {
            if (i == j && !include_loops) continue;
            if (g1.has_edge(i, j) != g2.has_edge(i, j)) ++dist;
        }
    return dist;
}

double nshd(const Digraph& g1, const Digraph& g2, bool include_loops) {
    const double d = g1.d();
    if (d < 2) throw UsageError("nshd: need at least 2 nodes");
    return static_cast<double>(shd(g1, g2, include_loops)) / (d * (d - 1.0));
}

std::vector<NodeSet> subsets_of_size(const NodeSet& pool, std::size_t k) {
    std::vector<NodeSet> out;
    if (k > pool.size()) return out;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    while (true) {
        NodeSet s;
        s.reserve(k);
        for (auto i : idx) s.push_back(pool[i]);
        out.push_back(std::move(s));
        if (k == 0) break;
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == pool.size() - k + (pos - 1)) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t q = pos; q < k; ++q) idx[q] = idx[q - 1] + 1;
    }
    return out;
}

}  // namespace sigcausal
