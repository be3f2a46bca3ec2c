#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "sigcausal/rng.hpp"

namespace sigcausal {

using NodeSet = std::vector<int>;
using Edge = std::pair<int, int>;

/// Directed graph over nodes 0..d-1; self-loops live on the diagonal.
/// No acyclicity requirement (statistical discovery may return cycles).
class Digraph {
public:
    Digraph() = default;
    explicit Digraph(int d);
    Digraph(int d, std::span<const Edge> edges, std::span<const int> loops = {});

    int d() const noexcept { return d_; }
    bool has_edge(int i, int j) const;
    bool has_loop(int k) const { return has_edge(k, k); }
    void set_edge(int i, int j, bool present = true);
    void set_loop(int k, bool present = true) { set_edge(k, k, present); }

    /// Parents of j, excluding j itself.
    NodeSet parents(int j) const;
    NodeSet children(int i) const;
    /// Off-diagonal edges in row-major order.
    std::vector<Edge> edges() const;
    NodeSet loops() const;
    std::size_t num_edges() const;

    /// Ignores self-loops.
    bool is_acyclic() const;

    friend bool operator==(const Digraph&, const Digraph&) = default;

private:
    void check(int i) const;

    int d_ = 0;
    std::vector<std::uint8_t> adj_;
};

/// Directed graph without cycles of length > 1; checked on construction.
class Dag : public Digraph {
public:
    Dag() = default;
    explicit Dag(int d) : Digraph(d) {}
    Dag(int d, std::span<const Edge> edges, std::span<const int> loops = {});
    explicit Dag(Digraph g);
};

/// Two-copy past/future graph: node k_0 has index k, node k_1 has index d + k.
class LiftedGraph {
public:
    /// Validates acyclicity, no V1 -> V0 edges and the triple pattern.
    explicit LiftedGraph(Digraph g);

    int d() const noexcept { return g_.d() / 2; }
    const Digraph& graph() const noexcept { return g_; }
    static int past(int k) noexcept { return k; }
    int future(int k) const noexcept { return d() + k; }

private:
    Digraph g_;
};

enum class Mark : std::uint8_t { tail, arrow, circle };

/// Edge marks keyed by unordered pair; loops are stored per node.
/// CPDAG: i -> j is (tail, arrow), undirected i - j is (tail, tail).
/// MAG: additionally i <-> j is (arrow, arrow). PAG stages use circles.
class MixedGraph {
public:
    MixedGraph() = default;
    explicit MixedGraph(int d);

    int d() const noexcept { return d_; }
    bool adjacent(int i, int j) const;
    /// Mark at `at` on the edge between `at` and `other`.
    Mark mark(int at, int other) const;
    void set_edge(int i, int j, Mark at_i, Mark at_j);
    void set_mark(int at, int other, Mark m);
    void remove_edge(int i, int j);
    bool has_loop(int k) const { return loops_.at(static_cast<std::size_t>(k)) != 0; }
    void set_loop(int k, bool present = true) { loops_.at(static_cast<std::size_t>(k)) = present ? 1 : 0; }

    bool is_directed(int from, int to) const;  // from -> to
    bool is_undirected(int i, int j) const;    // i - j
    bool is_bidirected(int i, int j) const;    // i <-> j
    NodeSet neighbors(int i) const;

    /// (i, j, mark at i, mark at j) with i < j.
    struct EdgeMarks {
        int i;
        int j;
        Mark at_i;
        Mark at_j;
        friend bool operator==(const EdgeMarks&, const EdgeMarks&) = default;
    };
    std::vector<EdgeMarks> edges() const;

    static MixedGraph from_digraph(const Digraph& g);

    friend bool operator==(const MixedGraph&, const MixedGraph&) = default;

private:
    static std::pair<int, int> key(int i, int j) { return i < j ? std::pair{i, j} : std::pair{j, i}; }

    int d_ = 0;
    std::map<std::pair<int, int>, std::pair<Mark, Mark>> marks_;
    std::vector<std::uint8_t> loops_;
};

/// Separating sets found during skeleton search, keyed by unordered pair.
class SepSetTable {
public:
    void record(int i, int j, NodeSet s);
    bool contains(int i, int j) const;
    const NodeSet& at(int i, int j) const;

private:
    std::map<std::pair<int, int>, NodeSet> sets_;
};

Dag sample_er_dag(int d, double edge_prob, double loop_prob, Rng& rng);

LiftedGraph lift(const Dag& g);
Dag collapse(const LiftedGraph& lg);

/// d-separation of A and B given C via linear-time reachability.
/// Self-loops are ignored. Throws UsageError when the sets overlap.
bool d_separated(const Digraph& g, std::span<const int> a, std::span<const int> b, std::span<const int> c);

/// Reflexive-transitive closure of the parent relation (v included).
NodeSet ancestors(const Digraph& g, int v);
NodeSet ancestors(const Digraph& g, std::span<const int> vs);

/// Meek rules R1-R4 applied to a fixed point on a tail/arrow pattern.
MixedGraph apply_meek_rules(MixedGraph pg);

/// CPDAG of a DAG: skeleton, v-structures, Meek closure. Loops are kept.
MixedGraph cpdag(const Dag& g);

/// Unique MAG over `observed`; latent nodes keep their index but get no edges.
/// Self-loops are not part of a MAG and are dropped.
MixedGraph project_to_mag(const Dag& g, std::span<const int> observed);

/// Entrywise L1 distance of adjacency matrices, diagonal (loops) included
/// unless `include_loops` is false. A reversed edge costs 2.
std::size_t shd(const Digraph& g1, const Digraph& g2, bool include_loops = true);
double nshd(const Digraph& g1, const Digraph& g2, bool include_loops = true);

/// All subsets of `pool` of size `k` in lexicographic order.
std::vector<NodeSet> subsets_of_size(const NodeSet& pool, std::size_t k);

}  // namespace sigcausal
