#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sigcausal/backend.hpp"
#include "sigcausal/graph.hpp"

namespace sigcausal {

struct DiscoveryConfig {
    double s = 0.1;          // split time
    double h = 0.9;          // future window, [s, s + h]
    double alpha = 0.05;     // forwarded to the test configuration by front ends
    int max_cond_size = -1;  // -1: no cap beyond d - 2
    bool batched = false;    // apply removals at the end of each sweep
    std::uint64_t seed = 0;

    /// s = 0.1 T, h = 0.9 T.
    static DiscoveryConfig for_horizon(double T);
    void validate(double T) const;
};

bool test_sym(CiBackend& bk, int i, int j, const NodeSet& K);
bool test_future_extended(CiBackend& bk, int i, int j, const NodeSet& K, double s, double h);
bool test_self_loop(CiBackend& bk, int k, const NodeSet& K, double s, double h);
bool test_initial_value(CiBackend& bk, int i, int j);

/// Lifted-graph search with future-extended tests, then loop removal.
Digraph run_algorithm1(CiBackend& bk, const DiscoveryConfig& cfg);

/// Intermediate results of the initial-value variant.
struct PcTrace {
    MixedGraph cpdag;
    SepSetTable sepsets;
    /// Edges left undirected by the pattern phase, as oriented by the initial-value rule.
    std::vector<Edge> init_oriented;
};

/// PC skeleton and orientation, remaining edges oriented by initial values.
Digraph run_pc_with_init_postprocessing(CiBackend& bk, const DiscoveryConfig& cfg, PcTrace* trace = nullptr);

/// PC skeleton and orientation, remaining edges resolved by future-extended tests.
/// Throws CapExceededError when an undirected neighbourhood exceeds max_cond_size.
Digraph run_robust_no_init(CiBackend& bk, const DiscoveryConfig& cfg);

/// Skeleton over `observed` (with a Possible-D-SEP pass) and orientation of
/// every adjacency by the two initial-value tests. Nodes outside `observed`
/// keep their index and stay isolated. Loops are not determined.
MixedGraph run_partially_observed(CiBackend& bk, const NodeSet& observed, const DiscoveryConfig& cfg);

/// Upper bound on the number of future-extended queries of run_algorithm1.
std::size_t algorithm1_query_budget(int d, int max_cond_size = -1);

}  // namespace sigcausal
