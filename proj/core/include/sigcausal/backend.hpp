#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "sigcausal/ci_test.hpp"
#include "sigcausal/graph.hpp"
#include "sigcausal/paths.hpp"
#include "sigcausal/sig_kernel.hpp"

namespace sigcausal {

enum class Relation { sym, future, self, init };

std::string relation_name(Relation r);
Relation parse_relation(const std::string& name);

/// One conditional-independence question.
///   sym:    X^i_[0,T]   _||_ X^j_[0,T]     | X^K_[0,T]
///   future: X^i_[0,s]   _||_ X^j_[s,s+h]   | X^j_[0,s], X^K_[0,s+h]
///   self:   X^i_[0,s]   _||_ X^i_[s,s+h]   | X^K_[0,s+h]        (j unused)
///   init:   X^i_0       _||_ X^j_[0,T]
struct CiQuery {
    Relation relation = Relation::sym;
    int i = 0;
    int j = 0;
    NodeSet K;
    double s = 0.0;
    double h = 0.0;

    /// Checks index range and disjointness of i, j and K.
    void validate(int d) const;
};

struct QueryRecord {
    CiQuery query;
    bool independent;
    std::optional<double> p_value;
};

/// Answers CI queries; every answer is appended to the query log.
class CiBackend {
public:
    virtual ~CiBackend() = default;

    virtual int d() const = 0;
    /// Horizon T of the underlying processes.
    virtual double horizon() const = 0;

    bool ask(const CiQuery& q);

    const std::vector<QueryRecord>& log() const noexcept { return log_; }
    void clear_log() { log_.clear(); }

protected:
    struct Answer {
        bool independent;
        std::optional<double> p_value;
    };
    virtual Answer do_answer(const CiQuery& q) = 0;

private:
    std::vector<QueryRecord> log_;
};

/// Exact answers from the true dependence graph: d-separation in the DAG
/// (sym), in its lifted graph (future, self), and ancestry (init).
class OracleBackend : public CiBackend {
public:
    explicit OracleBackend(Dag truth, double horizon = 1.0);

    int d() const override { return truth_.d(); }
    double horizon() const override { return horizon_; }
    const Dag& truth() const noexcept { return truth_; }

protected:
    Answer do_answer(const CiQuery& q) override;

private:
    Dag truth_;
    LiftedGraph lifted_;
    double horizon_;
};

struct StatisticalOptions {
    KernelConfig kernel;
    TestConfig test;
    /// Per-segment rbf bandwidth by the median heuristic (rbf lifting only).
    bool median_heuristic = true;
    /// Conditional queries use KCIPT instead of SDCIT.
    bool use_kcipt = false;
};

/// Kernel tests on signature Gram matrices of rebased path segments.
/// Segment Grams are cached per (variable, interval).
class StatisticalBackend : public CiBackend {
public:
    StatisticalBackend(PathSample sample, StatisticalOptions opts);

    int d() const override { return sample_.coord_map().num_variables(); }
    double horizon() const override;

    /// Signature Gram of variable k restricted to [a, b].
    const GramMatrix& segment_gram(int k, Interval iv);
    /// Product of segment Grams of the listed variables (all-ones when empty).
    GramMatrix product_gram(const NodeSet& vars, Interval iv);

    /// Runs the underlying test and returns the full result.
    TestResult run(const CiQuery& q);

protected:
    Answer do_answer(const CiQuery& q) override;

private:
    const GramMatrix& initial_gram(int k);

    PathSample sample_;
    StatisticalOptions opts_;
    std::map<std::tuple<int, double, double>, GramMatrix> cache_;
    std::map<int, GramMatrix> init_cache_;
};

}  // namespace sigcausal
