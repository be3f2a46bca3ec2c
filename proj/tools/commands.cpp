#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <sigcausal/error.hpp>
#include <sigcausal/graph_io.hpp>
#include <sigcausal/parallel.hpp>
#include <sigcausal/path_io.hpp>

namespace sigcausal::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t kParamStream = 0x706172616dULL;
constexpr std::uint64_t kSimStream = 0x73696dULL;
constexpr std::uint64_t kMissStream = 0x6d697373ULL;

FamilyOptions family_options(const ExperimentConfig& cfg) {
    FamilyOptions o;
    o.d = cfg.d;
    o.edge_prob = cfg.edge_prob;
    o.power_ratio = cfg.power_ratio;
    o.hurst = cfg.hurst;
    return o;
}

StatisticalOptions statistical_options(const ExperimentConfig& cfg, std::uint64_t seed) {
    StatisticalOptions o = cfg.stats;
    o.test.alpha = cfg.discovery.alpha;
    o.test.seed = derive_seed(cfg.stats.test.seed, {seed});
    return o;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

json query_json(const QueryRecord& r) {
    json j{{"relation", relation_name(r.query.relation)},
           {"i", r.query.i},
           {"K", r.query.K},
           {"independent", r.independent}};
    if (r.query.relation != Relation::self) j["j"] = r.query.j;
    if (r.query.relation == Relation::future || r.query.relation == Relation::self) {
        j["s"] = r.query.s;
        j["h"] = r.query.h;
    }
    j["p_value"] = r.p_value ? json(*r.p_value) : json(nullptr);
    return j;
}

Digraph run_digraph_algorithm(Algorithm a, CiBackend& bk, const DiscoveryConfig& dc) {
    switch (a) {
        case Algorithm::alg1: return run_algorithm1(bk, dc);
        case Algorithm::pc_init: return run_pc_with_init_postprocessing(bk, dc);
        case Algorithm::robust: return run_robust_no_init(bk, dc);
        case Algorithm::fci: break;
    }
    throw UsageError("algorithm fci returns a mixed graph; it is not available in benchmark sweeps");
}

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

}  // namespace

Dataset simulate_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
    Rng rng = make_rng(seed, {kParamStream});
    GeneratorSpec spec = sample_params(parse_family(cfg.family), rng, family_options(cfg));
    SimConfig sc;
    sc.n_paths = cfg.n_paths;
    sc.n_steps = cfg.n_steps;
    sc.horizon = cfg.horizon;
    sc.seed = derive_seed(seed, {kSimStream});
    PathSample sample = simulate(spec, sc);
    if (cfg.missing > 0.0) sample = apply_missingness(sample, cfg.missing, derive_seed(seed, {kMissStream}));
    return {std::move(spec), std::move(sample)};
}

void cmd_simulate(const ExperimentConfig& cfg, std::uint64_t seed, std::ostream& out) {
    parse_family(cfg.family);
    const Dataset ds = simulate_dataset(cfg, seed);
    ensure_dir(cfg.output_dir);
    save_sample_jsonl(ds.sample, cfg.output_dir / "sample.jsonl");
    write_text_file(cfg.output_dir / "truth.json", digraph_to_json(ds.spec.truth, 2) + "\n");
    write_text_file(cfg.output_dir / "spec.json", generator_spec_to_json(ds.spec) + "\n");
    out << "wrote " << ds.sample.size() << " paths to " << (cfg.output_dir / "sample.jsonl").string() << "\n";
}

TestResult cmd_test_ci(const TestCiRequest& req, const ExperimentConfig& cfg, std::ostream& out) {
    PathSample sample = load_sample_jsonl(req.data);
    StatisticalBackend bk(std::move(sample), statistical_options(cfg, 0));
    const TestResult r = bk.run(req.query);
    json j = to_json(r, req.with_null);
    j["relation"] = relation_name(req.query.relation);
    out << j.dump(2) << "\n";
    return r;
}

std::string cmd_discover(const DiscoverRequest& req, const ExperimentConfig& cfg, std::ostream& out) {
    if (req.data.has_value() == req.truth.has_value())
        throw UsageError("discover: give exactly one of --data (statistical) or --truth (oracle)");
    const Algorithm alg = parse_algorithm(req.algorithm);

    std::unique_ptr<CiBackend> bk;
    if (req.truth) {
        bk = std::make_unique<OracleBackend>(Dag(digraph_from_json(read_text_file(*req.truth))), cfg.horizon);
    } else {
        bk = std::make_unique<StatisticalBackend>(load_sample_jsonl(*req.data), statistical_options(cfg, 0));
    }
    DiscoveryConfig dc = cfg.discovery;

    std::string text;
    if (alg == Algorithm::fci) {
        NodeSet observed = req.observed;
        if (observed.empty())
            for (int k = 0; k < bk->d(); ++k) observed.push_back(k);
        text = mixed_graph_to_json(run_partially_observed(*bk, observed, dc), 2);
    } else {
        text = digraph_to_json(run_digraph_algorithm(alg, *bk, dc), 2);
    }
    out << text << "\n";
    if (req.graph_out) write_text_file(*req.graph_out, text + "\n");
    if (req.log_out) write_text_file(*req.log_out, query_log_jsonl(bk->log()));
    return text;
}

std::string query_log_jsonl(const std::vector<QueryRecord>& log) {
    std::string s;
    for (const auto& r : log) s += query_json(r).dump() + "\n";
    return s;
}

std::vector<Aggregate> aggregate(const std::vector<BenchmarkRow>& rows) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const BenchmarkRow*>> groups;
    for (const auto& r : rows) {
        if (!groups.count(r.algorithm)) order.push_back(r.algorithm);
        groups[r.algorithm].push_back(&r);
    }
    std::vector<Aggregate> out;
    for (const auto& alg : order) {
        Aggregate a;
        a.algorithm = alg;
        std::vector<double> shd, nshd;
        for (const BenchmarkRow* r : groups[alg]) {
            ++a.runs;
            if (!r->error.empty()) {
                ++a.failures;
                continue;
            }
            shd.push_back(static_cast<double>(*r->shd));
            nshd.push_back(*r->nshd);
        }
        auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
            mean = se = 0.0;
            if (v.empty()) return;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            if (v.size() < 2) return;
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
        };
        mean_se(shd, a.shd_mean, a.shd_stderr);
        mean_se(nshd, a.nshd_mean, a.nshd_stderr);
        out.push_back(a);
    }
    return out;
}

BenchmarkReport cmd_benchmark(const ExperimentConfig& cfg, std::ostream& out) {
    cfg.validate();
    struct Job {
        std::uint64_t seed;
        std::string algorithm;
    };
    std::vector<Job> jobs;
    for (auto seed : cfg.seeds)
        for (const auto& a : cfg.algorithms) jobs.push_back({seed, a});

    const auto graph_dir = cfg.output_dir / "graphs";
    ensure_dir(graph_dir);

    BenchmarkReport report;
    report.rows.resize(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t idx) {
        const Job& job = jobs[idx];
        BenchmarkRow& row = report.rows[idx];
        row.seed = job.seed;
        row.family = cfg.family;
        row.d = cfg.d;
        row.algorithm = job.algorithm;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const Dataset ds = simulate_dataset(cfg, job.seed);
            std::unique_ptr<CiBackend> bk;
            if (cfg.oracle)
                bk = std::make_unique<OracleBackend>(Dag(ds.spec.truth), cfg.horizon);
            else
                bk = std::make_unique<StatisticalBackend>(ds.sample, statistical_options(cfg, job.seed));
            const Digraph est = run_digraph_algorithm(parse_algorithm(job.algorithm), *bk, cfg.discovery);
            row.shd = shd(est, ds.spec.truth);
            row.nshd = ds.spec.truth.d() >= 2 ? nshd(est, ds.spec.truth) : 0.0;
            row.queries = bk->log().size();
            const std::string stem = "seed" + std::to_string(job.seed);
            write_text_file(graph_dir / (stem + "_truth.json"), digraph_to_json(ds.spec.truth, 2) + "\n");
            write_text_file(graph_dir / (stem + "_" + job.algorithm + ".json"), digraph_to_json(est, 2) + "\n");
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });

    // Single reporter: all files are written after the sweep, in job order.
    report.aggregates = aggregate(report.rows);
    std::ostringstream csv, timings;
    csv << "seed,family,d,algorithm,shd,nshd,queries,error\n";
    timings << "seed,algorithm,wall_seconds\n";
    for (const auto& r : report.rows) {
        std::string err = r.error;
        for (char& c : err)
            if (c == ',' || c == '\n' || c == '"') c = ' ';
        csv << r.seed << ',' << r.family << ',' << r.d << ',' << r.algorithm << ','
            << (r.shd ? std::to_string(*r.shd) : "") << ',' << (r.nshd ? fmt(*r.nshd, 17) : "") << ','
            << r.queries << ',' << err << '\n';
        timings << r.seed << ',' << r.algorithm << ',' << fmt(r.wall_seconds) << '\n';
    }
    write_text_file(cfg.output_dir / "rows.csv", csv.str());
    write_text_file(cfg.output_dir / "timings.csv", timings.str());

    const double scale = cfg.scale100 ? 100.0 : 1.0;
    json agg = json::array();
    for (const auto& a : report.aggregates) {
        agg.push_back({{"algorithm", a.algorithm},
                       {"runs", a.runs},
                       {"failures", a.failures},
                       {"shd_mean", a.shd_mean},
                       {"shd_stderr", a.shd_stderr},
                       {"nshd_mean", a.nshd_mean},
                       {"nshd_stderr", a.nshd_stderr},
                       {"display", fmt(std::round(a.nshd_mean * scale)) + " ± " +
                                       fmt(std::round(a.nshd_stderr * scale))}});
        out << a.algorithm << ": nSHD" << (cfg.scale100 ? " x 10^2" : "") << " = " << fmt(a.nshd_mean * scale, 4)
            << " ± " << fmt(a.nshd_stderr * scale, 4) << " over " << (a.runs - a.failures) << " runs";
        if (a.failures) out << " (" << a.failures << " failed)";
        out << "\n";
    }
    json doc{{"config", to_json(cfg)}, {"scale100", cfg.scale100}, {"aggregates", agg}};
    write_text_file(cfg.output_dir / "aggregate.json", doc.dump(2) + "\n");
    return report;
}

std::size_t cmd_score(const std::filesystem::path& a, const std::filesystem::path& b, bool include_loops,
                      std::ostream& out) {
    const Digraph g1 = digraph_from_json(read_text_file(a));
    const Digraph g2 = digraph_from_json(read_text_file(b));
    const std::size_t s = shd(g1, g2, include_loops);
    json j{{"shd", s}};
    if (g1.d() >= 2) j["nshd"] = nshd(g1, g2, include_loops);
    out << j.dump() << "\n";
    return s;
}

}  // namespace sigcausal::cli
