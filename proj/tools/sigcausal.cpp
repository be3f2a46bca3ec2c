// sigcausal: simulate SDE path data, run CI tests and causal discovery.

#include <functional>
#include <iostream>
#include <memory>
#include <type_traits>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <sigcausal/error.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace {

using namespace sigcausal;
using namespace sigcausal::cli;

// Flags that mirror ExperimentConfig fields. Only flags given on the command
// line are applied, so a config file supplies everything else.
class ConfigFlags {
public:
    void add_horizon(CLI::App* app) {
        bind(app, "--horizon", [](ExperimentConfig& c) -> auto& { return c.horizon; }, "Time horizon T");
    }

    void add_data(CLI::App* app) {
        bind(app, "--family", [](ExperimentConfig& c) -> auto& { return c.family; }, "Generator family");
        bind(app, "--d", [](ExperimentConfig& c) -> auto& { return c.d; }, "Number of variables (causal-discovery, fda)");
        bind(app, "--n-paths", [](ExperimentConfig& c) -> auto& { return c.n_paths; }, "Sample paths per dataset");
        bind(app, "--n-steps", [](ExperimentConfig& c) -> auto& { return c.n_steps; }, "Observations per path");
        add_horizon(app);
        bind(app, "--edge-prob", [](ExperimentConfig& c) -> auto& { return c.edge_prob; }, "Edge probability of random DAGs");
        bind(app, "--power-ratio", [](ExperimentConfig& c) -> auto& { return c.power_ratio; }, "a21 / a22 for linear-power");
        bind(app, "--hurst", [](ExperimentConfig& c) -> auto& { return c.hurst; }, "Hurst index for fbm");
        bind(app, "--missing", [](ExperimentConfig& c) -> auto& { return c.missing; },
             "Fraction of interior observations to drop");
        bind(app, "--output-dir", [](ExperimentConfig& c) -> auto& { return c.output_dir; }, "Output directory");
    }

    void add_stats(CLI::App* app) {
        bind(app, "--alpha", [](ExperimentConfig& c) -> auto& { return c.discovery.alpha; }, "Significance level");
        bind(app, "--b-outer", [](ExperimentConfig& c) -> auto& { return c.stats.test.b_outer; }, "KCIPT outer bootstraps");
        bind(app, "--n-perm", [](ExperimentConfig& c) -> auto& { return c.stats.test.n_perm; }, "KCIPT inner permutations");
        bind(app, "--n-null", [](ExperimentConfig& c) -> auto& { return c.stats.test.n_null; }, "HSIC / SDCIT null samples");
        bind(app, "--n-mc", [](ExperimentConfig& c) -> auto& { return c.stats.test.n_mc; }, "KCIPT Monte-Carlo null samples");
        bind(app, "--test-seed", [](ExperimentConfig& c) -> auto& { return c.stats.test.seed; },
             "Base seed of the permutation streams");
        bind(app, "--kcipt", [](ExperimentConfig& c) -> auto& { return c.stats.use_kcipt; },
             "Use KCIPT instead of SDCIT for conditional queries");
        auto lifting = std::make_shared<std::string>();
        auto* opt = app->add_option("--lifting", *lifting, "Static kernel: euclidean or rbf")
                        ->check(CLI::IsMember({"euclidean", "rbf"}));
        appliers_.push_back([opt, lifting](ExperimentConfig& c) {
            if (opt->count()) c.stats.kernel.lifting = *lifting == "rbf" ? Lifting::rbf : Lifting::euclidean;
        });
        bind(app, "--bandwidth", [](ExperimentConfig& c) -> auto& { return c.stats.kernel.bandwidth; },
             "Fixed rbf bandwidth (with --median=false)");
        bind(app, "--refinement", [](ExperimentConfig& c) -> auto& { return c.stats.kernel.refinement; },
             "Dyadic refinement order of the PDE grid");
        bind(app, "--add-time", [](ExperimentConfig& c) -> auto& { return c.stats.kernel.add_time; },
             "Time-augment paths before lifting");
        bind(app, "--median", [](ExperimentConfig& c) -> auto& { return c.stats.median_heuristic; },
             "Median-heuristic rbf bandwidth per segment");
    }

    void add_discovery(CLI::App* app) {
        bind(app, "--split", [](ExperimentConfig& c) -> auto& { return c.discovery.s; }, "Split time s");
        bind(app, "--window", [](ExperimentConfig& c) -> auto& { return c.discovery.h; }, "Future window h");
        bind(app, "--max-cond", [](ExperimentConfig& c) -> auto& { return c.discovery.max_cond_size; },
             "Cap on conditioning-set size (-1: none)");
        bind(app, "--batched", [](ExperimentConfig& c) -> auto& { return c.discovery.batched; },
             "Apply removals at the end of each sweep");
    }

    void add_experiment(CLI::App* app) {
        bind(app, "--seeds", [](ExperimentConfig& c) -> auto& { return c.seeds; }, "Seeds");
        bind(app, "--algorithms", [](ExperimentConfig& c) -> auto& { return c.algorithms; }, "alg1, pc-init, robust");
        bind(app, "--oracle", [](ExperimentConfig& c) -> auto& { return c.oracle; },
             "Answer queries by d-separation in the true graph");
        bind(app, "--scale100", [](ExperimentConfig& c) -> auto& { return c.scale100; }, "Report nSHD x 10^2");
    }

    void add_config(CLI::App* app) {
        app->add_option("--config", config_file_, "JSON config file")->check(CLI::ExistingFile);
        app->add_flag("--config-precedence", config_wins_, "Config file values override command-line flags");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig c = default_experiment_config();
        auto apply_flags = [&] {
            for (const auto& f : appliers_) f(c);
        };
        if (config_file_.empty()) {
            apply_flags();
        } else if (config_wins_) {
            apply_flags();
            c = load_experiment_config(config_file_, c);
        } else {
            c = load_experiment_config(config_file_, c);
            apply_flags();
        }
        return c;
    }

private:
    template <class Access>
    void bind(CLI::App* app, const std::string& name, Access access, const std::string& help) {
        using T = std::remove_reference_t<decltype(access(std::declval<ExperimentConfig&>()))>;
        auto slot = std::make_shared<T>();
        CLI::Option* opt;
        if constexpr (std::is_same_v<T, bool>)
            opt = app->add_flag(name, *slot, help);
        else
            opt = app->add_option(name, *slot, help);
        appliers_.push_back([opt, slot, access](ExperimentConfig& c) {
            if (opt->count()) access(c) = *slot;
        });
    }

    std::string config_file_;
    bool config_wins_ = false;
    std::vector<std::function<void(ExperimentConfig&)>> appliers_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constraint-based causal discovery on SDE path data with signature kernels"};
    app.require_subcommand(1);

    ConfigFlags sim_flags, test_flags, disc_flags, bench_flags;

    auto* sim = app.add_subcommand("simulate", "Simulate a dataset and write sample, truth and spec files");
    sim_flags.add_data(sim);
    sim_flags.add_config(sim);
    std::uint64_t sim_seed = 0;
    sim->add_option("--seed", sim_seed, "Dataset seed");

    auto* test = app.add_subcommand("test-ci", "Run one conditional-independence test on a sample file");
    test_flags.add_stats(test);
    test_flags.add_discovery(test);
    test_flags.add_config(test);
    TestCiRequest test_req;
    std::string relation = "sym";
    test->add_option("--data", test_req.data, "Sample JSONL file")->required();
    test->add_option("--relation", relation, "sym, future, self or init");
    test->add_option("-i,--i", test_req.query.i, "First variable")->required();
    test->add_option("-j,--j", test_req.query.j, "Second variable");
    test->add_option("-K,--K", test_req.query.K, "Conditioning variables");
    test->add_flag("--with-null", test_req.with_null, "Include the null samples in the output");

    auto* disc = app.add_subcommand("discover", "Run a discovery algorithm on data or against an oracle");
    disc_flags.add_stats(disc);
    disc_flags.add_discovery(disc);
    disc_flags.add_config(disc);
    DiscoverRequest disc_req;
    std::string data_file, truth_file, graph_out, log_out;
    disc->add_option("--data", data_file, "Sample JSONL file (statistical mode)");
    disc->add_option("--truth", truth_file, "Truth graph JSON (oracle mode)");
    disc->add_option("--algorithm", disc_req.algorithm, "alg1, pc-init, robust or fci");
    disc->add_option("--observed", disc_req.observed, "Observed variables (fci)");
    disc->add_option("--out", graph_out, "Write the graph JSON here");
    disc->add_option("--log", log_out, "Write the query log (JSON Lines) here");
    disc_flags.add_horizon(disc);

    auto* bench = app.add_subcommand("benchmark", "Multi-seed discovery sweep with SHD reporting");
    bench_flags.add_data(bench);
    bench_flags.add_stats(bench);
    bench_flags.add_discovery(bench);
    bench_flags.add_experiment(bench);
    bench_flags.add_config(bench);

    auto* score = app.add_subcommand("score", "SHD between two graph files");
    std::string score_a, score_b;
    bool no_loops = false;
    score->add_option("a", score_a, "First graph JSON")->required();
    score->add_option("b", score_b, "Second graph JSON")->required();
    score->add_flag("--no-loops", no_loops, "Ignore self-loops");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::usage);
    }

    try {
        if (*sim) {
            cmd_simulate(sim_flags.resolve(), sim_seed, std::cout);
        } else if (*test) {
            ExperimentConfig cfg = test_flags.resolve();
            test_req.query.relation = parse_relation(relation);
            test_req.query.s = cfg.discovery.s;
            test_req.query.h = cfg.discovery.h;
            if (test_req.query.relation == Relation::self) test_req.query.j = test_req.query.i;
            cmd_test_ci(test_req, cfg, std::cout);
        } else if (*disc) {
            if (!data_file.empty()) disc_req.data = data_file;
            if (!truth_file.empty()) disc_req.truth = truth_file;
            if (!graph_out.empty()) disc_req.graph_out = graph_out;
            if (!log_out.empty()) disc_req.log_out = log_out;
            cmd_discover(disc_req, disc_flags.resolve(), std::cout);
        } else if (*bench) {
            cmd_benchmark(bench_flags.resolve(), std::cout);
        } else if (*score) {
            cmd_score(score_a, score_b, !no_loops, std::cout);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::failure);
    }
    return 0;
}
