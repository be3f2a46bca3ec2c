#include <filesystem>
#include <sstream>

#include <doctest.h>

#include <sigcausal/error.hpp>
#include <sigcausal/graph_io.hpp>

#include "commands.hpp"

using namespace sigcausal;
using namespace sigcausal::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("sigcausal_test_" + name);
    fs::remove_all(p);
    return p;
}

ExperimentConfig small(const fs::path& out) {
    ExperimentConfig c = default_experiment_config();
    c.family = "linear-drift";
    c.n_paths = 16;
    c.n_steps = 12;
    c.output_dir = out;
    return c;
}

}  // namespace

TEST_CASE("simulate writes identical files for a fixed seed") {
    const fs::path a = scratch("sim_a"), b = scratch("sim_b");
    std::ostringstream log;
    cmd_simulate(small(a), 7, log);
    cmd_simulate(small(b), 7, log);
    for (const char* f : {"sample.jsonl", "truth.json", "spec.json"})
        CHECK(read_text_file(a / f) == read_text_file(b / f));
    const Digraph truth = digraph_from_json(read_text_file(a / "truth.json"));
    CHECK(truth.has_edge(0, 1));
}

TEST_CASE("unknown family is a usage error") {
    ExperimentConfig c = small(scratch("bogus"));
    c.family = "bogus";
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_simulate(c, 0, log), UsageError);
    try {
        cmd_simulate(c, 0, log);
    } catch (const Error& e) {
        CHECK(e.exit_code() == ExitCode::usage);
    }
}

TEST_CASE("test-ci rejects overlapping sets") {
    const fs::path dir = scratch("testci");
    std::ostringstream log;
    cmd_simulate(small(dir), 1, log);
    TestCiRequest req;
    req.data = dir / "sample.jsonl";
    req.query = {Relation::sym, 0, 1, {0}, 0.0, 0.0};
    CHECK_THROWS_AS(cmd_test_ci(req, small(dir), log), UsageError);
    req.data = dir / "missing.jsonl";
    req.query.K.clear();
    CHECK_THROWS_AS(cmd_test_ci(req, small(dir), log), IoError);
}

TEST_CASE("oracle benchmark is exact and reproducible") {
    const fs::path dir = scratch("bench");
    ExperimentConfig c = default_experiment_config();
    c.oracle = true;
    c.d = 5;
    c.seeds = {1, 2, 3, 4};
    c.algorithms = {"alg1", "pc-init", "robust"};
    c.output_dir = dir;
    c.n_paths = 2;
    c.n_steps = 4;
    std::ostringstream out;
    const BenchmarkReport r = cmd_benchmark(c, out);
    REQUIRE(r.rows.size() == 12);
    for (const auto& row : r.rows) {
        CHECK(row.error.empty());
        CHECK(row.shd == std::size_t{0});
    }
    const std::string first = read_text_file(dir / "rows.csv");
    cmd_benchmark(c, out);
    CHECK(read_text_file(dir / "rows.csv") == first);
    CHECK(fs::exists(dir / "graphs" / "seed3_pc-init.json"));

    c.seeds.clear();
    CHECK_THROWS_AS(cmd_benchmark(c, out), UsageError);
}

TEST_CASE("config files reject unknown keys") {
    ExperimentConfig c = default_experiment_config();
    merge_json(c, nlohmann::json::parse(R"({"d": 6, "discovery": {"alpha": 0.01}, "kernel": {"refinement": 1}})"));
    CHECK(c.d == 6);
    CHECK(c.discovery.alpha == 0.01);
    CHECK(c.stats.kernel.refinement == 1);
    CHECK_THROWS_AS(merge_json(c, nlohmann::json::parse(R"({"dd": 6})")), UsageError);
    const ExperimentConfig back = [&] {
        ExperimentConfig x = default_experiment_config();
        merge_json(x, to_json(c));
        return x;
    }();
    CHECK(to_json(back) == to_json(c));
}

TEST_CASE("score and discover commands") {
    const fs::path dir = scratch("score");
    fs::create_directories(dir);
    const Edge es[] = {{0, 1}, {1, 2}};
    write_text_file(dir / "a.json", digraph_to_json(Digraph(3, es)));
    const Edge rev[] = {{1, 0}, {1, 2}};
    const int loops[] = {2};
    write_text_file(dir / "b.json", digraph_to_json(Digraph(3, rev, loops)));
    std::ostringstream out;
    CHECK(cmd_score(dir / "a.json", dir / "b.json", true, out) == 3);
    CHECK(cmd_score(dir / "a.json", dir / "b.json", false, out) == 2);

    DiscoverRequest req;
    req.truth = dir / "b.json";
    req.log_out = dir / "log.jsonl";
    const std::string g = cmd_discover(req, default_experiment_config(), out);
    CHECK(digraph_from_json(g) == digraph_from_json(read_text_file(dir / "b.json")));
    CHECK_FALSE(read_text_file(dir / "log.jsonl").empty());

    req.data = dir / "sample.jsonl";
    CHECK_THROWS_AS(cmd_discover(req, default_experiment_config(), out), UsageError);
}
