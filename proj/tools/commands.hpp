#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace sigcausal::cli {

/// One simulated dataset of the configured family.
struct Dataset {
    GeneratorSpec spec;
    PathSample sample;
};

/// Deterministic per (config, seed).
Dataset simulate_dataset(const ExperimentConfig& cfg, std::uint64_t seed);

/// Writes sample.jsonl, truth.json and spec.json into cfg.output_dir.
void cmd_simulate(const ExperimentConfig& cfg, std::uint64_t seed, std::ostream& out);

struct TestCiRequest {
    std::filesystem::path data;
    CiQuery query;
    bool with_null = false;
};

TestResult cmd_test_ci(const TestCiRequest& req, const ExperimentConfig& cfg, std::ostream& out);

struct DiscoverRequest {
    std::optional<std::filesystem::path> data;   // statistical mode
    std::optional<std::filesystem::path> truth;  // oracle mode
    std::string algorithm = "alg1";
    NodeSet observed;  // fci only; empty means all variables
    std::optional<std::filesystem::path> graph_out;
    std::optional<std::filesystem::path> log_out;
};

/// Prints the discovered graph JSON; returns it as well.
std::string cmd_discover(const DiscoverRequest& req, const ExperimentConfig& cfg, std::ostream& out);

struct BenchmarkRow {
    std::uint64_t seed = 0;
    std::string family;
    int d = 0;
    std::string algorithm;
    std::optional<std::size_t> shd;
    std::optional<double> nshd;
    std::size_t queries = 0;
    double wall_seconds = 0.0;
    std::string error;  // empty on success
};

struct Aggregate {
    std::string algorithm;
    std::size_t runs = 0;
    std::size_t failures = 0;
    double shd_mean = 0.0;
    double shd_stderr = 0.0;
    double nshd_mean = 0.0;
    double nshd_stderr = 0.0;
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
    std::vector<Aggregate> aggregates;
};

/// Aggregates recomputed from rows (failed rows excluded).
std::vector<Aggregate> aggregate(const std::vector<BenchmarkRow>& rows);

/// Runs family x seed x algorithm; rows are independent and may run in
/// parallel. Writes rows.csv, timings.csv, aggregate.json and per-row graph
/// files under cfg.output_dir.
BenchmarkReport cmd_benchmark(const ExperimentConfig& cfg, std::ostream& out);

/// SHD between two digraph files.
std::size_t cmd_score(const std::filesystem::path& a, const std::filesystem::path& b, bool include_loops,
                      std::ostream& out);

std::string query_log_jsonl(const std::vector<QueryRecord>& log);

}  // namespace sigcausal::cli
