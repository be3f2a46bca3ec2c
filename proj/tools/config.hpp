#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include <sigcausal/backend.hpp>
#include <sigcausal/discovery.hpp>
#include <sigcausal/sde.hpp>

namespace sigcausal::cli {

enum class Algorithm { alg1, pc_init, robust, fci };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm a);

/// Shared run settings; every field maps to a JSON key and a CLI flag.
struct ExperimentConfig {
    std::string family = "causal-discovery";
    int d = 3;
    std::size_t n_paths = 200;
    std::size_t n_steps = 128;
    double horizon = 1.0;
    double edge_prob = 0.3;
    double power_ratio = 1.5;
    double hurst = 0.5;
    double missing = 0.0;  // fraction of interior observations dropped per path
    std::vector<std::uint64_t> seeds{0};
    std::vector<std::string> algorithms{"alg1"};
    bool oracle = false;
    bool scale100 = true;  // display SHD x 10^2 in aggregates
    std::filesystem::path output_dir = "out";

    DiscoveryConfig discovery;
    StatisticalOptions stats;

    void validate() const;
};

/// Kernel defaults of the front end: rbf lifting on time-augmented paths
/// with the median heuristic.
StatisticalOptions default_statistical_options();
ExperimentConfig default_experiment_config();

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Overlays the keys present in `j` onto `cfg`; unknown keys are an error.
void merge_json(ExperimentConfig& cfg, const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& file, ExperimentConfig base);

nlohmann::json to_json(const TestResult& r, bool with_null);

}  // namespace sigcausal::cli
