#include "config.hpp"

#include <fstream>
#include <set>

#include <sigcausal/error.hpp>
#include <sigcausal/graph_io.hpp>

namespace sigcausal::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw UsageError(where + ": expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw UsageError(where + ": unknown key '" + key + "'");
}

template <class T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::string lifting_name(Lifting l) { return l == Lifting::rbf ? "rbf" : "euclidean"; }

Lifting parse_lifting(const std::string& s) {
    if (s == "rbf") return Lifting::rbf;
    if (s == "euclidean") return Lifting::euclidean;
    throw UsageError("unknown lifting '" + s + "' (expected euclidean or rbf)");
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
    if (name == "alg1") return Algorithm::alg1;
    if (name == "pc-init") return Algorithm::pc_init;
    if (name == "robust") return Algorithm::robust;
    if (name == "fci") return Algorithm::fci;
    throw UsageError("unknown algorithm '" + name + "' (expected alg1, pc-init, robust or fci)");
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::alg1: return "alg1";
        case Algorithm::pc_init: return "pc-init";
        case Algorithm::robust: return "robust";
        case Algorithm::fci: return "fci";
    }
    return "?";
}

StatisticalOptions default_statistical_options() {
    StatisticalOptions o;
    o.kernel.lifting = Lifting::rbf;
    o.kernel.add_time = true;
    o.kernel.refinement = 2;
    o.median_heuristic = true;
    return o;
}

ExperimentConfig default_experiment_config() {
    ExperimentConfig c;
    c.stats = default_statistical_options();
    return c;
}

void ExperimentConfig::validate() const {
    parse_family(family);
    for (const auto& a : algorithms) parse_algorithm(a);
    if (seeds.empty()) throw UsageError("experiment config: seeds must be nonempty");
    if (algorithms.empty()) throw UsageError("experiment config: algorithms must be nonempty");
    if (d < 1) throw UsageError("experiment config: d must be >= 1");
    if (n_paths < 1) throw UsageError("experiment config: n_paths must be >= 1");
    if (!(missing >= 0.0 && missing < 1.0)) throw UsageError("experiment config: missing must lie in [0, 1)");
    stats.kernel.validate();
    stats.test.validate();
    discovery.validate(horizon);
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["family"] = c.family;
    j["d"] = c.d;
    j["n_paths"] = c.n_paths;
    j["n_steps"] = c.n_steps;
    j["horizon"] = c.horizon;
    j["edge_prob"] = c.edge_prob;
    j["power_ratio"] = c.power_ratio;
    j["hurst"] = c.hurst;
    j["missing"] = c.missing;
    j["seeds"] = c.seeds;
    j["algorithms"] = c.algorithms;
    j["oracle"] = c.oracle;
    j["scale100"] = c.scale100;
    j["output_dir"] = c.output_dir.string();
    j["discovery"] = {{"s", c.discovery.s},
                      {"h", c.discovery.h},
                      {"alpha", c.discovery.alpha},
                      {"max_cond_size", c.discovery.max_cond_size},
                      {"batched", c.discovery.batched},
                      {"seed", c.discovery.seed}};
    const auto& t = c.stats.test;
    j["test"] = {{"alpha", t.alpha}, {"b_outer", t.b_outer}, {"n_perm", t.n_perm},
                 {"n_null", t.n_null}, {"n_mc", t.n_mc},     {"seed", t.seed}};
    const auto& k = c.stats.kernel;
    j["kernel"] = {{"lifting", lifting_name(k.lifting)},
                   {"bandwidth", k.bandwidth},
                   {"refinement", k.refinement},
                   {"add_time", k.add_time},
                   {"median_heuristic", c.stats.median_heuristic}};
    return j;
}

void merge_json(ExperimentConfig& c, const json& j) {
    try {
        check_keys(j,
                   {"family", "d", "n_paths", "n_steps", "horizon", "edge_prob", "power_ratio", "hurst", "missing",
                    "seeds", "algorithms", "oracle", "scale100", "output_dir", "discovery", "test", "kernel"},
                   "config");
        take(j, "family", c.family);
        take(j, "d", c.d);
        take(j, "n_paths", c.n_paths);
        take(j, "n_steps", c.n_steps);
        take(j, "horizon", c.horizon);
        take(j, "edge_prob", c.edge_prob);
        take(j, "power_ratio", c.power_ratio);
        take(j, "hurst", c.hurst);
        take(j, "missing", c.missing);
        take(j, "seeds", c.seeds);
        take(j, "algorithms", c.algorithms);
        take(j, "oracle", c.oracle);
        take(j, "scale100", c.scale100);
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("discovery")) {
            const json& dj = j.at("discovery");
            check_keys(dj, {"s", "h", "alpha", "max_cond_size", "batched", "seed"}, "config.discovery");
            take(dj, "s", c.discovery.s);
            take(dj, "h", c.discovery.h);
            take(dj, "alpha", c.discovery.alpha);
            take(dj, "max_cond_size", c.discovery.max_cond_size);
            take(dj, "batched", c.discovery.batched);
            take(dj, "seed", c.discovery.seed);
        }
        if (j.contains("test")) {
            const json& tj = j.at("test");
            check_keys(tj, {"alpha", "b_outer", "n_perm", "n_null", "n_mc", "seed"}, "config.test");
            take(tj, "alpha", c.stats.test.alpha);
            take(tj, "b_outer", c.stats.test.b_outer);
            take(tj, "n_perm", c.stats.test.n_perm);
            take(tj, "n_null", c.stats.test.n_null);
            take(tj, "n_mc", c.stats.test.n_mc);
            take(tj, "seed", c.stats.test.seed);
        }
        if (j.contains("kernel")) {
            const json& kj = j.at("kernel");
            check_keys(kj, {"lifting", "bandwidth", "refinement", "add_time", "median_heuristic"}, "config.kernel");
            if (kj.contains("lifting")) c.stats.kernel.lifting = parse_lifting(kj.at("lifting").get<std::string>());
            take(kj, "bandwidth", c.stats.kernel.bandwidth);
            take(kj, "refinement", c.stats.kernel.refinement);
            take(kj, "add_time", c.stats.kernel.add_time);
            take(kj, "median_heuristic", c.stats.median_heuristic);
        }
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file, ExperimentConfig base) {
    const std::string text = read_text_file(file);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw UsageError("config " + file.string() + ": " + e.what());
    }
    merge_json(base, j);
    return base;
}

json to_json(const TestResult& r, bool with_null) {
    json j{{"statistic", r.statistic}, {"p_value", r.p_value}, {"reject", r.reject}};
    if (with_null) j["null_samples"] = r.null_samples;
    return j;
}

}  // namespace sigcausal::cli
