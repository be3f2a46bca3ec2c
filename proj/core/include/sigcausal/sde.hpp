#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sigcausal/graph.hpp"
#include "sigcausal/paths.hpp"
#include "sigcausal/rng.hpp"

namespace sigcausal {

/// Law of one initial coordinate: a constant, or an independent Gaussian.
struct InitialLaw {
    double mean = 0.0;
    double sd = 0.0;  // 0 means constant

    static InitialLaw constant(double v) { return {v, 0.0}; }
    static InitialLaw gaussian(double mean, double sd) { return {mean, sd}; }
    double draw(Rng& rng) const;
};

/// Default initial law: independent N(0, 0.1^2) per coordinate.
std::vector<InitialLaw> default_initial_laws(int d);

/// dX = (A X + c) dt + diag(B X + dvec) dW.
struct LinearSdeSpec {
    Eigen::MatrixXd A;
    Eigen::VectorXd c;
    Eigen::MatrixXd B;
    Eigen::VectorXd dvec;
    std::vector<InitialLaw> x0;

    static LinearSdeSpec zeros(int d);
    int d() const noexcept { return static_cast<int>(A.rows()); }
    void validate() const;
    /// i -> j iff A(j, i) or B(j, i) is nonzero; loop k iff A(k, k) or B(k, k) is nonzero.
    Digraph dependence_graph() const;
};

/// dX1 = -r w sin(w t) dt + d1 dW1,  dX2 = r w tanh(X1) dt + d2 dW2.
struct NonlinearSpec {
    double omega = 7.0 * 3.14159265358979323846;
    double r = 0.75;
    Eigen::Vector2d dvec{2.0, 2.0};
    std::vector<InitialLaw> x0 = default_initial_laws(2);

    void validate() const;
};

/// Hidden integrator X3 with dX3 = a31 X1 dt and dX2 = a23 X3 dt + d2 dW2;
/// only X1, X2 are returned.
struct PathDependentSpec {
    double a23 = 0.0;
    double a31 = 0.0;
    double d1 = 0.15;
    double d2 = 0.15;
    std::vector<InitialLaw> x0 = default_initial_laws(2);

    LinearSdeSpec embedding() const;
};

/// dX = d1 dB1,  dY = a21 X dt + d2 dB2 with independent fBMs of Hurst index H.
struct FbmSpec {
    double hurst = 0.5;
    double a21 = 0.0;
    double d1 = 1.0;
    double d2 = 1.0;
    std::vector<InitialLaw> x0 = default_initial_laws(2);

    void validate() const;
};

/// Functional-data generator: Fourier sources, historical-integral children.
struct FdaSpec {
    int m_basis = 5;
    double a = 1.0;
    double noise_sd = 1.0;

    void validate() const;
};

struct SimConfig {
    std::size_t n_paths = 200;
    std::size_t n_steps = 128;  // observations per path, including t = 0 and t = T
    double horizon = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Euler-Maruyama on a uniform grid. Throws SimulationDivergedError when a
/// coordinate leaves [-1e6, 1e6] or becomes non-finite.
PathSample simulate_linear(const LinearSdeSpec& spec, const SimConfig& cfg);
PathSample simulate_nonlinear(const NonlinearSpec& spec, const SimConfig& cfg);
PathSample simulate_path_dependent(const PathDependentSpec& spec, const SimConfig& cfg);
/// Draws couplings a23, a31 ~ U([-3.5, -1] u [1, 3.5]) and d1, d2 ~ U([0.1, 0.2]).
PathSample simulate_path_dependent(const SimConfig& cfg, Rng& rng);
PathSample simulate_fbm_pair(const FbmSpec& spec, const SimConfig& cfg);
PathSample generate_fda_sample(const Dag& g, const FdaSpec& spec, const SimConfig& cfg);

/// Covariance of fBM at the given (positive) times.
Eigen::MatrixXd fbm_covariance(const std::vector<double>& times, double hurst);

/// Kernel of the historical integral, 8 (s - c1)^2 - 8 (t - c2)^2.
double fda_beta(double s, double t, double c1, double c2);

/// Trapezoid approximation of t_i -> int_0^{t_i} x(s) beta(s, t_i) ds on `times`.
Eigen::VectorXd historical_integral(const std::vector<double>& times, const Eigen::VectorXd& x, double c1, double c2);

// ---------------------------------------------------------------- experiment families

enum class Family {
    linear_drift,
    diffusion,
    path_dependence,
    nonlinear,
    causal_discovery,
    linear_power,
    fbm,
    fda,
};

Family parse_family(const std::string& name);
std::string family_name(Family f);
std::vector<std::string> family_names();

struct FamilyOptions {
    int d = 3;                  // causal_discovery, fda
    double edge_prob = 0.3;     // causal_discovery, fda
    double power_ratio = 1.5;   // linear_power: a21 / a22
    double hurst = 0.5;         // fbm
};

using GeneratorParams = std::variant<LinearSdeSpec, NonlinearSpec, PathDependentSpec, FbmSpec, FdaSpec>;

struct GeneratorSpec {
    Family family;
    GeneratorParams params;
    /// Dependence graph over the returned coordinates.
    Digraph truth;
    /// DAG driving the fda generator.
    std::optional<Dag> fda_graph;
};

GeneratorSpec sample_params(Family family, Rng& rng, const FamilyOptions& opts = {});
PathSample simulate(const GeneratorSpec& spec, const SimConfig& cfg);
std::string generator_spec_to_json(const GeneratorSpec& spec, int indent = 2);

}  // namespace sigcausal
