#include <cmath>
#include <numbers>

#include <doctest.h>

#include <sigcausal/error.hpp>
#include <sigcausal/sde.hpp>

using namespace sigcausal;

namespace {

SimConfig config(std::size_t n_paths, std::size_t n_steps, std::uint64_t seed = 1) {
    SimConfig c;
    c.n_paths = n_paths;
    c.n_steps = n_steps;
    c.seed = seed;
    return c;
}

double terminal(const PathSample& s, std::size_t p, int col) {
    return s[p].values()(s[p].values().rows() - 1, col);
}

}  // namespace

TEST_CASE("zero system stays at zero") {
    LinearSdeSpec s = LinearSdeSpec::zeros(2);
    s.x0 = {InitialLaw::constant(0), InitialLaw::constant(0)};
    const PathSample out = simulate_linear(s, config(5, 20));
    for (const auto& p : out.paths()) CHECK(p.values().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant drift integrates exactly") {
    LinearSdeSpec s = LinearSdeSpec::zeros(1);
    s.c(0) = 1.0;
    s.x0 = {InitialLaw::constant(0)};
    const PathSample out = simulate_linear(s, config(3, 50));
    CHECK(terminal(out, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Ornstein-Uhlenbeck terminal variance") {
    const double theta = 1.5, sigma = 0.8;
    LinearSdeSpec s = LinearSdeSpec::zeros(1);
    s.A(0, 0) = -theta;
    s.dvec(0) = sigma;
    s.x0 = {InitialLaw::constant(0)};
    const std::size_t n = 2000;
    const PathSample out = simulate_linear(s, config(n, 401, 7));
    double mean = 0, sq = 0;
    for (std::size_t p = 0; p < n; ++p) mean += terminal(out, p, 0);
    mean /= n;
    for (std::size_t p = 0; p < n; ++p) sq += std::pow(terminal(out, p, 0) - mean, 2);
    const double var = sq / (n - 1);
    const double expected = sigma * sigma * (1 - std::exp(-2 * theta)) / (2 * theta);
    const double se = expected * std::sqrt(2.0 / (n - 1));
    CHECK(std::abs(var - expected) < 3 * se);
    CHECK(std::abs(mean) < 3 * std::sqrt(expected / n));
}

TEST_CASE("nonlinear first coordinate follows the ODE without noise") {
    NonlinearSpec s;
    s.dvec << 0.0, 0.0;
    s.r = 0.7;
    s.omega = 6.5 * std::numbers::pi;
    s.x0 = {InitialLaw::constant(0.3), InitialLaw::constant(0.0)};
    const std::size_t n_steps = 4001;
    const PathSample out = simulate_nonlinear(s, config(1, n_steps));
    const auto& p = out[0];
    double worst = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double t = p.grid()[k];
        worst = std::max(worst, std::abs(p.values()(static_cast<Eigen::Index>(k), 0) -
                                         (s.r * std::cos(s.omega * t) - s.r + 0.3)));
    }
    CHECK(worst < 20.0 / static_cast<double>(n_steps));
}

TEST_CASE("simulation is deterministic per seed") {
    Rng rng(1);
    const GeneratorSpec spec = sample_params(Family::causal_discovery, rng, {.d = 4});
    const PathSample a = simulate(spec, config(6, 30, 99));
    const PathSample b = simulate(spec, config(6, 30, 99));
    const PathSample c = simulate(spec, config(6, 30, 100));
    for (std::size_t p = 0; p < a.size(); ++p) CHECK(a[p].values() == b[p].values());
    CHECK(a[0].values() != c[0].values());
}

TEST_CASE("divergent drift reports the path") {
    LinearSdeSpec s = LinearSdeSpec::zeros(1);
    s.A(0, 0) = 60.0;
    s.x0 = {InitialLaw::constant(1.0)};
    CHECK_THROWS_AS(simulate_linear(s, config(3, 100)), SimulationDivergedError);
}

TEST_CASE("family parameter ranges") {
    Rng rng(17);
    for (int t = 0; t < 200; ++t) {
        const auto lin = std::get<LinearSdeSpec>(sample_params(Family::linear_drift, rng).params);
        CHECK(lin.A(1, 0) >= 1.0);
        CHECK(lin.A(1, 0) <= 2.5);
        CHECK(lin.A(0, 1) == 0.0);

        const auto dif = std::get<LinearSdeSpec>(sample_params(Family::diffusion, rng).params);
        CHECK(dif.A(0, 1) == 0.0);
        CHECK(dif.A(1, 0) == 0.0);

        const GeneratorSpec cd = sample_params(Family::causal_discovery, rng, {.d = 5, .edge_prob = 0.4});
        const auto& A = std::get<LinearSdeSpec>(cd.params).A;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                if (i != j && A(j, i) != 0.0) {
                    CHECK(std::abs(A(j, i)) >= 1.0);
                    CHECK(std::abs(A(j, i)) <= 2.0);
                }
        CHECK(Digraph(std::get<LinearSdeSpec>(cd.params).dependence_graph()) == cd.truth);

        const auto nl = std::get<NonlinearSpec>(sample_params(Family::nonlinear, rng).params);
        CHECK(nl.omega >= 6 * std::numbers::pi);
        CHECK(nl.omega <= 8 * std::numbers::pi);

        const auto pd = std::get<PathDependentSpec>(sample_params(Family::path_dependence, rng).params);
        CHECK(std::abs(pd.a23) >= 1.0);
        CHECK(std::abs(pd.a31) <= 3.5);
    }
    CHECK_THROWS_AS(parse_family("bogus"), UsageError);
    CHECK(parse_family("linear-drift") == Family::linear_drift);
}

TEST_CASE("linear-drift truth is 0 -> 1") {
    Rng rng(5);
    const GeneratorSpec s = sample_params(Family::linear_drift, rng);
    CHECK(s.truth.has_edge(0, 1));
    CHECK_FALSE(s.truth.has_edge(1, 0));
}

TEST_CASE("path-dependent sample hides the integrator") {
    PathDependentSpec s;
    const PathSample out = simulate_path_dependent(s, config(4, 16));
    CHECK(out[0].dim() == 2);
}

TEST_CASE("fbm covariance formula") {
    const std::vector<double> t{0.1, 0.4, 0.7};
    for (double H : {0.25, 0.5, 0.75}) {
        const Eigen::MatrixXd c = fbm_covariance(t, H);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double e = 0.5 * (std::pow(t[i], 2 * H) + std::pow(t[j], 2 * H) -
                                        std::pow(std::abs(t[i] - t[j]), 2 * H));
                CHECK(c(i, j) == doctest::Approx(e).epsilon(1e-12));
            }
    }
}

TEST_CASE("fbm lag-1 increment correlation") {
    for (double H : {0.3, 0.75}) {
        FbmSpec s;
        s.hurst = H;
        const PathSample out = simulate_fbm_pair(s, config(200, 129, 3));
        double num = 0, den = 0;
        for (const auto& p : out.paths()) {
            const auto& v = p.values();
            for (Eigen::Index k = 2; k < v.rows(); ++k) {
                const double a = v(k - 1, 0) - v(k - 2, 0), b = v(k, 0) - v(k - 1, 0);
                num += a * b;
                den += b * b;
            }
        }
        CHECK(std::abs(num / den - (std::pow(2.0, 2 * H - 1) - 1)) < 0.05);
    }
    FbmSpec bad;
    bad.hurst = 1.0;
    CHECK_THROWS_AS(simulate_fbm_pair(bad, config(2, 8)), UsageError);
}

TEST_CASE("historical integral of a constant parent") {
    const double c1 = 0.3, c2 = 0.6;
    std::vector<double> t;
    for (int k = 0; k <= 400; ++k) t.push_back(k / 400.0);
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(t.size()));
    const Eigen::VectorXd h = historical_integral(t, x, c1, c2);
    for (std::size_t k = 0; k < t.size(); k += 40) {
        const double tt = t[k];
        const double exact = 8.0 / 3.0 * (std::pow(tt - c1, 3) + std::pow(c1, 3)) - 8.0 * tt * std::pow(tt - c2, 2);
        CHECK(h(static_cast<Eigen::Index>(k)) == doctest::Approx(exact).epsilon(1e-4).scale(1.0));
    }
    CHECK(fda_beta(0.5, 0.5, 0.5, 0.5) == 0.0);
}

TEST_CASE("fda sample shape") {
    const Edge es[] = {{0, 1}};
    const PathSample out = generate_fda_sample(Dag(2, es), FdaSpec{}, config(5, 33));
    CHECK(out.size() == 5);
    CHECK(out[0].dim() == 2);
    CHECK(out[0].size() == 33);
}
