#include "sigcausal/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <json.hpp>

#include "sigcausal/error.hpp"

namespace sigcausal {

namespace {

constexpr double kDivergenceBound = 1e6;

// Substream tags.
constexpr std::uint64_t kPathStream = 0x70617468ULL;
constexpr std::uint64_t kFdaMechanism = 0x66646163ULL;

void check_finite_row(const Eigen::VectorXd& x, std::size_t path_index, double t) {
    for (Eigen::Index k = 0; k < x.size(); ++k)
        if (!std::isfinite(x(k)) || std::abs(x(k)) > kDivergenceBound)
            throw SimulationDivergedError(path_index, "simulation diverged on path " + std::to_string(path_index) +
                                                          " at t=" + std::to_string(t) + " (coordinate " +
                                                          std::to_string(k) + ")");
}

Eigen::VectorXd draw_initial(const std::vector<InitialLaw>& laws, Rng& rng) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(laws.size()));
    for (std::size_t k = 0; k < laws.size(); ++k) x(static_cast<Eigen::Index>(k)) = laws[k].draw(rng);
    return x;
}

}  // namespace

double InitialLaw::draw(Rng& rng) const {
    if (sd <= 0.0) return mean;
    return std::normal_distribution<double>(mean, sd)(rng);
}

std::vector<InitialLaw> default_initial_laws(int d) {
    return std::vector<InitialLaw>(static_cast<std::size_t>(d), InitialLaw::gaussian(0.0, 0.1));
}

LinearSdeSpec LinearSdeSpec::zeros(int d) {
    return {Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d),
            std::vector<InitialLaw>(static_cast<std::size_t>(d), InitialLaw::constant(0.0))};
}

void LinearSdeSpec::validate() const {
    const auto d = A.rows();
    if (d < 1 || A.cols() != d || B.rows() != d || B.cols() != d || c.size() != d || dvec.size() != d ||
        static_cast<Eigen::Index>(x0.size()) != d)
        throw UsageError("linear SDE spec: inconsistent dimensions");
    if (!A.allFinite() || !B.allFinite() || !c.allFinite() || !dvec.allFinite())
        throw UsageError("linear SDE spec: non-finite coefficient");
}

Digraph LinearSdeSpec::dependence_graph() const {
    Digraph g(d());
    for (int j = 0; j < d(); ++j)
        for (int i = 0; i < d(); ++i)
            if (A(j, i) != 0.0 || B(j, i) != 0.0) g.set_edge(i, j);
    return g;
}

void NonlinearSpec::validate() const {
    if (!std::isfinite(omega) || !std::isfinite(r)) throw UsageError("nonlinear spec: omega and r must be finite");
    if (!(dvec(0) >= 0.0) || !(dvec(1) >= 0.0)) throw UsageError("nonlinear spec: diffusion must be non-negative");
    if (x0.size() != 2) throw UsageError("nonlinear spec: two initial laws required");
}

LinearSdeSpec PathDependentSpec::embedding() const {
    LinearSdeSpec s = LinearSdeSpec::zeros(3);
    s.A(1, 2) = a23;
    s.A(2, 0) = a31;
    s.dvec << d1, d2, 0.0;
    if (x0.size() != 2) throw UsageError("path-dependent spec: two initial laws required");
    s.x0 = {x0[0], x0[1], InitialLaw::constant(0.0)};
    return s;
}

void FbmSpec::validate() const {
    if (!(hurst > 0.0 && hurst < 1.0)) throw UsageError("fbm spec: Hurst index must lie in (0, 1)");
    if (x0.size() != 2) throw UsageError("fbm spec: two initial laws required");
}

void FdaSpec::validate() const {
    if (m_basis < 1) throw UsageError("fda spec: at least one basis function required");
    if (!(noise_sd >= 0.0)) throw UsageError("fda spec: noise_sd must be >= 0");
}

void SimConfig::validate() const {
    if (n_steps < 2) throw UsageError("sim config: n_steps must be >= 2");
    if (!(horizon > 0.0)) throw UsageError("sim config: horizon must be positive");
}

// ---------------------------------------------------------------- linear

PathSample simulate_linear(const LinearSdeSpec& spec, const SimConfig& cfg) {
    spec.validate();
    cfg.validate();
    const int d = spec.d();
    const TimeGrid grid = TimeGrid::uniform(cfg.n_steps, cfg.horizon);
    const double dt = cfg.horizon / static_cast<double>(cfg.n_steps - 1);
    const double sqdt = std::sqrt(dt);

    std::vector<Path> paths;
    paths.reserve(cfg.n_paths);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        Rng rng = make_rng(cfg.seed, {kPathStream, p});
        Eigen::MatrixXd vals(static_cast<Eigen::Index>(cfg.n_steps), d);
        Eigen::VectorXd x = draw_initial(spec.x0, rng);
        vals.row(0) = x.transpose();
        Eigen::VectorXd xi(d);
        for (std::size_t s = 1; s < cfg.n_steps; ++s) {
            for (int k = 0; k < d; ++k) xi(k) = normal(rng);
            const Eigen::VectorXd drift = spec.A * x + spec.c;
            const Eigen::VectorXd diff = spec.B * x + spec.dvec;
            x += drift * dt + diff.cwiseProduct(xi) * sqdt;
            check_finite_row(x, p, grid[s]);
            vals.row(static_cast<Eigen::Index>(s)) = x.transpose();
        }
        paths.emplace_back(grid, std::move(vals));
    }
    return PathSample(std::move(paths), CoordMap::identity(d));
}

// ---------------------------------------------------------------- nonlinear

PathSample simulate_nonlinear(const NonlinearSpec& spec, const SimConfig& cfg) {
    spec.validate();
    cfg.validate();
    const TimeGrid grid = TimeGrid::uniform(cfg.n_steps, cfg.horizon);
    const double dt = cfg.horizon / static_cast<double>(cfg.n_steps - 1);
    const double sqdt = std::sqrt(dt);
    const double rw = spec.r * spec.omega;

    std::vector<Path> paths;
    paths.reserve(cfg.n_paths);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        Rng rng = make_rng(cfg.seed, {kPathStream, p});
        Eigen::MatrixXd vals(static_cast<Eigen::Index>(cfg.n_steps), 2);
        Eigen::VectorXd x = draw_initial(spec.x0, rng);
        vals.row(0) = x.transpose();
        for (std::size_t s = 1; s < cfg.n_steps; ++s) {
            const double t = grid[s - 1];
            const double xi1 = normal(rng), xi2 = normal(rng);
            const double x1 = x(0), x2 = x(1);
            x(0) = x1 - rw * std::sin(spec.omega * t) * dt + spec.dvec(0) * sqdt * xi1;
            x(1) = x2 + rw * std::tanh(x1) * dt + spec.dvec(1) * sqdt * xi2;
            check_finite_row(x, p, grid[s]);
            vals.row(static_cast<Eigen::Index>(s)) = x.transpose();
        }
        paths.emplace_back(grid, std::move(vals));
    }
    return PathSample(std::move(paths), CoordMap::identity(2));
}

// ---------------------------------------------------------------- path-dependent

PathSample simulate_path_dependent(const PathDependentSpec& spec, const SimConfig& cfg) {
    const PathSample full = simulate_linear(spec.embedding(), cfg);
    const int observed[] = {0, 1};
    return select_variables(full, observed);
}

PathSample simulate_path_dependent(const SimConfig& cfg, Rng& rng) {
    PathDependentSpec spec;
    spec.a23 = uniform_signed(rng, 1.0, 3.5);
    spec.a31 = uniform_signed(rng, 1.0, 3.5);
    spec.d1 = uniform(rng, 0.1, 0.2);
    spec.d2 = uniform(rng, 0.1, 0.2);
    return simulate_path_dependent(spec, cfg);
}

// ---------------------------------------------------------------- fBM

Eigen::MatrixXd fbm_covariance(const std::vector<double>& times, double hurst) {
    const auto n = static_cast<Eigen::Index>(times.size());
    const double h2 = 2.0 * hurst;
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double t = times[static_cast<std::size_t>(i)], s = times[static_cast<std::size_t>(j)];
            const double v = 0.5 * (std::pow(std::abs(t), h2) + std::pow(std::abs(s), h2) - std::pow(std::abs(t - s), h2));
            cov(i, j) = v;
            cov(j, i) = v;
        }
    return cov;
}

PathSample simulate_fbm_pair(const FbmSpec& spec, const SimConfig& cfg) {
    spec.validate();
    cfg.validate();
    const TimeGrid grid = TimeGrid::uniform(cfg.n_steps, cfg.horizon);
    const double dt = cfg.horizon / static_cast<double>(cfg.n_steps - 1);
    std::vector<double> times(grid.points().begin() + 1, grid.points().end());
    const Eigen::MatrixXd cov = fbm_covariance(times, spec.hurst);
    const auto m = static_cast<Eigen::Index>(times.size());

    Eigen::MatrixXd chol;
    const double scale = cov.diagonal().mean();
    bool ok = false;
    for (double jitter : {0.0, 1e-12, 1e-10, 1e-8}) {
        Eigen::LLT<Eigen::MatrixXd> llt(cov + jitter * scale * Eigen::MatrixXd::Identity(m, m));
        if (llt.info() == Eigen::Success) {
            chol = llt.matrixL();
            ok = true;
            break;
        }
    }
    if (!ok) throw NumericError("fbm covariance is not positive definite after jitter");

    std::vector<Path> paths;
    paths.reserve(cfg.n_paths);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z1(m), z2(m);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        Rng rng = make_rng(cfg.seed, {kPathStream, p});
        Eigen::VectorXd x0 = draw_initial(spec.x0, rng);
        for (Eigen::Index k = 0; k < m; ++k) z1(k) = normal(rng);
        for (Eigen::Index k = 0; k < m; ++k) z2(k) = normal(rng);
        const Eigen::VectorXd b1 = chol.triangularView<Eigen::Lower>() * z1;
        const Eigen::VectorXd b2 = chol.triangularView<Eigen::Lower>() * z2;

        Eigen::MatrixXd vals(static_cast<Eigen::Index>(cfg.n_steps), 2);
        double x = x0(0), y = x0(1), prev1 = 0.0, prev2 = 0.0;
        vals(0, 0) = x;
        vals(0, 1) = y;
        for (Eigen::Index k = 0; k < m; ++k) {
            const double db1 = b1(k) - prev1, db2 = b2(k) - prev2;
            prev1 = b1(k);
            prev2 = b2(k);
            const double xn = x + spec.d1 * db1;
            y = y + spec.a21 * x * dt + spec.d2 * db2;
            x = xn;
            vals(k + 1, 0) = x;
            vals(k + 1, 1) = y;
        }
        Eigen::VectorXd last = vals.row(m).transpose();
        check_finite_row(last, p, grid.back());
        paths.emplace_back(grid, std::move(vals));
    }
    return PathSample(std::move(paths), CoordMap::identity(2));
}

// ---------------------------------------------------------------- functional data

double fda_beta(double s, double t, double c1, double c2) {
    return 8.0 * (s - c1) * (s - c1) - 8.0 * (t - c2) * (t - c2);
}

Eigen::VectorXd historical_integral(const std::vector<double>& times, const Eigen::VectorXd& x, double c1, double c2) {
    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 1; i < n; ++i) {
        const double t = times[static_cast<std::size_t>(i)];
        double acc = 0.0;
        for (Eigen::Index l = 0; l < i; ++l) {
            const double s0 = times[static_cast<std::size_t>(l)], s1 = times[static_cast<std::size_t>(l + 1)];
            acc += 0.5 * (s1 - s0) * (x(l) * fda_beta(s0, t, c1, c2) + x(l + 1) * fda_beta(s1, t, c1, c2));
        }
        out(i) = acc;
    }
    return out;
}

PathSample generate_fda_sample(const Dag& g, const FdaSpec& spec, const SimConfig& cfg) {
    spec.validate();
    cfg.validate();
    const int d = g.d();
    const TimeGrid grid = TimeGrid::uniform(cfg.n_steps, cfg.horizon);
    const auto n = static_cast<Eigen::Index>(cfg.n_steps);

    // Per-dataset mechanism: kernel centres per parent node.
    Rng mech = make_rng(cfg.seed, {kFdaMechanism});
    std::vector<std::pair<double, double>> centres(static_cast<std::size_t>(d));
    for (auto& c : centres) c = {uniform(mech, 0.0, 1.0), uniform(mech, 0.0, 1.0)};

    // Topological order (loops are irrelevant here).
    std::vector<int> order;
    std::vector<int> indeg(static_cast<std::size_t>(d), 0);
    for (const auto& [i, j] : g.edges()) ++indeg[static_cast<std::size_t>(j)];
    for (int k = 0; k < d; ++k)
        if (indeg[static_cast<std::size_t>(k)] == 0) order.push_back(k);
    for (std::size_t q = 0; q < order.size(); ++q)
        for (int c : g.children(order[q]))
            if (--indeg[static_cast<std::size_t>(c)] == 0) order.push_back(c);

    // Rescaled time in [0, 1] for the basis and the kernel.
    std::vector<double> u(grid.points());
    for (double& v : u) v /= cfg.horizon;

    std::vector<Path> paths;
    paths.reserve(cfg.n_paths);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        Rng rng = make_rng(cfg.seed, {kPathStream, p});
        Eigen::MatrixXd vals = Eigen::MatrixXd::Zero(n, d);
        for (int k : order) {
            NodeSet pa = g.parents(k);
            Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
            if (pa.empty()) {
                for (int m = 1; m <= spec.m_basis; ++m) {
                    const double coef = normal(rng);
                    const int freq = m / 2;
                    for (Eigen::Index i = 0; i < n; ++i) {
                        const double t = u[static_cast<std::size_t>(i)];
                        double phi = 1.0;
                        if (m > 1)
                            phi = std::numbers::sqrt2 * ((m % 2 == 0) ? std::sin(2.0 * std::numbers::pi * freq * t)
                                                                      : std::cos(2.0 * std::numbers::pi * freq * t));
                        x(i) += coef * phi;
                    }
                }
            } else {
                for (int par : pa) {
                    const auto& [c1, c2] = centres[static_cast<std::size_t>(par)];
                    x += spec.a * historical_integral(u, vals.col(par), c1, c2);
                }
            }
            for (Eigen::Index i = 0; i < n; ++i) x(i) += spec.noise_sd * normal(rng);
            vals.col(k) = x;
        }
        paths.emplace_back(grid, std::move(vals));
    }
    return PathSample(std::move(paths), CoordMap::identity(d));
}

// ---------------------------------------------------------------- families

namespace {

struct FamilyEntry {
    Family family;
    const char* name;
};

constexpr FamilyEntry kFamilies[] = {
    {Family::linear_drift, "linear-drift"},
    {Family::diffusion, "diffusion"},
    {Family::path_dependence, "path-dependence"},
    {Family::nonlinear, "nonlinear"},
    {Family::causal_discovery, "causal-discovery"},
    {Family::linear_power, "linear-power"},
    {Family::fbm, "fbm"},
    {Family::fda, "fda"},
};

}  // namespace

Family parse_family(const std::string& name) {
    for (const auto& e : kFamilies)
        if (name == e.name) return e.family;
    throw UsageError("unknown family '" + name + "'");
}

std::string family_name(Family f) {
    for (const auto& e : kFamilies)
        if (e.family == f) return e.name;
    return "?";
}

std::vector<std::string> family_names() {
    std::vector<std::string> out;
    for (const auto& e : kFamilies) out.emplace_back(e.name);
    return out;
}

GeneratorSpec sample_params(Family family, Rng& rng, const FamilyOptions& opts) {
    switch (family) {
        case Family::linear_drift: {
            LinearSdeSpec s = LinearSdeSpec::zeros(2);
            s.A(1, 0) = uniform(rng, 1.0, 2.5);
            s.A(0, 0) = uniform(rng, -0.5, 0.5);
            s.A(1, 1) = uniform(rng, -0.5, 0.5);
            s.dvec << uniform(rng, 0.1, 0.2), uniform(rng, 0.1, 0.2);
            s.x0 = default_initial_laws(2);
            Digraph truth = s.dependence_graph();
            return {family, std::move(s), std::move(truth), std::nullopt};
        }
        case Family::diffusion: {
            LinearSdeSpec s = LinearSdeSpec::zeros(2);
            s.A(0, 0) = uniform(rng, 0.5, 1.0);
            s.A(1, 1) = uniform(rng, 0.5, 1.0);
            s.B(1, 0) = uniform(rng, 1.0, 4.5);
            s.x0 = default_initial_laws(2);
            Digraph truth = s.dependence_graph();
            return {family, std::move(s), std::move(truth), std::nullopt};
        }
        case Family::path_dependence: {
            PathDependentSpec s;
            s.a23 = uniform_signed(rng, 1.0, 3.5);
            s.a31 = uniform_signed(rng, 1.0, 3.5);
            s.d1 = uniform(rng, 0.1, 0.2);
            s.d2 = uniform(rng, 0.1, 0.2);
            const Edge e[] = {{0, 1}};
            return {family, s, Digraph(2, e), std::nullopt};
        }
        case Family::nonlinear: {
            NonlinearSpec s;
            s.omega = uniform(rng, 6.0 * std::numbers::pi, 8.0 * std::numbers::pi);
            s.r = uniform(rng, 0.5, 1.0);
            s.dvec << uniform(rng, 2.0, 2.5), uniform(rng, 2.0, 2.5);
            const Edge e[] = {{0, 1}};
            return {family, s, Digraph(2, e), std::nullopt};
        }
        case Family::causal_discovery: {
            if (opts.d < 1) throw UsageError("causal-discovery family: d must be >= 1");
            Dag g = sample_er_dag(opts.d, opts.edge_prob, 0.0, rng);
            LinearSdeSpec s = LinearSdeSpec::zeros(opts.d);
            for (const auto& [i, j] : g.edges()) s.A(j, i) = uniform_signed(rng, 1.0, 2.0);
            for (int k = 0; k < opts.d; ++k) s.A(k, k) = uniform(rng, -0.5, 0.5);
            for (int k = 0; k < opts.d; ++k) s.dvec(k) = uniform(rng, 0.1, 0.2);
            s.x0 = default_initial_laws(opts.d);
            Digraph truth = s.dependence_graph();
            return {family, std::move(s), std::move(truth), std::nullopt};
        }
        case Family::linear_power: {
            LinearSdeSpec s = LinearSdeSpec::zeros(2);
            s.A(1, 1) = uniform(rng, 0.5, 1.0);
            s.A(1, 0) = opts.power_ratio * s.A(1, 1);
            s.A(0, 0) = uniform(rng, -0.5, 0.5);
            s.dvec << 0.4, 0.4;
            s.x0 = default_initial_laws(2);
            Digraph truth = s.dependence_graph();
            return {family, std::move(s), std::move(truth), std::nullopt};
        }
        case Family::fbm: {
            FbmSpec s;
            s.hurst = opts.hurst;
            s.a21 = uniform(rng, -2.0, 2.0);
            s.d1 = uniform(rng, -2.0, 2.0);
            s.d2 = uniform(rng, -2.0, 2.0);
            Digraph truth(2);
            if (s.a21 != 0.0) truth.set_edge(0, 1);
            return {family, s, std::move(truth), std::nullopt};
        }
        case Family::fda: {
            Dag g = sample_er_dag(opts.d, opts.edge_prob, 0.0, rng);
            Digraph truth = g;
            return {family, FdaSpec{}, std::move(truth), std::move(g)};
        }
    }
    throw UsageError("unknown family");
}

PathSample simulate(const GeneratorSpec& spec, const SimConfig& cfg) {
    return std::visit(
        [&](const auto& p) -> PathSample {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LinearSdeSpec>) return simulate_linear(p, cfg);
            if constexpr (std::is_same_v<T, NonlinearSpec>) return simulate_nonlinear(p, cfg);
            if constexpr (std::is_same_v<T, PathDependentSpec>) return simulate_path_dependent(p, cfg);
            if constexpr (std::is_same_v<T, FbmSpec>) return simulate_fbm_pair(p, cfg);
            if constexpr (std::is_same_v<T, FdaSpec>) {
                if (!spec.fda_graph) throw UsageError("fda generator requires a DAG");
                return generate_fda_sample(*spec.fda_graph, p, cfg);
            }
        },
        spec.params);
}

namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json laws_json(const std::vector<InitialLaw>& laws) {
    json out = json::array();
    for (const auto& l : laws) out.push_back({{"mean", l.mean}, {"sd", l.sd}});
    return out;
}

}  // namespace

std::string generator_spec_to_json(const GeneratorSpec& spec, int indent) {
    json j;
    j["family"] = family_name(spec.family);
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LinearSdeSpec>) {
                j["A"] = matrix_json(p.A);
                j["c"] = vector_json(p.c);
                j["B"] = matrix_json(p.B);
                j["dvec"] = vector_json(p.dvec);
                j["x0"] = laws_json(p.x0);
            } else if constexpr (std::is_same_v<T, NonlinearSpec>) {
                j["omega"] = p.omega;
                j["r"] = p.r;
                j["dvec"] = vector_json(p.dvec);
                j["x0"] = laws_json(p.x0);
            } else if constexpr (std::is_same_v<T, PathDependentSpec>) {
                j["a23"] = p.a23;
                j["a31"] = p.a31;
                j["d1"] = p.d1;
                j["d2"] = p.d2;
                j["x0"] = laws_json(p.x0);
            } else if constexpr (std::is_same_v<T, FbmSpec>) {
                j["hurst"] = p.hurst;
                j["a21"] = p.a21;
                j["d1"] = p.d1;
                j["d2"] = p.d2;
                j["x0"] = laws_json(p.x0);
            } else {
                j["m_basis"] = p.m_basis;
                j["a"] = p.a;
                j["noise_sd"] = p.noise_sd;
            }
        },
        spec.params);
    return j.dump(indent);
}

}  // namespace sigcausal
