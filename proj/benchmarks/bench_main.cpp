#include <benchmark/benchmark.h>

#include <sigcausal/assignment.hpp>
#include <sigcausal/graph.hpp>
#include <sigcausal/sig_kernel.hpp>

using namespace sigcausal;

namespace {

std::vector<Path> brownian_paths(std::size_t n, std::size_t steps, int dim) {
    Rng rng(42);
    std::normal_distribution<double> n01;
    std::vector<Path> out;
    const double sd = std::sqrt(1.0 / static_cast<double>(steps - 1));
    for (std::size_t p = 0; p < n; ++p) {
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(steps), dim);
        for (Eigen::Index r = 1; r < v.rows(); ++r)
            for (int c = 0; c < dim; ++c) v(r, c) = v(r - 1, c) + sd * n01(rng);
        out.emplace_back(TimeGrid::uniform(steps, 1.0), v);
    }
    return out;
}

void BM_SigKernelPde(benchmark::State& state) {
    const auto ps = brownian_paths(2, static_cast<std::size_t>(state.range(0)), 2);
    KernelConfig k;
    k.lifting = Lifting::rbf;
    k.refinement = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(sig_kernel_pde(ps[0], ps[1], k));
}
BENCHMARK(BM_SigKernelPde)->ArgsProduct({{32, 64, 128}, {0, 1, 2}});

void BM_Gram(benchmark::State& state) {
    const auto ps = brownian_paths(static_cast<std::size_t>(state.range(0)), 64, 2);
    KernelConfig k;
    k.lifting = Lifting::rbf;
    k.refinement = 0;
    for (auto _ : state) benchmark::DoNotOptimize(gram(std::span<const Path>(ps), k));
}
BENCHMARK(BM_Gram)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Derangement(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    Rng rng(7);
    Eigen::MatrixXd c(n, n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(solve_derangement(c));
}
BENCHMARK(BM_Derangement)->RangeMultiplier(2)->Range(32, 512)->Complexity(benchmark::oNCubed);

void BM_DSeparation(benchmark::State& state) {
    Rng rng(3);
    const int d = static_cast<int>(state.range(0));
    const Dag g = sample_er_dag(d, 0.2, 0.0, rng);
    const LiftedGraph lg = lift(g);
    const int a[] = {0}, b[] = {2 * d - 1};
    const NodeSet c{1, 2, d + 1};
    for (auto _ : state) benchmark::DoNotOptimize(d_separated(lg.graph(), a, b, c));
}
BENCHMARK(BM_DSeparation)->Arg(8)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
