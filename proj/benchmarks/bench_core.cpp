#include <lossless/lossless.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace lossless;

static void BM_SimulateHarmonic(benchmark::State& state)
{
    const auto real = build_KN(1.0, 10.0, static_cast<std::size_t>(state.range(0)));
    const auto grid = uniform_grid(0.0, 10.0, 2001);
    const auto u = inputs::one_minus_cos(1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(apply_KN(real, u, grid));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SimulateHarmonic)->RangeMultiplier(2)->Range(25, 400)->Complexity();

static void BM_SimulateDense(benchmark::State& state)
{
    const auto n = static_cast<Eigen::Index>(state.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            M(i, j) = nd(rng);
    const auto sys = make_lossless(M - M.transpose(), Eigen::VectorXd::Ones(n));
    const auto grid = uniform_grid(0.0, 100.0, 10001);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(n);
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate(sys, InputSignal::zero(), x0, grid));
}
BENCHMARK(BM_SimulateDense)->Arg(10)->Arg(50)->Arg(201)->Unit(benchmark::kMillisecond);

static void BM_Ensemble(benchmark::State& state)
{
    const auto real = build_KN(1.0, 10.0, 100);
    const auto spec = thermal_ensemble(real.dim(), 0.5, static_cast<std::size_t>(state.range(0)), 1);
    const auto grid = uniform_grid(0.0, 10.0, 21);
    for (auto _ : state)
        benchmark::DoNotOptimize(ensemble_simulate(real, spec, InputSignal::zero(), grid));
}
BENCHMARK(BM_Ensemble)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_FourierCoefficients(benchmark::State& state)
{
    const auto g = ImpulseResponse::damped_cosine(1.0, 1.0, 3.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(fourier_coeffs(g, 10.0, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_FourierCoefficients)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Certificate(benchmark::State& state)
{
    const auto g = ImpulseResponse::exponential(1.0, 1.0);
    CertificateOptions opts;
    opts.requested_tau = 5.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(build_certificate(g, 0.05, opts));
}
BENCHMARK(BM_Certificate)->Unit(benchmark::kMillisecond);

static void BM_NoisySimulation(benchmark::State& state)
{
    Eigen::Matrix2d J;
    J << 0, 1, -1, 0;
    const auto meas = measure(make_lossless(J, Eigen::Vector2d(1, 0)), 1.0, 1.0);
    std::vector<double> grid(100001);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = 1e-3 * static_cast<double>(i);
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_noisy(meas.dynamics, InputSignal::zero(), grid, 7));
}
BENCHMARK(BM_NoisySimulation)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
