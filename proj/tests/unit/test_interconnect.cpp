#include <lossless/errors.hpp>
#include <lossless/harmonic.hpp>
#include <lossless/interconnect.hpp>
#include <lossless/numerics.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace lossless;

namespace {

LosslessSystem rotation(double w = 1.0)
{
    Eigen::Matrix2d J;
    J << 0, w, -w, 0;
    return make_lossless(J, Eigen::Vector2d(1, 0));
}

LosslessSystem random_system(Eigen::Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    auto r = oracle::random_lossless(n, rng);
    return make_lossless(r.J, r.B);
}

std::vector<double> steps(double dt, std::size_t n)
{
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        g[i] = dt * static_cast<double>(i);
    return g;
}

} // namespace

TEST(Interconnect, EmptySecondSystemReturnsFirst)
{
    const auto sys = random_system(4, 1);
    const auto out = interconnect(sys, LosslessSystem{});
    EXPECT_EQ(out.J(), sys.J());
    EXPECT_EQ(out.B(), sys.B());
}

TEST(Interconnect, TwoRotationsBlockLayout)
{
    const auto out = interconnect(rotation(), rotation(2.0));
    ASSERT_EQ(out.dim(), 4);
    Eigen::Matrix4d J;
    J << 0, 1, -1, 0,
        -1, 0, 0, 0,
         1, 0, 0, 2,
         0, 0, -2, 0;
    EXPECT_EQ(Eigen::MatrixXd(J), out.J());
    EXPECT_EQ(out.B(), Eigen::Vector4d(1, 0, 0, 0));
    EXPECT_EQ((out.J() + out.J().transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Interconnect, SkewnessIsExactForRandomPairs)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto a = random_system(1 + static_cast<Eigen::Index>(seed % 5), seed);
        const auto b = random_system(2 + static_cast<Eigen::Index>(seed % 7), seed + 40);
        const auto c = interconnect(a, b);
        EXPECT_EQ((c.J() + c.J().transpose()).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Interconnect, AutonomousEnergyConserved)
{
    const auto c = interconnect(random_system(5, 3), build_KN(1.0, 10.0, 20).sys);
    std::mt19937_64 rng(2);
    const auto x0 = oracle::random_vector(c.dim(), rng);
    const auto tr = simulate(c, InputSignal::zero(), x0, uniform_grid(0.0, 100.0, 10001));
    for (std::size_t i = 0; i < tr.size(); ++i)
        EXPECT_NEAR(tr.energy(i), tr.energy(0), 1e-9 * std::max(1.0, tr.energy(0)));
}

TEST(HeatBath, ValidatesParameters)
{
    EXPECT_THROW(make_heat_bath(0.0, 1.0, 1.0), InvalidArgument);
    EXPECT_THROW(make_heat_bath(1.0, -1.0, 1.0), InvalidArgument);
    EXPECT_THROW(make_heat_bath(1.0, 1.0, 0.0), InvalidArgument);
    EXPECT_NO_THROW(make_heat_bath(1.0, 0.0, 1.0));
}

TEST(HeatBath, ZeroTemperatureRotationExample)
{
    const auto n = connect_heat_bath(rotation(), make_heat_bath(1.0, 0.0, 10.0));
    Eigen::Matrix2d A;
    A << -1, 1, -1, 0;
    EXPECT_EQ(n.A, Eigen::MatrixXd(A));
    EXPECT_EQ(n.B_noise.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(n.C, Eigen::VectorXd(Eigen::Vector2d(1, 0)));
    ASSERT_TRUE(n.horizon.has_value());
    EXPECT_EQ(*n.horizon, 10.0);
    Eigen::EigenSolver<Eigen::Matrix2d> es(A);
    std::vector<std::complex<double>> ev{es.eigenvalues()(0), es.eigenvalues()(1)};
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.imag() < b.imag(); });
    EXPECT_NEAR(ev[0].real(), -0.5, 1e-14);
    EXPECT_NEAR(ev[0].imag(), -std::sqrt(3.0) / 2.0, 1e-14);
    EXPECT_NEAR(ev[1].real(), -0.5, 1e-14);
    EXPECT_NEAR(ev[1].imag(), std::sqrt(3.0) / 2.0, 1e-14);
    EXPECT_NEAR(spectral_abscissa(n.A), -0.5, 1e-14);
}

TEST(HeatBath, WeakCouplingLimit)
{
    const auto sys = rotation();
    const auto n = connect_heat_bath(sys, make_heat_bath(1e-14, 3.0, 10.0));
    EXPECT_LT((n.A - sys.J()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT(n.B_noise.cwiseAbs().maxCoeff(), 1e-6);
    const auto m = connect_heat_bath(sys, make_heat_bath(2.0, 3.0, 10.0));
    EXPECT_NEAR(m.B_noise(0), -std::sqrt(2.0 * 2.0 * 3.0), 1e-14);
}

TEST(HeatBath, EnergyNonIncreasingWithoutNoise)
{
    const auto sys = random_system(6, 8);
    const auto n = connect_heat_bath(sys, make_heat_bath(0.7, 0.0, 50.0));
    std::mt19937_64 rng(1);
    const Eigen::VectorXd x0 = oracle::random_vector(6, rng);
    const auto tr = simulate_noisy(n, InputSignal::zero(), steps(0.01, 5000), 3, x0);
    for (Eigen::Index i = 1; i < tr.states.cols(); ++i)
        EXPECT_LE(0.5 * tr.states.col(i).squaredNorm(), 0.5 * tr.states.col(i - 1).squaredNorm() + 1e-9);
}

TEST(HeatBath, SpectralAbscissaNonPositive)
{
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> kd(0.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 1 + trial % 12;
        auto r = oracle::random_lossless(n, rng);
        if (trial % 3 == 0)
            r.B.tail(n / 2).setZero();
        const auto sys = make_lossless(r.J, r.B);
        const double k = trial % 10 == 0 ? 0.0 : kd(rng);
        const Eigen::MatrixXd A = sys.J() - k * sys.B() * sys.B().transpose();
        const double abscissa = spectral_abscissa(A);
        EXPECT_LE(abscissa, 1e-10);
        if (k > 0.0 && n <= 6 && sys.controllable().value_or(false))
            EXPECT_LT(abscissa, 0.0) << "n=" << n << " k=" << k;
    }
}

TEST(Measure, ZeroTemperatureIsNoiselessButDamped)
{
    const auto m = measure(rotation(), 2.0, 0.0);
    Eigen::Matrix2d A;
    A << -2, 1, -1, 0;
    EXPECT_EQ(m.dynamics.A, Eigen::MatrixXd(A));
    EXPECT_EQ(m.dynamics.B_noise.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(m.dynamics.D_noise, 0.0);
    EXPECT_LT(spectral_abscissa(m.dynamics.A), 0.0);
}

TEST(Measure, RejectsNonPositiveGain)
{
    EXPECT_THROW(measure(rotation(), 0.0, 1.0), InvalidArgument);
    EXPECT_THROW(measure(rotation(), -1.0, 1.0), InvalidArgument);
    EXPECT_THROW(measure(rotation(), 1.0, -1.0), InvalidArgument);
}

TEST(Measure, IntensityProductIndependentOfGain)
{
    for (double Tm : {0.3, 1.0, 4.0})
        for (double km : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
            const auto m = measure(rotation(), km, Tm);
            EXPECT_NEAR(m.process_intensity() * m.measurement_intensity(), 4.0 * Tm * Tm,
                        1e-12 * 4.0 * Tm * Tm);
            EXPECT_NEAR(m.cross_intensity(), 2.0 * Tm, 1e-12 * 2.0 * Tm);
            EXPECT_NEAR(m.dynamics.B_noise(0), -std::sqrt(2.0 * km * Tm), 1e-14);
            EXPECT_NEAR(m.dynamics.D_noise, std::sqrt(2.0 * Tm / km), 1e-12);
        }
}

TEST(Measure, SharedNoiseIntensitiesFromSimulation)
{
    const double Tm = 1.0, dt = 1e-3;
    const auto grid = steps(dt, 100000);
    for (double km : {0.1, 1.0, 10.0}) {
        const auto m = measure(rotation(), km, Tm);
        const auto path = simulate_noisy(m.dynamics, InputSignal::zero(), grid, 1234);
        const auto est = estimate_noise_intensities(m, path.noise_path, dt);
        EXPECT_NEAR(est.cross, 2.0 * Tm, 0.1 * 2.0 * Tm) << "k_m=" << km;
        EXPECT_NEAR(est.process, 2.0 * km * Tm, 0.1 * 2.0 * km * Tm);
        EXPECT_NEAR(est.measurement, 2.0 * Tm / km, 0.1 * 2.0 * Tm / km);
        EXPECT_NEAR(est.process * est.measurement, 4.0 * Tm * Tm, 0.2 * 4.0 * Tm * Tm);
    }
}

TEST(Measure, OutputCarriesTheSharedNoise)
{
    const auto m = measure(rotation(), 2.0, 0.5);
    const auto grid = steps(1e-2, 200);
    const auto path = simulate_noisy(m.dynamics, InputSignal::zero(), grid, 5);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double clean = m.dynamics.C.dot(path.states.col(static_cast<Eigen::Index>(i)));
        EXPECT_NEAR(path.outputs[i], clean + m.measurement_gain * path.noise_path[i], 1e-12);
    }
}

TEST(SimulateNoisy, RejectsNonUniformGrid)
{
    const auto n = connect_heat_bath(rotation(), make_heat_bath(1.0, 1.0, 10.0));
    const std::vector<double> grid{0.0, 0.1, 0.3};
    EXPECT_THROW(simulate_noisy(n, InputSignal::zero(), grid, 1), InvalidArgument);
}

TEST(SimulateNoisy, WarnsPastHorizon)
{
    const auto n = connect_heat_bath(rotation(), make_heat_bath(1.0, 1.0, 1.0));
    EXPECT_TRUE(simulate_noisy(n, InputSignal::zero(), steps(0.01, 50), 1).warnings.empty());
    EXPECT_FALSE(simulate_noisy(n, InputSignal::zero(), steps(0.01, 200), 1).warnings.empty());
}

TEST(SimulateNoisy, ZeroIntensityMatchesDeterministicSimulation)
{
    const auto sys = random_system(5, 12);
    NoisyLinearSystem n;
    n.A = sys.J();
    n.B_in = sys.B();
    n.B_noise = sys.B();
    n.C = sys.B();
    n.noise_intensity = 0.0;
    std::mt19937_64 rng(3);
    const Eigen::VectorXd x0 = oracle::random_vector(5, rng);
    const auto grid = steps(0.01, 1000);
    const auto u = inputs::one_minus_cos(1.1);
    const auto noisy = simulate_noisy(n, u, grid, 9, x0);
    const auto det = simulate(sys, u, x0, grid);
    for (std::size_t i = 0; i < grid.size(); i += 50)
        EXPECT_NEAR(noisy.outputs[i], det.outputs()[i], 1e-9);
}

TEST(SimulateNoisy, SameSeedReproducesPathsBitwise)
{
    const auto m = measure(random_system(4, 6), 1.5, 0.8);
    const auto grid = steps(1e-3, 5000);
    const auto a = simulate_noisy(m.dynamics, InputSignal::zero(), grid, 77);
    const auto b = simulate_noisy(m.dynamics, InputSignal::zero(), grid, 77);
    const auto c = simulate_noisy(m.dynamics, InputSignal::zero(), grid, 78);
    EXPECT_EQ(a.noise_path, b.noise_path);
    EXPECT_EQ(a.outputs, b.outputs);
    EXPECT_EQ(a.states, b.states);
    EXPECT_NE(a.noise_path, c.noise_path);
}

TEST(SimulateNoisy, StationaryVarianceSolvesLyapunovEquation)
{
    const double k = 1.0, T = 0.7, dt = 1e-3;
    const auto n = connect_heat_bath(rotation(), make_heat_bath(k, T, 1e9));
    const Eigen::MatrixXd Q = n.B_noise * n.B_noise.transpose() * n.noise_intensity;
    const Eigen::MatrixXd P = oracle::lyapunov(n.A, Q);
    const double expected = n.C.dot(P * n.C);
    EXPECT_NEAR(expected, T, 1e-12);

    // Start in the stationary law and estimate Var(C^T x) by batch means.
    const std::size_t total = 1000000, batches = 50;
    const Eigen::LLT<Eigen::MatrixXd> llt(P);
    std::mt19937_64 rng(2);
    const Eigen::VectorXd x0 = llt.matrixL() * oracle::random_vector(2, rng);
    const auto path = simulate_noisy(n, InputSignal::zero(), steps(dt, total), 31, x0);
    std::vector<double> batch(batches, 0.0);
    const std::size_t per = total / batches;
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * per; i < (b + 1) * per; ++i) {
            const double y = n.C.dot(path.states.col(static_cast<Eigen::Index>(i)));
            s += y * y;
        }
        batch[b] = s / static_cast<double>(per);
    }
    double mean = 0.0, var = 0.0;
    for (double v : batch)
        mean += v / batches;
    for (double v : batch)
        var += (v - mean) * (v - mean) / (batches - 1);
    const double stderr = std::sqrt(var / batches);
    EXPECT_LE(std::abs(mean - expected), 5.0 * stderr) << mean << " vs " << expected;
}

TEST(SimulateNoisy, NestedHarmonicBathMatchesDirectClosure)
{
    const double k = 1.0, T = 0.8, tau_b = 20.0;
    const std::size_t M = 300;
    const auto sys = rotation();
    const auto bath = build_KN(k, tau_b, M);
    const auto shell = interconnect(sys, bath.sys);
    const auto direct = connect_heat_bath(sys, make_heat_bath(k, T, tau_b));

    // System starts at rest, bath in its thermal law.
    Eigen::MatrixXd X0 = Eigen::MatrixXd::Zero(shell.dim(), shell.dim());
    X0.bottomRightCorner(bath.dim(), bath.dim()).setIdentity();
    X0 *= T;

    // Monte Carlo of the direct closure.
    const double dt = 1e-3;
    const std::size_t paths = 2000;
    const std::vector<double> probes{1.0, 3.0, 6.0};
    const auto grid = steps(dt, 6000);
    std::vector<std::vector<double>> y(probes.size());
    for (std::size_t p = 0; p < paths; ++p) {
        const auto tr = simulate_noisy(direct, InputSignal::zero(), grid, 5000 + p,
                                       Eigen::VectorXd(Eigen::Vector2d::Zero()));
        for (std::size_t j = 0; j < probes.size(); ++j)
            y[j].push_back(tr.states(0, std::lround(probes[j] / dt)));
    }

    for (std::size_t j = 0; j < probes.size(); ++j) {
        const double t = probes[j];
        const Eigen::MatrixXd Phi = propagator(shell, t);
        const Eigen::MatrixXd Pn = Phi * X0 * Phi.transpose();
        const double nested = Pn(0, 0);

        const Eigen::MatrixXd E = oracle::expm(direct.A * t);
        const double closed = T - T * (E * E.transpose())(0, 0);

        double m2 = 0.0, m4 = 0.0;
        for (double v : y[j]) {
            m2 += v * v / paths;
            m4 += v * v * v * v / paths;
        }
        const double se = std::sqrt((m4 - m2 * m2) / paths);
        EXPECT_LE(std::abs(m2 - nested), 5.0 * se + 0.02 * T) << "t=" << t;
        EXPECT_LE(std::abs(m2 - closed), 5.0 * se + 0.01 * T) << "t=" << t;
        EXPECT_NEAR(nested, closed, 0.02 * T) << "t=" << t;
    }
}
