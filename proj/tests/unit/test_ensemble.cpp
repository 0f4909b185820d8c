#include <lossless/ensemble.hpp>
#include <lossless/errors.hpp>
#include <lossless/harmonic.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace lossless;

namespace {

LosslessSystem random_system(Eigen::Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    auto r = oracle::random_lossless(n, rng);
    return make_lossless(r.J, r.B);
}

// kappa_N(t) = k / (2 tau) + sum_l (k / tau) cos(l pi t / tau)
double kappa(double k, double tau, std::size_t N, double t)
{
    double s = k / (2.0 * tau);
    for (std::size_t l = 1; l <= N; ++l)
        s += k / tau * std::cos(l * oracle::pi * t / tau);
    return s;
}

} // namespace

TEST(CovarianceExact, ThermalLawOnBareSystem)
{
    const auto sys = random_system(6, 1);
    const double T = 1.7;
    const Eigen::MatrixXd X = T * Eigen::MatrixXd::Identity(6, 6);
    for (auto [s, t] : {std::pair{0.0, 1.0}, std::pair{2.0, 0.5}, std::pair{3.0, 3.0}}) {
        const double ref = T * sys.B().dot(oracle::expm(sys.J() * (t - s)) * sys.B());
        EXPECT_NEAR(covariance_exact(sys, X, s, t), ref, 1e-12);
    }
}

TEST(CovarianceExact, ZeroCovariance)
{
    const auto real = build_KN(1.0, 10.0, 8);
    const Eigen::MatrixXd X = Eigen::MatrixXd::Zero(real.dim(), real.dim());
    EXPECT_EQ(covariance_exact(real, X, 1.0, 2.0), 0.0);
}

TEST(CovarianceExact, EqualTimesOnHarmonicRealization)
{
    const double k = 1.5, tau = 10.0, T = 0.5;
    const std::size_t N = 30;
    const auto real = build_KN(k, tau, N);
    const Eigen::MatrixXd X = T * Eigen::MatrixXd::Identity(real.dim(), real.dim());
    for (double t : {0.0, 2.0, 7.5})
        EXPECT_NEAR(covariance_exact(real, X, t, t), 2.0 * T * kappa(k, tau, N, 0.0), 1e-12);
}

TEST(CovarianceExact, RejectsDimensionMismatch)
{
    const auto real = build_KN(1.0, 10.0, 2);
    EXPECT_THROW(covariance_exact(real, Eigen::MatrixXd::Identity(3, 3), 0.0, 1.0), InvalidArgument);
}

TEST(EnsembleProperty, ThermalCovarianceIsStationary)
{
    const auto real = build_KN(1.0, 10.0, 25);
    const Eigen::MatrixXd X = 0.8 * Eigen::MatrixXd::Identity(real.dim(), real.dim());
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ud(0.0, 20.0);
    for (int i = 0; i < 200; ++i) {
        const double s = ud(rng), t = ud(rng), shift = ud(rng);
        EXPECT_NEAR(covariance_exact(real, X, s, t), covariance_exact(real, X, s + shift, t + shift),
                    1e-10);
    }
}

TEST(EnsembleProperty, WhiteningLimit)
{
    const double k = 1.0, tau = 10.0, T = 0.5;
    const std::size_t N = 500;
    const auto real = build_KN(k, tau, N);
    const Eigen::MatrixXd X = T * Eigen::MatrixXd::Identity(real.dim(), real.dim());
    auto phi = [](double d) { return std::exp(-d * d); };
    for (double d : uniform_grid(0.0, tau, 401))
        EXPECT_NEAR(covariance_exact(real, X, 0.0, d), 2.0 * T * kappa(k, tau, N, d), 1e-10);
    // Pair the lag covariance with phi over one period of the kernel.
    const double series_pairing = oracle::integrate(
        [&](double d) { return 2.0 * T * kappa(k, tau, N, d) * phi(d); }, -tau, tau, 2000);
    const double limit = 2.0 * T * k * phi(0.0);
    EXPECT_LE(std::abs(series_pairing - limit) / limit, 0.05);
}

TEST(EnsembleSimulate, ZeroCovarianceHasZeroVariance)
{
    const auto real = build_KN(1.0, 10.0, 10);
    EnsembleSpec spec;
    spec.mean0 = Eigen::VectorXd::Ones(real.dim());
    spec.X = Eigen::MatrixXd::Zero(real.dim(), real.dim());
    spec.trials = 20;
    spec.base_seed = 5;
    const auto est = ensemble_simulate(real, spec, inputs::sine(1.0), uniform_grid(0.0, 10.0, 11));
    EXPECT_LT(est.R_hat.cwiseAbs().maxCoeff(), 1e-24);
}

TEST(EnsembleSimulate, CovarianceWithinFiveStandardErrors)
{
    const auto real = build_KN(1.0, 10.0, 100);
    const auto spec = thermal_ensemble(real.dim(), 0.5, 10000, 42);
    const auto grid = uniform_grid(0.0, 10.0, 11);
    const auto est = ensemble_simulate(real, spec, InputSignal::zero(), grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i; j < grid.size(); ++j) {
            const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
            const double exact = covariance_exact(real, spec.X, grid[i], grid[j]);
            EXPECT_LE(std::abs(est.R_hat(ii, jj) - exact), 5.0 * est.stderr(ii, jj));
            EXPECT_EQ(est.R_hat(ii, jj), est.R_hat(jj, ii));
        }
}

TEST(EnsembleSimulate, MeanFollowsDeterministicPart)
{
    const auto real = build_KN(1.0, 10.0, 20);
    std::mt19937_64 rng(9);
    EnsembleSpec spec;
    spec.mean0 = oracle::random_vector(real.dim(), rng);
    spec.X = 0.3 * Eigen::MatrixXd::Identity(real.dim(), real.dim());
    spec.trials = 4000;
    spec.base_seed = 100;
    const auto grid = uniform_grid(0.0, 10.0, 21);
    const auto u = inputs::one_minus_cos(0.8);
    const auto est = ensemble_simulate(real, spec, u, grid);
    const auto mean = deterministic_response(real.sys, spec.mean0, u, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        EXPECT_LE(std::abs(est.mean(ii) - mean[i]), 3.0 * est.mean_stderr(ii) + 1e-12);
    }
}

TEST(EnsembleSimulate, ParallelRunMatchesSerialBitwise)
{
    const auto real = build_KN(1.0, 10.0, 15);
    const auto spec = thermal_ensemble(real.dim(), 1.0, 301, 7);
    const auto grid = uniform_grid(0.0, 10.0, 9);
    const auto serial = ensemble_simulate(real, spec, InputSignal::zero(), grid, {1});
    const auto parallel = ensemble_simulate(real, spec, InputSignal::zero(), grid, {4});
    EXPECT_EQ(serial.R_hat, parallel.R_hat);
    EXPECT_EQ(serial.mean, parallel.mean);
}

TEST(EnsembleSimulate, ValidatesSpec)
{
    const auto real = build_KN(1.0, 10.0, 2);
    const Eigen::Index n = real.dim();
    auto spec = thermal_ensemble(n, 1.0, 1, 0);
    EXPECT_THROW(validate(spec, n), InvalidArgument);
    spec.trials = 10;
    EXPECT_NO_THROW(validate(spec, n));
    spec.X(0, 1) = 0.5;
    EXPECT_THROW(validate(spec, n), InvalidArgument);
    spec.X = -Eigen::MatrixXd::Identity(n, n);
    EXPECT_THROW(validate(spec, n), InvalidArgument);
    EXPECT_THROW(validate(thermal_ensemble(n + 1, 1.0, 10, 0), n), InvalidArgument);
}

TEST(EnsembleProperty, MonteCarloRateIsInverseSquareRoot)
{
    const auto real = build_KN(1.0, 10.0, 5);
    const auto grid = uniform_grid(0.0, 10.0, 11);
    auto pooled_deviation = [&](std::size_t trials) {
        std::vector<double> dev;
        for (std::uint64_t rep = 0; rep < 40; ++rep) {
            const auto spec = thermal_ensemble(real.dim(), 1.0, trials, 1000000 * (rep + 1));
            const auto est = ensemble_simulate(real, spec, InputSignal::zero(), grid);
            for (std::size_t i = 0; i < grid.size(); ++i)
                for (std::size_t j = i; j < grid.size(); ++j)
                    dev.push_back(std::abs(est.R_hat(static_cast<Eigen::Index>(i),
                                                      static_cast<Eigen::Index>(j)) -
                                           covariance_exact(real, spec.X, grid[i], grid[j])));
        }
        return oracle::median(dev);
    };
    const double ratio = pooled_deviation(2000) / pooled_deviation(1000);
    EXPECT_GE(ratio, 0.6);
    EXPECT_LE(ratio, 0.8);
}

TEST(CheckTemperature, ScaledIdentity)
{
    const auto real = build_KN(1.0, 10.0, 12);
    const auto res = check_temperature(real.sys, 2.0 * Eigen::MatrixXd::Identity(real.dim(), real.dim()));
    EXPECT_TRUE(res.is_thermal);
    ASSERT_TRUE(res.temperature.has_value());
    EXPECT_NEAR(*res.temperature, 2.0, 1e-12);
    EXPECT_TRUE(res.sufficient_condition());
}

TEST(CheckTemperature, GenericDiagonalIsNotThermal)
{
    const auto real = build_KN(1.0, 10.0, 12);
    Eigen::VectorXd d(real.dim());
    for (Eigen::Index i = 0; i < d.size(); ++i)
        d(i) = 1.0 + static_cast<double>(i);
    const auto res = check_temperature(real.sys, d.asDiagonal().toDenseMatrix());
    EXPECT_FALSE(res.is_thermal);
    EXPECT_FALSE(res.temperature.has_value());
    EXPECT_GT(res.max_defect, 1e-8);
    EXPECT_FALSE(res.commutes);
}

TEST(CheckTemperature, WhiteNoiseLawHasTemperatureIkOverTau)
{
    const double k = 2.0, tau = 5.0, i = 0.7;
    const auto real = build_KN(k, tau, 15);
    const auto X = whitenoise_covariance(real, i, 2.0 * tau);
    const auto res = check_temperature(real.sys, X);
    EXPECT_TRUE(res.is_thermal);
    ASSERT_TRUE(res.temperature.has_value());
    EXPECT_NEAR(*res.temperature, i * k / tau, 1e-12);
}

TEST(Maxent, EquipartitionExample)
{
    const auto st = maxent_covariance(10.5, 21);
    EXPECT_EQ(st.temperature, 1.0);
    EXPECT_EQ(st.X, Eigen::MatrixXd::Identity(21, 21));
}

TEST(Maxent, ZeroEnergy)
{
    const auto st = maxent_covariance(0.0, 7);
    EXPECT_EQ(st.temperature, 0.0);
    EXPECT_EQ(st.X, Eigen::MatrixXd::Zero(7, 7));
    EXPECT_THROW(maxent_covariance(-1.0, 7), InvalidArgument);
    EXPECT_THROW(maxent_covariance(1.0, 0), InvalidArgument);
}

TEST(Maxent, HalfTraceEqualsEnergy)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ed(0.0, 50.0);
    for (Eigen::Index n : {1, 2, 5, 21, 40, 101}) {
        const double E = ed(rng);
        const auto st = maxent_covariance(E, n);
        // trace accumulates n rounded diagonal entries
        EXPECT_NEAR(0.5 * st.X.trace(), E, 2.0 * static_cast<double>(n) * 1.2e-16 * E);
        EXPECT_DOUBLE_EQ(st.temperature, 2.0 * E / static_cast<double>(n));
    }
}

TEST(EnsembleProperty, MaxentMaximisesEntropyAmongDiagonals)
{
    const double E = 6.0;
    const Eigen::Index n = 9;
    const double best = gaussian_entropy(maxent_covariance(E, n).X);
    EXPECT_NEAR(best, 0.5 * n * std::log(2.0 * oracle::pi * std::exp(1.0) * 2.0 * E / n), 1e-12);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ud(0.05, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd d(n);
        for (Eigen::Index i = 0; i < n; ++i)
            d(i) = ud(rng);
        d *= 2.0 * E / d.sum();
        EXPECT_LT(gaussian_entropy(d.asDiagonal().toDenseMatrix()), best);
    }
}

TEST(WhiteNoise, DoubleRecurrenceWindowGivesScaledIdentity)
{
    const auto real = build_KN(1.0, oracle::pi, 10);
    const auto X = whitenoise_covariance(real, 1.0, 2.0 * oracle::pi);
    const Eigen::MatrixXd ref = Eigen::MatrixXd::Identity(real.dim(), real.dim()) / oracle::pi;
    EXPECT_LT((X - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WhiteNoise, ZeroIntensity)
{
    const auto real = build_KN(1.0, 4.0, 6);
    EXPECT_EQ(whitenoise_covariance(real, 0.0, 3.0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(whitenoise_covariance(real, 1.0, 0.0), InvalidArgument);
}

TEST(WhiteNoise, LongWindowBound)
{
    const double k = 1.0, tau = 3.0, i = 1.0;
    const auto real = build_KN(k, tau, 8);
    const double h = 20.0 * tau;
    const auto X = whitenoise_covariance(real, i, h);
    const Eigen::MatrixXd lim = (i * k / tau) * Eigen::MatrixXd::Identity(real.dim(), real.dim());
    EXPECT_LE((X - lim).cwiseAbs().maxCoeff(), (i * k / tau) * (2.0 * tau / h));
}

TEST(WhiteNoise, MatchesGramianQuadrature)
{
    const double k = 1.2, tau = 2.0, i = 0.9, h = 3.7 * tau;
    const auto real = build_KN(k, tau, 4);
    const auto X = whitenoise_covariance(real, i, h);
    const Eigen::VectorXd BN = real.sys.B() / std::sqrt(2.0);
    const Eigen::MatrixXd& J = real.sys.J();
    const Eigen::Index n = real.dim();
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = r; c < n; ++c) {
            const double ref = (2.0 * i / h) * oracle::integrate(
                                                   [&](double s) {
                                                       const Eigen::VectorXd v =
                                                           oracle::expm(-J * s) * BN;
                                                       return v(r) * v(c);
                                                   },
                                                   -h, 0.0, 60);
            EXPECT_NEAR(X(r, c), ref, 1e-10);
        }
}

TEST(FluctuationDissipation, ThermalRandomSystem)
{
    const auto sys = random_system(7, 21);
    const auto lags = uniform_grid(0.0, 8.0, 81);
    const auto rep = fluctuation_dissipation_check(sys, 1.3 * Eigen::MatrixXd::Identity(7, 7), lags, 2.0);
    EXPECT_TRUE(rep.checked);
    EXPECT_LE(rep.max_defect, 1e-8);
}

TEST(FluctuationDissipation, ZeroTemperature)
{
    const auto real = build_KN(1.0, 10.0, 5);
    const auto lags = uniform_grid(0.0, 5.0, 11);
    const auto rep = fluctuation_dissipation_check(
        real.sys, Eigen::MatrixXd::Zero(real.dim(), real.dim()), lags);
    EXPECT_TRUE(rep.checked);
    for (double c : rep.covariance)
        EXPECT_EQ(c, 0.0);
    EXPECT_EQ(rep.max_defect, 0.0);
}

TEST(FluctuationDissipation, HarmonicRealizationAtTemperatureTwo)
{
    const auto real = build_KN(1.0, 10.0, 50);
    const auto lags = uniform_grid(0.0, 10.0, 201);
    const auto rep = fluctuation_dissipation_check(
        real.sys, 2.0 * Eigen::MatrixXd::Identity(real.dim(), real.dim()), lags, 3.0);
    ASSERT_TRUE(rep.checked);
    EXPECT_LE(rep.max_defect, 1e-8);
    const auto h = simulate_impulse_response(real.sys, lags);
    for (std::size_t i = 0; i < lags.size(); ++i)
        EXPECT_NEAR(rep.covariance[i] / 2.0, h[i], 1e-8);
}

TEST(FluctuationDissipation, NonThermalIsSkipped)
{
    const auto real = build_KN(1.0, 10.0, 5);
    Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(real.dim(), 1.0, 3.0);
    const auto lags = uniform_grid(0.0, 5.0, 11);
    const auto rep =
        fluctuation_dissipation_check(real.sys, d.asDiagonal().toDenseMatrix(), lags);
    EXPECT_FALSE(rep.checked);
    EXPECT_FALSE(rep.note.empty());
}

TEST(BandLimited, JohnsonNyquistAtUnitGain)
{
    const double k = 1.0, T = 0.5, B = 1.0;
    const auto real = build_KN(k, 10.0, 100);
    const auto spec = thermal_ensemble(real.dim(), T, 2000, 11);
    const auto band = band_limited_variance(real, spec, B);
    EXPECT_NEAR(band.spectral_integral, 4.0 * T * k * B, 0.1 * 4.0 * T * k * B);
    EXPECT_NEAR(band.filtered_variance, band.spectral_integral / (2.0 * oracle::pi), 1e-12);
}
