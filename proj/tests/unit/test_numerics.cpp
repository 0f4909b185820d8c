#include <lossless/input_signal.hpp>
#include <lossless/numerics.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <limits>
#include <cstdint>

using namespace lossless;

TEST(PairwiseSum, ExactOnRepresentableData)
{
    // multiples of 2^-10 below 2^20: every partial sum is exact in double
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::int64_t> id(-(std::int64_t{1} << 30), std::int64_t{1} << 30);
    std::vector<double> v(100003);
    std::int64_t exact = 0;
    for (double& x : v) {
        const std::int64_t m = id(rng);
        exact += m;
        x = std::ldexp(static_cast<double>(m), -10);
    }
    EXPECT_EQ(pairwise_sum(v), std::ldexp(static_cast<double>(exact), -10));
    EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(PairwiseSum, WithinLogarithmicErrorBound)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    std::vector<double> v(100003);
    for (double& x : v)
        x = ud(rng) * std::pow(10.0, static_cast<int>(ud(rng) * 6));
    // Neumaier-compensated long double reference
    long double s = 0.0L, c = 0.0L, abs_sum = 0.0L;
    for (double x : v) {
        const long double t = s + x;
        c += std::fabs(s) >= std::fabs(static_cast<long double>(x)) ? (s - t) + x : (x - t) + s;
        s = t;
        abs_sum += std::fabs(x);
    }
    const double ref = static_cast<double>(s + c);
    const double bound = std::numeric_limits<double>::epsilon() * std::ceil(std::log2(v.size()))
                         * static_cast<double>(abs_sum);
    EXPECT_NEAR(pairwise_sum(v), ref, bound);
}

TEST(UniformGrid, EndpointsAreExact)
{
    const auto g = uniform_grid(0.5, 3.25, 12);
    ASSERT_EQ(g.size(), 12u);
    EXPECT_EQ(g.front(), 0.5);
    EXPECT_EQ(g.back(), 3.25);
}

TEST(Quadrature, SimpsonAndTrapezoidOnPolynomials)
{
    const auto g = uniform_grid(0.0, 2.0, 101);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        f[i] = g[i] * g[i] * g[i];
    EXPECT_NEAR(simpson_uniform(g[1] - g[0], f), 4.0, 1e-13);
    std::vector<double> lin(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        lin[i] = 3.0 * g[i] - 1.0;
    EXPECT_NEAR(trapezoid(g, lin), 4.0, 1e-13);
    const auto cum = cumulative_trapezoid(g, lin);
    EXPECT_EQ(cum.front(), 0.0);
    EXPECT_NEAR(cum[50], 1.5 - 1.0, 1e-13);
}

TEST(Quadrature, AdaptiveAgreesWithGaussLegendre)
{
    auto f = [](double t) { return std::exp(-t) * std::cos(7.0 * t) + 1.0 / (1.0 + t * t); };
    const auto r = integrate(f, 0.0, 10.0);
    EXPECT_NEAR(r.value, oracle::integrate(f, 0.0, 10.0, 400), 1e-12);
    EXPECT_LE(r.error, 1e-10);
}

TEST(Quadrature, CancellingIntegrandConverges)
{
    // int_0^{2 pi} sin(t) dt = 0; the tolerance is relative to int |f|, so this terminates fast.
    const auto r = integrate([](double t) { return std::sin(t); }, 0.0, 2.0 * oracle::pi);
    EXPECT_NEAR(r.value, 0.0, 1e-13);
    const auto p = integrate_panels([](double t) { return std::sin(40.0 * t); }, 0.0, oracle::pi, 40);
    EXPECT_NEAR(p.value, 0.0, 1e-12);
}

TEST(ParallelFor, CoversEveryIndexOnce)
{
    for (unsigned threads : {1u, 3u, 8u}) {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), {threads}, [&](std::size_t i) { hits[i] += 1; });
        EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 1000);
        EXPECT_EQ(*std::min_element(hits.begin(), hits.end()), 1);
    }
}

TEST(InputSignal, SampledInterpolationAndReversal)
{
    const auto u = InputSignal::sampled({0.0, 1.0, 3.0}, {0.0, 2.0, 0.0});
    EXPECT_DOUBLE_EQ(u.value(0.5), 1.0);
    EXPECT_DOUBLE_EQ(u.value(2.0), 1.0);
    const auto r = u.reversed(3.0, -1.0);
    EXPECT_DOUBLE_EQ(r.value(0.0), -0.0);
    EXPECT_DOUBLE_EQ(r.value(2.0), -2.0);
    EXPECT_THROW(InputSignal::sampled({0.0, 1.0, 1.0}, {0.0, 1.0, 2.0}), std::exception);
}

TEST(InputSignal, ClosedFormDerivatives)
{
    const auto u = inputs::one_minus_cos(2.0);
    ASSERT_TRUE(u.has_derivatives());
    EXPECT_NEAR(u.derivative(0.3), 2.0 * std::sin(0.6), 1e-15);
    EXPECT_NEAR(u.second_derivative(0.3), 4.0 * std::cos(0.6), 1e-15);
    EXPECT_TRUE(InputSignal::zero().is_zero());
}
