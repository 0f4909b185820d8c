#include "lossless/numerics.hpp"

#include "lossless/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace lossless {

double pairwise_sum(std::span<const double> values)
{
    constexpr std::size_t block = 16;
    if (values.size() <= block) {
        double acc = 0.0;
        for (double v : values)
            acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t points)
{
    if (points < 2)
        throw InvalidArgument("uniform_grid: need at least two points");
    if (!(t1 > t0))
        throw InvalidArgument("uniform_grid: empty interval");
    std::vector<double> grid(points);
    const double step = (t1 - t0) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = t0 + step * static_cast<double>(i);
    grid.back() = t1;
    return grid;
}

double trapezoid(std::span<const double> grid, std::span<const double> f)
{
    if (grid.size() != f.size())
        throw InvalidArgument("trapezoid: grid and samples differ in length");
    std::vector<double> pieces;
    pieces.reserve(grid.size());
    for (std::size_t i = 1; i < grid.size(); ++i)
        pieces.push_back(0.5 * (grid[i] - grid[i - 1]) * (f[i] + f[i - 1]));
    return pairwise_sum(pieces);
}

std::vector<double> cumulative_trapezoid(std::span<const double> grid, std::span<const double> f)
{
    if (grid.size() != f.size())
        throw InvalidArgument("cumulative_trapezoid: grid and samples differ in length");
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (f[i] + f[i - 1]);
    return out;
}

double simpson_uniform(double step, std::span<const double> f)
{
    if (f.size() < 3 || f.size() % 2 == 0)
        throw InvalidArgument("simpson_uniform: need an odd number (>= 3) of samples");
    std::vector<double> weighted(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = (i == 0 || i + 1 == f.size()) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        weighted[i] = w * f[i];
    }
    return step / 3.0 * pairwise_sum(weighted);
}

namespace {

struct Panel {
    double value;
    double error;
    double l1;
};

// One 31-point Gauss-Kronrod panel; the embedded 15-point Gauss rule gives the error.
Panel gk_panel(const std::function<double(double)>& f, double a, double b)
{
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
    using Gauss = boost::math::quadrature::gauss<double, 15>;
    const auto& x = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(c);
    double kronrod = f0 * wk[0];
    double gauss = f0 * wg[0];
    double l1 = std::abs(f0) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double fp = f(c + h * x[i]);
        const double fm = f(c - h * x[i]);
        kronrod += (fp + fm) * wk[i];
        l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i % 2 == 0)
            gauss += (fp + fm) * wg[i / 2];
    }
    const double err = std::max(std::abs(kronrod - gauss),
                                2.0 * std::numeric_limits<double>::epsilon() * std::abs(kronrod));
    return {kronrod * h, err * std::abs(h), l1 * std::abs(h)};
}

QuadratureResult adapt(const std::function<double(double)>& f, double a, double b,
                       const Panel& whole, double target, unsigned depth)
{
    if (whole.error <= target || depth == 0)
        return {whole.value, whole.error};
    const double mid = 0.5 * (a + b);
    const Panel left = gk_panel(f, a, mid);
    const Panel right = gk_panel(f, mid, b);
    const auto l = adapt(f, a, mid, left, 0.5 * target, depth - 1);
    const auto r = adapt(f, mid, b, right, 0.5 * target, depth - 1);
    return {l.value + r.value, l.error + r.error};
}

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tolerance, unsigned max_depth)
{
    if (a == b)
        return {};
    const Panel whole = gk_panel(f, a, b);
    // Tolerance is relative to the L1 norm, so cancelling integrands stop refining once
    // the error is small against the magnitude of f.
    const double target = std::max(tolerance * whole.l1, std::numeric_limits<double>::min());
    return adapt(f, a, b, whole, target, max_depth);
}

QuadratureResult integrate_panels(const std::function<double(double)>& f, double a, double b,
                                  std::size_t panels, double tolerance)
{
    panels = std::max<std::size_t>(panels, 1);
    std::vector<double> values(panels), errors(panels);
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + width * static_cast<double>(p);
        const double hi = p + 1 == panels ? b : lo + width;
        const auto r = integrate(f, lo, hi, tolerance);
        values[p] = r.value;
        errors[p] = r.error;
    }
    return {pairwise_sum(values), pairwise_sum(errors)};
}

void parallel_for(std::size_t count, const ExecutionOptions& exec,
                  const std::function<void(std::size_t)>& body)
{
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, exec.threads), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end)
            break;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i)
                    body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace lossless
