#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lossless {

/// Pairwise (cascade) summation. Result depends only on the order of the input,
/// never on how work was split between threads.
double pairwise_sum(std::span<const double> values);

/// `points` equally spaced samples covering [t0, t1], endpoints included.
std::vector<double> uniform_grid(double t0, double t1, std::size_t points);

/// Trapezoidal integral of samples `f` on `grid`.
double trapezoid(std::span<const double> grid, std::span<const double> f);

/// Running trapezoidal integral; element i holds the integral over [grid[0], grid[i]].
std::vector<double> cumulative_trapezoid(std::span<const double> grid, std::span<const double> f);

/// Composite Simpson rule on a uniform grid with an odd number of points.
double simpson_uniform(double step, std::span<const double> f);

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss-Kronrod (31-point) quadrature of f over [a, b]. The tolerance is relative
/// to an estimate of int |f|.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tolerance = 1e-13, unsigned max_depth = 20);

/// integrate() over `panels` equal sub-intervals, summed pairwise. Use for oscillatory
/// integrands with roughly one half-period per panel.
QuadratureResult integrate_panels(const std::function<double(double)>& f, double a, double b,
                                  std::size_t panels, double tolerance = 1e-13);

/// Worker threads used by the parallel helpers. 0 means "use 1".
struct ExecutionOptions {
    unsigned threads = 1;
};

/// Runs body(i) for i in [0, count). Iterations are split into contiguous chunks, one
/// per worker; body must only write to slots owned by index i.
void parallel_for(std::size_t count, const ExecutionOptions& exec,
                  const std::function<void(std::size_t)>& body);

} // namespace lossless
