#include "lossless/harmonic.hpp"

#include "lossless/errors.hpp"
#include "lossless/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace lossless {

namespace {

// Natural cubic spline, used to differentiate sampled inputs.
class CubicSpline {
public:
    CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y))
    {
        const std::size_t n = x_.size();
        m_.assign(n, 0.0);
        if (n < 3)
            return;
        std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1];
            const double h1 = x_[i + 1] - x_[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
        }
        // Thomas algorithm; natural end conditions m_0 = m_{n-1} = 0.
        for (std::size_t i = 1; i < n; ++i) {
            const double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        m_[n - 1] = d[n - 1] / b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;)
            m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
    }

    double derivative(double t) const
    {
        const auto [i, h, s] = locate(t);
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        (void)s;
        return (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m_[i] +
               (3.0 * b * b - 1.0) / 6.0 * h * m_[i + 1];
    }

    double second_derivative(double t) const
    {
        const auto [i, h, s] = locate(t);
        (void)s;
        const double a = (x_[i + 1] - t) / h;
        return a * m_[i] + (1.0 - a) * m_[i + 1];
    }

private:
    struct Loc {
        std::size_t i;
        double h;
        double s;
    };
    Loc locate(double t) const
    {
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        std::size_t hi = static_cast<std::size_t>(it - x_.begin());
        hi = std::clamp<std::size_t>(hi, 1, x_.size() - 1);
        const std::size_t i = hi - 1;
        return {i, x_[i + 1] - x_[i], t - x_[i]};
    }

    std::vector<double> x_, y_, m_;
};

struct DerivativeData {
    std::vector<double> du;     // u'(t_i)
    std::vector<double> ddu_l1; // ||u''||_{L1[0,t_i]}
    std::vector<double> error;  // error estimate on |u'(t)| + |u'(0)| + ||u''||
};

std::vector<double> cumulative_abs_integral(const std::function<double(double)>& f,
                                            std::span<const double> grid,
                                            std::vector<double>* errors)
{
    std::vector<double> out(grid.size(), 0.0);
    double err_acc = 0.0;
    if (errors)
        errors->assign(grid.size(), 0.0);
    auto af = [&f](double t) { return std::abs(f(t)); };
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double err = 0.0;
        const double piece = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            af, grid[i - 1], grid[i], 0, 0.0, &err);
        out[i] = out[i - 1] + piece;
        // boost reports the error on the panel mapped to [-1, 1].
        err_acc += err * 0.5 * (grid[i] - grid[i - 1]);
        if (errors)
            (*errors)[i] = err_acc;
    }
    return out;
}

DerivativeData closed_form_derivatives(const InputSignal& u, std::span<const double> grid)
{
    DerivativeData d;
    d.du.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        d.du[i] = u.derivative(grid[i]);
    d.ddu_l1 = cumulative_abs_integral([&u](double t) { return u.second_derivative(t); }, grid,
                                       &d.error);
    return d;
}

DerivativeData spline_derivatives(const InputSignal& u, std::span<const double> grid)
{
    std::vector<double> knots, values;
    if (u.kind() == InputSignal::Kind::sampled) {
        knots.assign(u.sample_times().begin(), u.sample_times().end());
        values.assign(u.sample_values().begin(), u.sample_values().end());
    } else {
        knots.assign(grid.begin(), grid.end());
        for (double t : knots)
            values.push_back(u.value(t));
    }
    if (knots.size() < 5)
        throw InvalidArgument("prop1_bound: too few samples to differentiate the input");

    const CubicSpline fine(knots, values);
    std::vector<double> kc, vc;
    for (std::size_t i = 0; i < knots.size(); i += 2) {
        kc.push_back(knots[i]);
        vc.push_back(values[i]);
    }
    if (kc.back() != knots.back()) {
        kc.push_back(knots.back());
        vc.push_back(values.back());
    }
    const CubicSpline coarse(kc, vc);

    DerivativeData d;
    std::vector<double> quad_err;
    d.du.resize(grid.size());
    d.ddu_l1 = cumulative_abs_integral([&fine](double t) { return fine.second_derivative(t); },
                                       grid, &quad_err);
    const auto coarse_l1 = cumulative_abs_integral(
        [&coarse](double t) { return coarse.second_derivative(t); }, grid, nullptr);
    const double du0_err = std::abs(fine.derivative(grid.front()) - coarse.derivative(grid.front()));
    d.error.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        d.du[i] = fine.derivative(grid[i]);
        const double du_err = std::abs(d.du[i] - coarse.derivative(grid[i]));
        d.error[i] = du_err + du0_err + std::abs(d.ddu_l1[i] - coarse_l1[i]) + quad_err[i];
    }
    return d;
}

std::vector<double> refined_grid(std::span<const double> grid)
{
    std::vector<double> out;
    out.reserve(2 * grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0)
            out.push_back(0.5 * (grid[i - 1] + grid[i]));
        out.push_back(grid[i]);
    }
    return out;
}

} // namespace

LosslessSystem realize_cosine_series(double tau, std::span<const double> coeffs)
{
    if (!(tau > 0.0))
        throw InvalidArgument("realize_cosine_series: tau must be positive");
    if (coeffs.empty())
        throw InvalidArgument("realize_cosine_series: need at least a_0");
    for (double a : coeffs)
        if (!(a >= 0.0))
            throw InvalidArgument("realize_cosine_series: coefficients must be non-negative");

    const auto blocks = static_cast<Eigen::Index>(coeffs.size() - 1);
    const Eigen::Index n = 2 * blocks + 1;
    const double omega0 = std::numbers::pi / tau;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (Eigen::Index l = 0; l < blocks; ++l) {
        const double w = static_cast<double>(l + 1) * omega0;
        j(l, blocks + l) = w;
        j(blocks + l, l) = -w;
        b(l) = std::sqrt(coeffs[static_cast<std::size_t>(l + 1)]);
    }
    b(n - 1) = std::sqrt(0.5 * coeffs[0]);
    return make_lossless(std::move(j), std::move(b));
}

double cosine_series(double tau, std::span<const double> coeffs, double t)
{
    if (coeffs.empty())
        return 0.0;
    const double omega0 = std::numbers::pi / tau;
    double acc = 0.5 * coeffs[0];
    for (std::size_t l = 1; l < coeffs.size(); ++l)
        acc += coeffs[l] * std::cos(static_cast<double>(l) * omega0 * t);
    return acc;
}

HarmonicRealization build_KN(double k, double tau, std::size_t harmonics)
{
    if (!(k > 0.0))
        throw InvalidArgument("build_KN: gain k must be positive (the target must be dissipative)");
    if (!(tau > 0.0))
        throw InvalidArgument("build_KN: recurrence time tau must be positive");

    // 2 kappa_N^c = a_0/2 + sum a_l cos(l w0 t) with a_0 = a_l = 2k/tau.
    const std::vector<double> coeffs(harmonics + 1, 2.0 * k / tau);
    HarmonicRealization real;
    real.k = k;
    real.tau = tau;
    real.harmonics = harmonics;
    real.omega0 = std::numbers::pi / tau;
    real.sys = realize_cosine_series(tau, coeffs);
    real.output_vector = real.sys.B();
    return real;
}

double kn_kernel(const HarmonicRealization& real, double t)
{
    const std::vector<double> coeffs(real.harmonics + 1, 2.0 * real.k / real.tau);
    return cosine_series(real.tau, coeffs, t);
}

std::vector<double> apply_KN(const HarmonicRealization& real, const InputSignal& u,
                             std::span<const double> grid)
{
    if (grid.empty() || grid.front() != 0.0)
        throw InvalidArgument("apply_KN: grid must start at t = 0");
    return simulate(real.sys, u, Eigen::VectorXd::Zero(real.dim()), grid).outputs();
}

double ErrorBoundReport::sup_error() const
{
    return observed_error.empty() ? 0.0
                                  : *std::max_element(observed_error.begin(), observed_error.end());
}

double ErrorBoundReport::sup_bound() const
{
    return bound_curve.empty() ? 0.0 : *std::max_element(bound_curve.begin(), bound_curve.end());
}

double ErrorBoundReport::max_slack() const
{
    return slack.empty() ? 0.0 : *std::max_element(slack.begin(), slack.end());
}

ErrorBoundReport prop1_bound(const HarmonicRealization& real, const InputSignal& u,
                             std::span<const double> grid, const ErrorBoundOptions& opts)
{
    if (grid.size() < 2 || grid.front() != 0.0)
        throw InvalidArgument("prop1_bound: grid must start at t = 0 and have two or more points");
    const double u0 = u.value(0.0);
    if (std::abs(u0) > 1e-12)
        throw InvalidArgument("prop1_bound: requires u(0) = 0");

    ErrorBoundReport rep;
    rep.times.assign(grid.begin(), grid.end());
    rep.derivatives_numeric = !u.has_derivatives();
    const DerivativeData d =
        u.has_derivatives() ? closed_form_derivatives(u, grid) : spline_derivatives(u, grid);

    rep.prefactor = real.harmonics == 0
                        ? std::numeric_limits<double>::infinity()
                        : 2.0 * real.k * real.tau /
                              (std::numbers::pi * std::numbers::pi *
                               static_cast<double>(real.harmonics));

    const auto y_n = apply_KN(real, u, grid);
    std::vector<double> sim_err(grid.size(), 0.0);
    if (opts.estimate_slack && !u.is_zero()) {
        const auto fine = refined_grid(grid);
        const auto y_fine = apply_KN(real, u, fine);
        for (std::size_t i = 0; i < grid.size(); ++i)
            sim_err[i] = std::abs(y_fine[2 * i] - y_n[i]);
    }

    const std::size_t g = grid.size();
    rep.du0_abs = std::abs(d.du[0]);
    rep.du_abs.resize(g);
    rep.ddu_l1 = d.ddu_l1;
    rep.bound_curve.resize(g);
    rep.observed_error.resize(g);
    rep.slack.resize(g);
    rep.holds = true;
    for (std::size_t i = 0; i < g; ++i) {
        rep.du_abs[i] = std::abs(d.du[i]);
        const double stats = rep.du_abs[i] + rep.du0_abs + rep.ddu_l1[i];
        rep.bound_curve[i] = stats == 0.0 ? 0.0 : rep.prefactor * stats;
        rep.observed_error[i] = std::abs(real.k * u.value(grid[i]) - y_n[i]);
        const double stat_err = std::isfinite(rep.prefactor) ? rep.prefactor * d.error[i] : 0.0;
        rep.slack[i] = opts.slack_safety * (sim_err[i] + stat_err);
        if (rep.observed_error[i] > rep.bound_curve[i] + rep.slack[i])
            rep.holds = false;
    }
    return rep;
}

} // namespace lossless
