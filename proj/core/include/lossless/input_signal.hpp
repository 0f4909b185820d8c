#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace lossless {

/// Scalar input u(t) driving a system.
///
/// Three representations exist: identically zero, samples with linear interpolation,
/// and closed-form handles. Closed-form inputs may carry u' and u''; these are what the
/// error bound for K_N consumes, and simulate() uses u' for a cubic Hermite hold.
class InputSignal {
public:
    using Function = std::function<double(double)>;

    enum class Kind { zero, sampled, closed_form };

    InputSignal();

    static InputSignal zero();

    /// Linear interpolation between (times[i], values[i]); times strictly increasing.
    static InputSignal sampled(std::vector<double> times, std::vector<double> values);

    /// Closed-form handle on [t_begin, t_end]. Either both derivatives or none.
    static InputSignal closed_form(Function u, Function du = {}, Function ddu = {},
                                   double t_begin = 0.0,
                                   double t_end = std::numeric_limits<double>::infinity());

    Kind kind() const noexcept { return kind_; }
    bool is_zero() const noexcept { return kind_ == Kind::zero; }
    bool has_derivatives() const noexcept;

    /// Throws InvalidArgument outside the domain.
    double value(double t) const;
    double derivative(double t) const;
    double second_derivative(double t) const;

    std::pair<double, double> domain() const noexcept { return {t_begin_, t_end_}; }
    bool defined_at(double t) const noexcept;

    /// Knots of a sampled input; empty otherwise.
    std::span<const double> sample_times() const noexcept { return times_; }
    std::span<const double> sample_values() const noexcept { return values_; }

    /// Time-reversed copy on [0, horizon]: v(s) = sign * u(horizon - s).
    InputSignal reversed(double horizon, double sign = 1.0) const;

private:
    Kind kind_;
    double t_begin_ = -std::numeric_limits<double>::infinity();
    double t_end_ = std::numeric_limits<double>::infinity();
    std::vector<double> times_;
    std::vector<double> values_;
    Function u_, du_, ddu_;
};

/// Closed-form inputs with derivatives, used by the CLI and tests.
namespace inputs {

/// u(t) = 1 - cos(omega t).
InputSignal one_minus_cos(double omega = 1.0);
/// u(t) = sin(omega t).
InputSignal sine(double omega = 1.0);
/// u(t) = sin^2(t).
InputSignal sin_squared();
/// u(t) = cos(omega t). Note u(0) = 1.
InputSignal cosine(double omega = 1.0);

} // namespace inputs

} // namespace lossless
