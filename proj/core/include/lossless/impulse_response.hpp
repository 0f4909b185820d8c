#pragma once

#include "lossless/numerics.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lossless {

/// Impulse response g of a causal single-input single-output system, g(t) = 0 for t < 0.
///
/// Either a sum of closed-form terms, each with a derivative and an exponential envelope
/// |g(t)| <= M e^{-lambda t}, |g'(t)| <= M' e^{-lambda t}, or a record of samples on
/// [0, T_max] read as a piecewise-linear function.
///
/// tail_mass(t) = int_t^inf |g|, the tail function usually written delta(t).
class ImpulseResponse {
public:
    using Fn = std::function<double(double)>;
    enum class Kind { zero, closed_form, sampled };

    ImpulseResponse();

    static ImpulseResponse zero();
    /// amplitude * e^{-rate t}
    static ImpulseResponse exponential(double amplitude, double rate);
    /// amplitude * e^{-rate t} cos(omega t)
    static ImpulseResponse damped_cosine(double amplitude, double rate, double omega);
    /// User-supplied g, g' with envelope bounds valid for all t >= 0. `oscillation` is the
    /// largest angular frequency present, used to size quadrature panels.
    static ImpulseResponse closed_form(Fn g, Fn dg, double envelope, double derivative_envelope,
                                       double decay_rate, double oscillation = 0.0,
                                       std::string label = "closed-form");
    /// Samples on times[0] = 0 < ... < times.back() = T_max. The last tenth of the record
    /// (at least 8 samples) is fitted with an exponential to bound the tail beyond T_max.
    static ImpulseResponse sampled(std::vector<double> times, std::vector<double> values);

    ImpulseResponse scaled(double factor) const;
    friend ImpulseResponse operator+(const ImpulseResponse& a, const ImpulseResponse& b);

    Kind kind() const noexcept { return kind_; }
    const std::string& label() const noexcept { return label_; }

    double value(double t) const;
    double derivative(double t) const;

    /// ||g||_inf, ||g'||_{L1}, ||g||_{L1}, all on [0, inf).
    double sup_norm() const noexcept { return sup_; }
    double derivative_l1() const noexcept { return derivative_l1_; }
    double l1_norm() const noexcept { return l1_; }
    /// int_a^b g^2 dt.
    double l2_norm_sq(double a, double b) const;

    /// Upper bound on int_t^inf |g(s)| ds. Infinite for a sampled record whose tail could
    /// not be fitted reliably.
    double tail_mass(double t) const;
    bool tail_reliable() const noexcept { return tail_reliable_; }

    /// End of the data: T_max for sampled records, infinity otherwise.
    double support_end() const noexcept { return support_end_; }

    /// int_a^b g(t) cos(omega t) dt with its quadrature error.
    QuadratureResult cosine_integral(double omega, double a, double b) const;

    /// Sampled records only.
    std::span<const double> sample_times() const noexcept { return times_; }
    std::span<const double> sample_values() const noexcept { return values_; }
    /// Fitted tail A e^{-rate t} beyond T_max (sampled records with a reliable fit).
    double tail_fit_amplitude() const noexcept { return tail_amp_; }
    double tail_fit_rate() const noexcept { return tail_rate_; }

private:
    struct Term {
        Fn g;
        Fn dg;
        double envelope = 0.0;
        double derivative_envelope = 0.0;
        double rate = 0.0;
        double oscillation = 0.0;
        // Exponential terms (oscillation == 0 and built by exponential()) have closed-form norms.
        bool pure_exponential = false;
        // amplitude e^{-rate t} cos(oscillation t) exactly; cosine integrals have a closed form
        bool analytic = false;
        double amplitude = 0.0;
    };

    void finalize();
    double envelope_tail(double t) const;
    double derivative_envelope_tail(double t) const;
    double slowest_rate() const;
    double fastest_oscillation() const;
    // Quadrature of |f| on [a, b] in panels no wider than the fastest half-period.
    QuadratureResult abs_integral(const Fn& f, double a, double b) const;
    // Far point beyond which the envelope tail is negligible next to `scale`.
    double far_point(double t, double scale) const;

    Kind kind_ = Kind::zero;
    std::string label_ = "zero";
    std::vector<Term> terms_;
    std::vector<double> times_;
    std::vector<double> values_;
    bool tail_reliable_ = true;
    double tail_amp_ = 0.0;
    double tail_rate_ = 0.0;
    double sup_ = 0.0;
    double derivative_l1_ = 0.0;
    double l1_ = 0.0;
    double support_end_ = std::numeric_limits<double>::infinity();
};

/// int_a^b p(t) cos(omega t) dt for the piecewise-linear p through (times, values), exact.
double piecewise_linear_cosine_integral(std::span<const double> times,
                                        std::span<const double> values, double omega, double a,
                                        double b);

} // namespace lossless
