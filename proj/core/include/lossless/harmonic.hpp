#pragma once

#include "lossless/input_signal.hpp"
#include "lossless/lti.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace lossless {

/// Lossless/causal approximation K_N of the memoryless gain y = k u on [0, tau].
///
/// The realization has 2N + 1 states ordered as N cosine states, N sine states and one
/// constant state. Its impulse response is the twice-normalised causal part of the
/// truncated Fourier series of the 2 tau-periodic impulse train:
///
///     k/tau + sum_{l=1..N} (2k/tau) cos(l w0 t),    w0 = pi / tau.
struct HarmonicRealization {
    double k = 0.0;
    double tau = 0.0;
    std::size_t harmonics = 0;
    double omega0 = 0.0;
    LosslessSystem sys;             ///< (J_N, sqrt(2) B_N)
    Eigen::VectorXd output_vector;  ///< sqrt(2) C_N^T, equal to sys.B()

    Eigen::Index dim() const noexcept { return sys.dim(); }
};

/// Throws InvalidArgument unless k > 0 and tau > 0.
HarmonicRealization build_KN(double k, double tau, std::size_t harmonics);

/// Lossless system in the same layout whose impulse response is
/// a_0/2 + sum_{l>=1} a_l cos(l pi t / tau). All coefficients must be >= 0.
LosslessSystem realize_cosine_series(double tau, std::span<const double> coeffs);

/// a_0/2 + sum_{l>=1} a_l cos(l pi t / tau)
double cosine_series(double tau, std::span<const double> coeffs, double t);

/// Impulse response of K_N evaluated from its series.
double kn_kernel(const HarmonicRealization& real, double t);

/// y_N = K_N u on `grid` (which must start at t = 0), simulated from rest.
std::vector<double> apply_KN(const HarmonicRealization& real, const InputSignal& u,
                             std::span<const double> grid);

struct ErrorBoundOptions {
    /// Estimate the simulation error by re-running on a grid with midpoints inserted.
    bool estimate_slack = true;
    /// Multiplier on every discretisation estimate that enters the slack.
    double slack_safety = 2.0;
};

/// Pointwise comparison of |k u(t) - y_N(t)| against
/// (2 k tau / (pi^2 N)) (|u'(t)| + |u'(0)| + ||u''||_{L1[0,t]}).
struct ErrorBoundReport {
    std::vector<double> times;
    std::vector<double> bound_curve;
    std::vector<double> observed_error;
    std::vector<double> slack;   ///< discretisation slack, reported separately
    std::vector<double> du_abs;  ///< |u'(t)|
    double du0_abs = 0.0;        ///< |u'(0)|
    std::vector<double> ddu_l1;  ///< ||u''||_{L1[0,t]}
    double prefactor = 0.0;      ///< 2 k tau / (pi^2 N), +inf for N = 0
    bool derivatives_numeric = false;
    bool holds = false;          ///< observed <= bound + slack at every grid point

    double sup_error() const;
    double sup_bound() const;
    double max_slack() const;
};

/// Throws InvalidArgument when u(0) != 0.
ErrorBoundReport prop1_bound(const HarmonicRealization& real, const InputSignal& u,
                             std::span<const double> grid, const ErrorBoundOptions& opts = {});

} // namespace lossless
