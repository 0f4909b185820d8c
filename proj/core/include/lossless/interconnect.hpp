#pragma once

#include "lossless/input_signal.hpp"
#include "lossless/lti.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lossless {

/// Physical interconnection of (J1, B1, B1^T) with (J2, B2, B2^T):
///
///     J = [[J1, -B1 B2^T], [B2 B1^T, J2]],   B = [B1; 0],   y = B1^T x1.
///
/// Skew-symmetry holds by construction. A zero-dimensional sys2 returns sys1.
LosslessSystem interconnect(const LosslessSystem& sys1, const LosslessSystem& sys2);

/// y = k u + sqrt(2 T k) w on [0, tau].
struct HeatBath {
    double k = 0.0;
    double temperature = 0.0;
    double tau = 0.0;
};

/// Throws InvalidArgument unless k > 0, tau > 0 and T >= 0.
HeatBath make_heat_bath(double k, double temperature, double tau);

/// x' = A x + B_in u + B_noise w,  y = C^T x + D_noise w, with w unit-intensity white noise
/// (its samples on a step dt have variance noise_intensity / dt).
struct NoisyLinearSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd B_in;
    Eigen::VectorXd B_noise;
    Eigen::VectorXd C;
    double D_noise = 0.0;
    double noise_intensity = 1.0;
    std::optional<double> horizon;  ///< validity horizon (heat-bath recurrence time)

    Eigen::Index dim() const noexcept { return A.rows(); }
};

/// A = J - k B B^T, B_in = B, B_noise = -B sqrt(2 k T), C = B, valid on [0, tau].
NoisyLinearSystem connect_heat_bath(const LosslessSystem& sys, const HeatBath& bath);

/// Measured system with back action. One noise source w drives both
///     process noise      p = sqrt(2 k_m T_m) w  (injected through -B)
///     measurement noise  m = sqrt(2 T_m / k_m) w  (added to y_hat = B^T x + m).
struct MeasuredSystem {
    NoisyLinearSystem dynamics;  ///< output of `dynamics` is the estimate y_hat
    double k_m = 0.0;
    double T_m = 0.0;
    double process_gain = 0.0;      ///< sqrt(2 k_m T_m)
    double measurement_gain = 0.0;  ///< sqrt(2 T_m / k_m)

    double process_intensity() const { return 2.0 * k_m * T_m; }
    double measurement_intensity() const { return 2.0 * T_m / k_m; }
    /// E p(t) m(s) = 2 T_m delta(t - s), whatever k_m is.
    double cross_intensity() const { return process_gain * measurement_gain; }
};

/// Throws InvalidArgument unless k_m > 0 and T_m >= 0.
MeasuredSystem measure(const LosslessSystem& sys, double k_m, double T_m);

/// Sample path of a noisy system. noise_path[i] is the white-noise sample acting on
/// [t_i, t_{i+1}) and in the output at t_i.
struct NoisyTrajectory {
    std::vector<double> times;
    Eigen::MatrixXd states;
    std::vector<double> outputs;
    std::vector<double> noise_path;
    std::vector<std::string> warnings;
};

/// Exponential Euler-Maruyama on a uniform grid: the drift and the input hold are
/// propagated exactly; each step adds e^{A dt} B_noise w_i dt with w_i ~ N(0, intensity/dt).
/// Throws InvalidArgument for non-uniform grids. Simulating past the validity horizon
/// adds a warning.
NoisyTrajectory simulate_noisy(const NoisyLinearSystem& nsys, const InputSignal& u,
                               std::span<const double> grid, std::uint64_t seed,
                               const std::optional<Eigen::VectorXd>& x0 = std::nullopt);

/// Noise intensities estimated from a recorded path, each scaled by dt:
/// E[p m] dt, E[p^2] dt, E[m^2] dt.
struct NoiseIntensities {
    double cross = 0.0;
    double process = 0.0;
    double measurement = 0.0;
    double cross_stderr = 0.0;
    std::size_t samples = 0;
};

NoiseIntensities estimate_noise_intensities(const MeasuredSystem& meas,
                                            std::span<const double> noise_path, double dt);

/// max Re(lambda) over the eigenvalues of A.
double spectral_abscissa(const Eigen::MatrixXd& A);

} // namespace lossless
