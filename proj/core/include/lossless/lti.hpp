#pragma once

#include "lossless/input_signal.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace lossless {

/// Checks applied by make_lossless. Defaults follow the library's documented tolerances.
struct LosslessTolerances {
    double skew = 1e-12;                         ///< max |J + J^T| accepted
    Eigen::Index controllability_max_dim = 50;   ///< rank test skipped above this size
    double rank_tolerance = 1e-9;                ///< relative singular-value cutoff
};

/// x' = J x + B u, y = B^T x with J = -J^T.
///
/// Internal energy is U(x) = x^T x / 2, and dU/dt = y u (the work rate) along every
/// solution. Instances are immutable once constructed through make_lossless().
class LosslessSystem {
public:
    /// The empty (zero-dimensional) system.
    LosslessSystem() = default;

    Eigen::Index dim() const noexcept { return j_.rows(); }
    const Eigen::MatrixXd& J() const noexcept { return j_; }
    const Eigen::VectorXd& B() const noexcept { return b_; }

    double output(const Eigen::VectorXd& x) const { return b_.dot(x); }

    /// Result of the rank test, or nullopt when the system is larger than the check limit.
    std::optional<bool> controllable() const noexcept { return controllable_; }

    /// True when J has the layout [[0, W, 0], [-W, 0, 0], [0, 0, 0]] with W diagonal
    /// (cosine states, sine states, constant state). Such systems propagate block-wise.
    bool has_rotation_layout() const noexcept { return rotation_layout_; }
    std::span<const double> rotation_frequencies() const noexcept { return frequencies_; }

private:
    friend LosslessSystem make_lossless(Eigen::MatrixXd j, Eigen::VectorXd b,
                                        const LosslessTolerances& tol);

    Eigen::MatrixXd j_;
    Eigen::VectorXd b_;
    std::optional<bool> controllable_;
    bool rotation_layout_ = false;
    std::vector<double> frequencies_;
};

/// Validates and builds a lossless system. Throws NotSkewSymmetric or InvalidArgument.
/// The generator is symmetrised to exactly -J^T after the tolerance check.
LosslessSystem make_lossless(Eigen::MatrixXd j, Eigen::VectorXd b,
                             const LosslessTolerances& tol = {});

/// U(x) = x^T x / 2
inline double internal_energy(const Eigen::VectorXd& x)
{
    return 0.5 * x.squaredNorm();
}

/// Sampled solution of a simulation. Energies are derived from the states on demand.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::vector<double> times, Eigen::MatrixXd states, std::vector<double> outputs);

    std::size_t size() const noexcept { return times_.size(); }
    const std::vector<double>& times() const noexcept { return times_; }
    /// One column per sample.
    const Eigen::MatrixXd& states() const noexcept { return states_; }
    Eigen::VectorXd state(std::size_t i) const { return states_.col(static_cast<Eigen::Index>(i)); }
    const std::vector<double>& outputs() const noexcept { return outputs_; }

    double energy(std::size_t i) const;
    std::vector<double> energies() const;

private:
    std::vector<double> times_;
    Eigen::MatrixXd states_;
    std::vector<double> outputs_;
};

/// Variation-of-constants solution x(t) = e^{Jt} x0 + int e^{J(t-s)} B u(s) ds on `grid`.
///
/// Each step is propagated exactly for a polynomial hold of u (linear for sampled inputs,
/// cubic Hermite when u' is available). Rotation-layout generators use closed-form 2x2
/// rotations; other generators use the augmented matrix exponential per distinct step.
Trajectory simulate(const LosslessSystem& sys, const InputSignal& u, const Eigen::VectorXd& x0,
                    std::span<const double> grid);

/// w[i] = y[i] * u(t_i).
std::vector<double> work_rate(const Trajectory& traj, const InputSignal& u);

/// e^{J t}
Eigen::MatrixXd propagator(const LosslessSystem& sys, double t);

/// e^{J t} x, block-wise for rotation layouts.
Eigen::VectorXd propagate(const LosslessSystem& sys, const Eigen::VectorXd& x, double t);

/// B^T e^{J t} B, the impulse response at t >= 0.
double impulse_response(const LosslessSystem& sys, double t);

/// Impulse response obtained by simulating from x(0) = B with u = 0.
std::vector<double> simulate_impulse_response(const LosslessSystem& sys,
                                              std::span<const double> grid);

/// Energy bookkeeping of a run from rest.
struct SuppliedEnergy {
    double work = 0.0;          ///< int_0^T y u dt (quadrature of the simulated work rate)
    double final_energy = 0.0;  ///< |x(T)|^2 / 2
};

/// Simulates from x(0) = 0 on a uniform grid (odd point count uses Simpson, otherwise
/// trapezoid) and reports the supplied work alongside the stored energy.
SuppliedEnergy supplied_energy(const LosslessSystem& sys, const InputSignal& u,
                               std::span<const double> grid);

} // namespace lossless
