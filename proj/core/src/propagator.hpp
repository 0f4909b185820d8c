#pragma once

// Exact one-step propagation of x' = A x + b u under a polynomial input hold.

#include "lossless/input_signal.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace lossless::detail {

/// u(t0 + s) ~= sum_m c[m] s^m / m!, m = 0..3, for s in [0, h].
using HoldCoefficients = std::array<double, 4>;

/// Linear hold for sampled inputs, cubic Hermite hold when u' is available.
HoldCoefficients hold_coefficients(const InputSignal& u, double t0, double t1);

/// phi_k(z) = sum_j z^j / (j + k)!, k = 0..4.
std::array<std::complex<double>, 5> phi_functions(std::complex<double> z);

/// Dense stepper using exp of the augmented (n + 4) x (n + 4) matrix.
class DenseStepper {
public:
    DenseStepper(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

    /// x <- e^{A h} x + sum_m c[m] Gamma_m(h)
    void advance(Eigen::VectorXd& x, double h, const HoldCoefficients& c);

    /// e^{A h}, cached per step size.
    const Eigen::MatrixXd& transition(double h);

private:
    struct Step {
        double h = 0.0;
        Eigen::MatrixXd phi;
        Eigen::MatrixXd gamma; // n x 4
    };
    const Step& step(double h);

    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
    std::vector<Step> cache_;
};

/// Stepper for the rotation layout [[0, W], [-W, 0], 0] with W diagonal.
class RotationStepper {
public:
    RotationStepper(std::span<const double> frequencies, const Eigen::VectorXd& b);

    void advance(Eigen::VectorXd& x, double h, const HoldCoefficients& c);

private:
    void prepare(double h);

    std::vector<double> omega_;
    std::vector<std::complex<double>> beta_; // b_cos + i b_sin per block
    double b_const_ = 0.0;

    double h_ = -1.0;
    std::vector<std::complex<double>> rot_;                 // e^{-i w h}
    std::vector<std::array<std::complex<double>, 4>> e_;    // h^{m+1} phi_{m+1}(-i w h)
};

bool same_step(double a, double b) noexcept;

} // namespace lossless::detail
