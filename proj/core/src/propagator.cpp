#include "propagator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace lossless::detail {

bool same_step(double a, double b) noexcept
{
    return std::abs(a - b) <= 1e-13 * std::max(std::abs(a), std::abs(b));
}

HoldCoefficients hold_coefficients(const InputSignal& u, double t0, double t1)
{
    if (u.is_zero())
        return {0.0, 0.0, 0.0, 0.0};
    const double h = t1 - t0;
    const double u0 = u.value(t0);
    const double u1 = u.value(t1);
    const double slope = (u1 - u0) / h;
    if (u.kind() == InputSignal::Kind::closed_form && u.has_derivatives()) {
        const double d0 = u.derivative(t0);
        const double d1 = u.derivative(t1);
        const double quad = (3.0 * slope - 2.0 * d0 - d1) / h;
        const double cubic = (d0 + d1 - 2.0 * slope) / (h * h);
        return {u0, d0, 2.0 * quad, 6.0 * cubic};
    }
    return {u0, slope, 0.0, 0.0};
}

std::array<std::complex<double>, 5> phi_functions(std::complex<double> z)
{
    std::array<std::complex<double>, 5> phi{};
    if (std::abs(z) < 1.0) {
        // Taylor series; 1/(j+k)! decays fast enough for |z| < 1.
        for (int k = 0; k <= 4; ++k) {
            std::complex<double> term = 1.0;
            for (int i = 2; i <= k; ++i)
                term /= static_cast<double>(i);
            std::complex<double> sum = term;
            for (int j = 1; j < 30; ++j) {
                term *= z / static_cast<double>(j + k);
                sum += term;
            }
            phi[k] = sum;
        }
        return phi;
    }
    phi[0] = std::exp(z);
    double factorial = 1.0;
    for (int k = 1; k <= 4; ++k) {
        phi[k] = (phi[k - 1] - 1.0 / factorial) / z;
        factorial *= static_cast<double>(k);
    }
    return phi;
}

DenseStepper::DenseStepper(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) : a_(a), b_(b) {}

const DenseStepper::Step& DenseStepper::step(double h)
{
    for (const auto& s : cache_)
        if (same_step(s.h, h))
            return s;

    const Eigen::Index n = a_.rows();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 4, n + 4);
    m.topLeftCorner(n, n) = a_;
    m.block(0, n, n, 1) = b_;
    for (Eigen::Index j = 0; j < 3; ++j)
        m(n + j, n + j + 1) = 1.0;
    const Eigen::MatrixXd e = (m * h).exp();

    Step s;
    s.h = h;
    s.phi = e.topLeftCorner(n, n);
    s.gamma = e.block(0, n, n, 4);
    if (cache_.size() >= 8)
        cache_.erase(cache_.begin());
    cache_.push_back(std::move(s));
    return cache_.back();
}

const Eigen::MatrixXd& DenseStepper::transition(double h)
{
    return step(h).phi;
}

void DenseStepper::advance(Eigen::VectorXd& x, double h, const HoldCoefficients& c)
{
    const Step& s = step(h);
    Eigen::VectorXd next = s.phi * x;
    for (int m = 0; m < 4; ++m)
        if (c[m] != 0.0)
            next.noalias() += c[m] * s.gamma.col(m);
    x.swap(next);
}

RotationStepper::RotationStepper(std::span<const double> frequencies, const Eigen::VectorXd& b)
    : omega_(frequencies.begin(), frequencies.end())
{
    const std::size_t blocks = omega_.size();
    beta_.resize(blocks);
    for (std::size_t l = 0; l < blocks; ++l)
        beta_[l] = {b(static_cast<Eigen::Index>(l)),
                    b(static_cast<Eigen::Index>(blocks + l))};
    b_const_ = b(static_cast<Eigen::Index>(2 * blocks));
}

void RotationStepper::prepare(double h)
{
    if (h_ > 0.0 && same_step(h_, h))
        return;
    h_ = h;
    const std::size_t blocks = omega_.size();
    rot_.resize(blocks);
    e_.resize(blocks);
    for (std::size_t l = 0; l < blocks; ++l) {
        const std::complex<double> z(0.0, -omega_[l] * h);
        const auto phi = phi_functions(z);
        rot_[l] = std::polar(1.0, -omega_[l] * h);
        double hp = h;
        for (int m = 0; m < 4; ++m) {
            e_[l][m] = hp * phi[m + 1];
            hp *= h;
        }
    }
}

void RotationStepper::advance(Eigen::VectorXd& x, double h, const HoldCoefficients& c)
{
    prepare(h);
    const std::size_t blocks = omega_.size();
    const bool driven = c[0] != 0.0 || c[1] != 0.0 || c[2] != 0.0 || c[3] != 0.0;
    for (std::size_t l = 0; l < blocks; ++l) {
        const auto ic = static_cast<Eigen::Index>(l);
        const auto is = static_cast<Eigen::Index>(blocks + l);
        std::complex<double> z(x(ic), x(is));
        z *= rot_[l];
        if (driven) {
            std::complex<double> forced = 0.0;
            for (int m = 0; m < 4; ++m)
                forced += c[m] * e_[l][m];
            z += beta_[l] * forced;
        }
        x(ic) = z.real();
        x(is) = z.imag();
    }
    if (driven) {
        // Integrator state: x' = b u.
        double hp = h, fact = 1.0, acc = 0.0;
        for (int m = 0; m < 4; ++m) {
            fact *= static_cast<double>(m + 1);
            acc += c[m] * hp / fact;
            hp *= h;
        }
        x(static_cast<Eigen::Index>(2 * blocks)) += b_const_ * acc;
    }
}

} // namespace lossless::detail
