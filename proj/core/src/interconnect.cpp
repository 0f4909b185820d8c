#include "lossless/interconnect.hpp"

#include "lossless/errors.hpp"
#include "lossless/numerics.hpp"
#include "propagator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <sstream>

namespace lossless {

LosslessSystem interconnect(const LosslessSystem& sys1, const LosslessSystem& sys2)
{
    if (sys2.dim() == 0)
        return sys1;
    const Eigen::Index n1 = sys1.dim();
    const Eigen::Index n2 = sys2.dim();
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    j.topLeftCorner(n1, n1) = sys1.J();
    j.bottomRightCorner(n2, n2) = sys2.J();
    const Eigen::MatrixXd coupling = sys2.B() * sys1.B().transpose(); // B2 B1^T
    j.bottomLeftCorner(n2, n1) = coupling;
    j.topRightCorner(n1, n2) = -coupling.transpose();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n1 + n2);
    b.head(n1) = sys1.B();
    return make_lossless(std::move(j), std::move(b));
}

HeatBath make_heat_bath(double k, double temperature, double tau)
{
    if (!(k > 0.0))
        throw InvalidArgument("heat bath: strength k must be positive");
    if (!(tau > 0.0))
        throw InvalidArgument("heat bath: recurrence time tau must be positive");
    if (!(temperature >= 0.0))
        throw InvalidArgument("heat bath: temperature must be non-negative");
    return {k, temperature, tau};
}

NoisyLinearSystem connect_heat_bath(const LosslessSystem& sys, const HeatBath& bath)
{
    const HeatBath b = make_heat_bath(bath.k, bath.temperature, bath.tau);
    NoisyLinearSystem n;
    n.A = sys.J() - b.k * sys.B() * sys.B().transpose();
    n.B_in = sys.B();
    n.B_noise = -sys.B() * std::sqrt(2.0 * b.k * b.temperature);
    n.C = sys.B();
    n.D_noise = 0.0;
    n.horizon = b.tau;
    return n;
}

MeasuredSystem measure(const LosslessSystem& sys, double k_m, double T_m)
{
    if (!(k_m > 0.0))
        throw InvalidArgument("measure: gain k_m must be positive");
    if (!(T_m >= 0.0))
        throw InvalidArgument("measure: temperature T_m must be non-negative");
    MeasuredSystem m;
    m.k_m = k_m;
    m.T_m = T_m;
    m.process_gain = std::sqrt(2.0 * k_m * T_m);
    m.measurement_gain = std::sqrt(2.0 * T_m / k_m);
    m.dynamics.A = sys.J() - k_m * sys.B() * sys.B().transpose();
    m.dynamics.B_in = sys.B();
    m.dynamics.B_noise = -sys.B() * m.process_gain;
    m.dynamics.C = sys.B();
    m.dynamics.D_noise = m.measurement_gain;
    return m;
}

NoisyTrajectory simulate_noisy(const NoisyLinearSystem& nsys, const InputSignal& u,
                               std::span<const double> grid, std::uint64_t seed,
                               const std::optional<Eigen::VectorXd>& x0)
{
    const Eigen::Index n = nsys.dim();
    if (nsys.A.cols() != n || nsys.B_in.size() != n || nsys.B_noise.size() != n ||
        nsys.C.size() != n)
        throw InvalidArgument("simulate_noisy: inconsistent dimensions");
    if (grid.size() < 2)
        throw InvalidArgument("simulate_noisy: need at least two grid points");
    const double dt = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]) || std::abs((grid[i] - grid[i - 1]) - dt) > 1e-9 * dt)
            throw InvalidArgument("simulate_noisy: the stochastic scheme needs a uniform grid");
    if (x0 && x0->size() != n)
        throw InvalidArgument("simulate_noisy: x0 length does not match the system");

    NoisyTrajectory out;
    out.times.assign(grid.begin(), grid.end());
    if (nsys.horizon && grid.back() > *nsys.horizon) {
        std::ostringstream msg;
        msg << "simulation extends to t = " << grid.back()
            << " beyond the heat-bath validity horizon tau = " << *nsys.horizon;
        out.warnings.push_back(msg.str());
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double w_scale = std::sqrt(nsys.noise_intensity / dt);

    detail::DenseStepper stepper(nsys.A, nsys.B_in);
    const Eigen::VectorXd noise_dir = stepper.transition(dt) * nsys.B_noise;

    const auto g = grid.size();
    out.states.resize(n, static_cast<Eigen::Index>(g));
    out.outputs.resize(g);
    out.noise_path.resize(g);
    Eigen::VectorXd x = x0 ? *x0 : Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < g; ++i) {
        const double w = w_scale * normal(rng);
        out.noise_path[i] = w;
        out.states.col(static_cast<Eigen::Index>(i)) = x;
        out.outputs[i] = nsys.C.dot(x) + nsys.D_noise * w;
        if (i + 1 == g)
            break;
        stepper.advance(x, dt, detail::hold_coefficients(u, grid[i], grid[i + 1]));
        x.noalias() += noise_dir * (w * dt);
    }
    return out;
}

NoiseIntensities estimate_noise_intensities(const MeasuredSystem& meas,
                                            std::span<const double> noise_path, double dt)
{
    if (noise_path.size() < 2)
        throw InvalidArgument("estimate_noise_intensities: need at least two samples");
    const std::size_t n = noise_path.size();
    std::vector<double> pm(n), pp(n), mm(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = meas.process_gain * noise_path[i];
        const double m = meas.measurement_gain * noise_path[i];
        pm[i] = p * m * dt;
        pp[i] = p * p * dt;
        mm[i] = m * m * dt;
    }
    NoiseIntensities est;
    const double nn = static_cast<double>(n);
    est.samples = n;
    est.cross = pairwise_sum(pm) / nn;
    est.process = pairwise_sum(pp) / nn;
    est.measurement = pairwise_sum(mm) / nn;
    for (auto& v : pm)
        v = (v - est.cross) * (v - est.cross);
    est.cross_stderr = std::sqrt(pairwise_sum(pm) / (nn - 1.0) / nn);
    return est;
}

double spectral_abscissa(const Eigen::MatrixXd& A)
{
    if (A.rows() == 0)
        return -std::numeric_limits<double>::infinity();
    Eigen::EigenSolver<Eigen::MatrixXd> eig(A, false);
    return eig.eigenvalues().real().maxCoeff();
}

} // namespace lossless
