#include "lossless/lti.hpp"

#include "lossless/errors.hpp"
#include "lossless/numerics.hpp"
#include "propagator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace lossless {

namespace {

bool detect_rotation_layout(const Eigen::MatrixXd& j, std::vector<double>& frequencies)
{
    const Eigen::Index n = j.rows();
    if (n % 2 == 0)
        return false;
    const Eigen::Index blocks = (n - 1) / 2;
    std::vector<double> freq(static_cast<std::size_t>(blocks));
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const double v = j(r, c);
            if (r < blocks && c == r + blocks) {
                freq[static_cast<std::size_t>(r)] = v;
            } else if (r >= blocks && r < 2 * blocks && c == r - blocks) {
                if (v != -j(c, r))
                    return false;
            } else if (v != 0.0) {
                return false;
            }
        }
    }
    frequencies = std::move(freq);
    return true;
}

bool rank_full(const Eigen::MatrixXd& j, const Eigen::VectorXd& b, double rel_tol)
{
    const Eigen::Index n = j.rows();
    Eigen::MatrixXd ctrb(n, n);
    Eigen::VectorXd col = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        ctrb.col(k) = col;
        col = j * col;
    }
    // Column scaling keeps the Krylov columns comparable before the rank test.
    for (Eigen::Index k = 0; k < n; ++k) {
        const double nrm = ctrb.col(k).norm();
        if (nrm > 0.0)
            ctrb.col(k) /= nrm;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ctrb);
    const auto& s = svd.singularValues();
    if (s.size() == 0)
        return true;
    return s(s.size() - 1) > rel_tol * s(0);
}

void check_grid(std::span<const double> grid)
{
    if (grid.empty())
        throw InvalidArgument("simulate: empty time grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw InvalidArgument("simulate: time grid must be strictly increasing");
}

// Step boundaries between t0 and t1, split at interior knots of a sampled input.
std::vector<double> substeps(const InputSignal& u, double t0, double t1)
{
    std::vector<double> pts{t0};
    if (u.kind() == InputSignal::Kind::sampled) {
        const auto knots = u.sample_times();
        auto it = std::upper_bound(knots.begin(), knots.end(), t0);
        for (; it != knots.end() && *it < t1; ++it)
            if (!detail::same_step(*it - t0, 0.0) && (t1 - *it) > 1e-13 * (t1 - t0))
                pts.push_back(*it);
    }
    pts.push_back(t1);
    return pts;
}

} // namespace

LosslessSystem make_lossless(Eigen::MatrixXd j, Eigen::VectorXd b, const LosslessTolerances& tol)
{
    if (j.rows() != j.cols())
        throw InvalidArgument("make_lossless: J must be square");
    if (b.size() != j.rows())
        throw InvalidArgument("make_lossless: B length does not match J");
    if (!j.allFinite() || !b.allFinite())
        throw InvalidArgument("make_lossless: non-finite entries");

    const double asym = j.rows() == 0 ? 0.0 : (j + j.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol.skew) {
        std::ostringstream msg;
        msg << "make_lossless: J is not skew-symmetric (max |J + J^T| = " << asym << ")";
        throw NotSkewSymmetric(msg.str(), asym);
    }

    LosslessSystem sys;
    // Exact skew-symmetry from here on.
    sys.j_ = 0.5 * (j - j.transpose());
    sys.b_ = std::move(b);
    if (sys.dim() <= tol.controllability_max_dim)
        sys.controllable_ = rank_full(sys.j_, sys.b_, tol.rank_tolerance);
    sys.rotation_layout_ = detect_rotation_layout(sys.j_, sys.frequencies_);
    return sys;
}

Trajectory::Trajectory(std::vector<double> times, Eigen::MatrixXd states,
                       std::vector<double> outputs)
    : times_(std::move(times)), states_(std::move(states)), outputs_(std::move(outputs))
{
    if (static_cast<std::size_t>(states_.cols()) != times_.size() ||
        outputs_.size() != times_.size())
        throw InvalidArgument("Trajectory: sequence lengths differ");
}

double Trajectory::energy(std::size_t i) const
{
    return 0.5 * states_.col(static_cast<Eigen::Index>(i)).squaredNorm();
}

std::vector<double> Trajectory::energies() const
{
    std::vector<double> e(size());
    for (std::size_t i = 0; i < size(); ++i)
        e[i] = energy(i);
    return e;
}

Trajectory simulate(const LosslessSystem& sys, const InputSignal& u, const Eigen::VectorXd& x0,
                    std::span<const double> grid)
{
    check_grid(grid);
    if (x0.size() != sys.dim())
        throw InvalidArgument("simulate: x0 length does not match the system");
    if (!u.defined_at(grid.front()) || !u.defined_at(grid.back()))
        throw InvalidArgument("simulate: input undefined on the time grid");

    const Eigen::Index n = sys.dim();
    Eigen::MatrixXd states(n, static_cast<Eigen::Index>(grid.size()));
    std::vector<double> outputs(grid.size());
    Eigen::VectorXd x = x0;
    states.col(0) = x;
    outputs[0] = sys.output(x);

    std::optional<detail::RotationStepper> rot;
    std::optional<detail::DenseStepper> dense;
    if (sys.has_rotation_layout())
        rot.emplace(sys.rotation_frequencies(), sys.B());
    else
        dense.emplace(sys.J(), sys.B());

    for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto pts = substeps(u, grid[i - 1], grid[i]);
        for (std::size_t k = 1; k < pts.size(); ++k) {
            const double h = pts[k] - pts[k - 1];
            const auto c = detail::hold_coefficients(u, pts[k - 1], pts[k]);
            if (rot)
                rot->advance(x, h, c);
            else
                dense->advance(x, h, c);
        }
        states.col(static_cast<Eigen::Index>(i)) = x;
        outputs[i] = sys.output(x);
    }
    return Trajectory(std::vector<double>(grid.begin(), grid.end()), std::move(states),
                      std::move(outputs));
}

std::vector<double> work_rate(const Trajectory& traj, const InputSignal& u)
{
    std::vector<double> w(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i)
        w[i] = traj.outputs()[i] * u.value(traj.times()[i]);
    return w;
}

Eigen::MatrixXd propagator(const LosslessSystem& sys, double t)
{
    const Eigen::Index n = sys.dim();
    if (!sys.has_rotation_layout())
        return (sys.J() * t).exp();
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
    const auto freq = sys.rotation_frequencies();
    const auto blocks = static_cast<Eigen::Index>(freq.size());
    for (Eigen::Index l = 0; l < blocks; ++l) {
        const double c = std::cos(freq[static_cast<std::size_t>(l)] * t);
        const double s = std::sin(freq[static_cast<std::size_t>(l)] * t);
        p(l, l) = c;
        p(l, blocks + l) = s;
        p(blocks + l, l) = -s;
        p(blocks + l, blocks + l) = c;
    }
    return p;
}

Eigen::VectorXd propagate(const LosslessSystem& sys, const Eigen::VectorXd& x, double t)
{
    if (x.size() != sys.dim())
        throw InvalidArgument("propagate: vector length does not match the system");
    if (!sys.has_rotation_layout())
        return (sys.J() * t).exp() * x;
    Eigen::VectorXd out = x;
    const auto freq = sys.rotation_frequencies();
    const auto blocks = static_cast<Eigen::Index>(freq.size());
    for (Eigen::Index l = 0; l < blocks; ++l) {
        const double c = std::cos(freq[static_cast<std::size_t>(l)] * t);
        const double s = std::sin(freq[static_cast<std::size_t>(l)] * t);
        out(l) = c * x(l) + s * x(blocks + l);
        out(blocks + l) = -s * x(l) + c * x(blocks + l);
    }
    return out;
}

double impulse_response(const LosslessSystem& sys, double t)
{
    return sys.B().dot(propagate(sys, sys.B(), t));
}

std::vector<double> simulate_impulse_response(const LosslessSystem& sys,
                                              std::span<const double> grid)
{
    return simulate(sys, InputSignal::zero(), sys.B(), grid).outputs();
}

SuppliedEnergy supplied_energy(const LosslessSystem& sys, const InputSignal& u,
                               std::span<const double> grid)
{
    const Trajectory traj = simulate(sys, u, Eigen::VectorXd::Zero(sys.dim()), grid);
    const auto w = work_rate(traj, u);
    SuppliedEnergy out;
    const double h = grid.size() > 1 ? (grid.back() - grid.front()) /
                                           static_cast<double>(grid.size() - 1)
                                     : 0.0;
    bool uniform = grid.size() >= 3 && grid.size() % 2 == 1;
    for (std::size_t i = 1; uniform && i < grid.size(); ++i)
        uniform = std::abs((grid[i] - grid[i - 1]) - h) <= 1e-9 * h;
    out.work = uniform ? simpson_uniform(h, w) : trapezoid(grid, w);
    out.final_energy = traj.energy(traj.size() - 1);
    return out;
}

} // namespace lossless
