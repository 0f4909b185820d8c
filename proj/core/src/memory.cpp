#include "lossless/memory.hpp"

#include "lossless/harmonic.hpp"
#include "lossless/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace lossless {

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(double v)
{
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

// Smallest t in [lo, cap] with f(t) <= target for a non-increasing f.
template <typename F>
std::optional<double> smallest_crossing(F&& f, double lo, double cap, double target)
{
    if (f(lo) <= target)
        return lo;
    double a = lo;
    double b = std::max(2.0 * lo, lo + 1.0);
    while (f(b) > target) {
        if (b >= cap)
            return std::nullopt;
        a = b;
        b = std::min(cap, 2.0 * b);
    }
    for (int it = 0; it < 200 && (b - a) > 1e-12 * b; ++it) {
        const double mid = 0.5 * (a + b);
        (f(mid) <= target ? b : a) = mid;
    }
    return b;
}

double simpson(double step, const std::vector<double>& f)
{
    return simpson_uniform(step, f);
}

// (g * phi)(t_i) with phi(t) = 1 - cos(w t) on a grid, from the running integrals of g,
// g cos(w s) and g sin(w s):  G0(t) - cos(w t) Gc(t) - sin(w t) Gs(t).
std::vector<double> convolve_mode(const ImpulseResponse& g, double w, std::span<const double> grid)
{
    std::vector<double> out(grid.size(), 0.0);
    double g0 = 0.0, gc = 0.0, gs = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double a = grid[i - 1], b = grid[i];
        g0 += integrate([&](double s) { return g.value(s); }, a, b).value;
        gc += integrate([&](double s) { return g.value(s) * std::cos(w * s); }, a, b).value;
        gs += integrate([&](double s) { return g.value(s) * std::sin(w * s); }, a, b).value;
        out[i] = g0 - std::cos(w * b) * gc - std::sin(w * b) * gs;
    }
    return out;
}

} // namespace

std::string to_string(PositiveRealStatus status)
{
    switch (status) {
    case PositiveRealStatus::positive_real:
        return "positive_real";
    case PositiveRealStatus::not_positive_real:
        return "not_positive_real";
    case PositiveRealStatus::inconclusive:
        return "inconclusive";
    }
    return "unknown";
}

PositiveRealReport check_positive_real(const ImpulseResponse& g, std::span<const double> omega_grid,
                                       const PositiveRealOptions& opts)
{
    if (omega_grid.empty())
        throw InvalidArgument("check_positive_real: empty frequency grid");
    if (!(opts.resolution > 0.0))
        throw InvalidArgument("check_positive_real: resolution must be positive");

    PositiveRealReport rep;
    if (opts.t_max > 0.0) {
        rep.t_max = std::min(opts.t_max, g.support_end());
    } else if (g.kind() == ImpulseResponse::Kind::sampled) {
        rep.t_max = g.support_end();
    } else if (g.kind() == ImpulseResponse::Kind::closed_form) {
        const auto t = smallest_crossing([&](double s) { return g.tail_mass(s); }, 0.0, 1e6,
                                         opts.resolution);
        rep.t_max = t.value_or(1e6);
    }
    rep.tail_bound = g.tail_mass(rep.t_max);

    rep.omegas.assign(omega_grid.begin(), omega_grid.end());
    rep.real_parts.resize(rep.omegas.size());
    rep.min_real_part = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.omegas.size(); ++i) {
        const auto q = g.cosine_integral(rep.omegas[i], 0.0, rep.t_max);
        rep.real_parts[i] = q.value;
        rep.quadrature_error = std::max(rep.quadrature_error, q.error);
        if (q.value < rep.min_real_part) {
            rep.min_real_part = q.value;
            rep.argmin_omega = rep.omegas[i];
        }
    }

    const bool nonnegative = rep.min_real_part >= -(rep.tail_bound + rep.quadrature_error);
    if (!(rep.tail_bound <= opts.resolution))
        rep.status = PositiveRealStatus::inconclusive;
    else
        rep.status = nonnegative ? PositiveRealStatus::positive_real
                                 : PositiveRealStatus::not_positive_real;
    rep.is_positive_real = rep.status == PositiveRealStatus::positive_real;
    return rep;
}

double FourierCoefficients::max_relative_error() const
{
    double scale = 0.0;
    double err = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        scale = std::max(scale, std::abs(a[k]));
        err = std::max(err, error[k]);
    }
    return scale > 0.0 ? err / scale : err;
}

FourierCoefficients fourier_coeffs(const ImpulseResponse& g, double tau, std::size_t harmonics)
{
    if (!(tau > 0.0))
        throw InvalidArgument("fourier_coeffs: tau must be positive");
    if (tau > g.support_end() * (1.0 + 1e-12))
        throw InvalidArgument("fourier_coeffs: the sampled record does not cover [0, tau]");
    FourierCoefficients out;
    out.tau = tau;
    out.a.resize(harmonics + 1);
    out.error.resize(harmonics + 1);
    for (std::size_t k = 0; k <= harmonics; ++k) {
        const auto q = g.cosine_integral(static_cast<double>(k) * pi / tau, 0.0, tau);
        out.a[k] = 2.0 / tau * q.value;
        out.error[k] = 2.0 / tau * q.error;
    }
    return out;
}

std::vector<double> ApproximationCertificate::positive_coeffs() const
{
    std::vector<double> plus = coeffs;
    for (double& a : plus)
        a = std::max(a, 0.0);
    return plus;
}

CertifiedApproximation build_certificate(const ImpulseResponse& g, double epsilon,
                                         const CertificateOptions& opts)
{
    if (!(epsilon > 0.0))
        throw InvalidArgument("build_certificate: epsilon must be positive");
    if (!(opts.requested_tau > 0.0))
        throw InvalidArgument("build_certificate: requested horizon must be positive");

    ApproximationCertificate cert;
    cert.epsilon = epsilon;
    cert.requested_tau = opts.requested_tau;
    cert.sup_norm = g.sup_norm();
    cert.derivative_l1 = g.derivative_l1();
    cert.C_value = 2.0 / pi * (cert.sup_norm + cert.derivative_l1);
    const double eps2 = epsilon * epsilon;
    const double C = cert.C_value;

    if (C == 0.0) {
        cert.tau = opts.requested_tau;
        cert.coeffs = {0.0};
        cert.notes.push_back("g vanishes identically; the zero system is exact");
        return {cert, realize_cosine_series(cert.tau, cert.coeffs)};
    }

    // Recurrence time.
    const double delta_target = eps2 / (8.0 * C);
    if (!g.tail_reliable())
        throw CertificationFailed("build_certificate: no rigorous tail bound for the sampled record",
                                  "delta(tau) <= eps^2/(8C)",
                                  std::numeric_limits<double>::infinity(), delta_target, cert);
    const auto tau = smallest_crossing([&](double t) { return g.tail_mass(t); },
                                       opts.requested_tau, opts.max_tau, delta_target);
    if (!tau) {
        cert.delta_tau = g.tail_mass(opts.max_tau);
        throw ResourceExhausted("build_certificate: delta(tau) <= eps^2/(8C) needs tau beyond the cap " +
                                fmt(opts.max_tau));
    }
    cert.tau = *tau;
    cert.delta_tau = g.tail_mass(cert.tau);
    if (cert.tau > opts.requested_tau)
        cert.notes.push_back("recurrence time enlarged from " + fmt(opts.requested_tau) + " to " +
                             fmt(cert.tau));
    if (cert.tau > g.support_end() * (1.0 + 1e-12))
        throw CertificationFailed("build_certificate: the sampled record is shorter than the "
                                  "recurrence time the tail bound requires",
                                  "tau <= T_max", cert.tau, g.support_end(), cert);

    // Truncation: smallest N with Parseval residual <= eps^2/4.
    cert.g_l2_sq = g.l2_norm_sq(0.0, cert.tau);
    const double tau_v = cert.tau;
    double captured = 0.0;
    double residual = cert.g_l2_sq;
    for (std::size_t k = 0;; ++k) {
        if (k > opts.max_harmonics) {
            cert.N = opts.max_harmonics;
            cert.truncation_error = std::sqrt(std::max(residual, 0.0));
            throw ResourceExhausted("build_certificate: truncation error " +
                                    fmt(cert.truncation_error) + " still above eps/2 at N = " +
                                    fmt(static_cast<double>(opts.max_harmonics)) + " (tau = " +
                                    fmt(tau_v) + ")");
        }
        const auto q = g.cosine_integral(static_cast<double>(k) * pi / tau_v, 0.0, tau_v);
        const double a = 2.0 / tau_v * q.value;
        cert.coeffs.push_back(a);
        captured += cert.weight(k) * a * a;
        residual = cert.g_l2_sq - captured;
        if (residual <= 0.25 * eps2) {
            cert.N = k;
            break;
        }
    }
    cert.truncation_error = std::sqrt(std::max(residual, 0.0));

    // Negative part and the two-regime coefficient bounds.
    cert.regime_cutoff = static_cast<std::size_t>(
        std::min(1e18, std::floor(4.0 * C * C * tau_v / eps2)));
    const double slack = 1e-12 * (1.0 + cert.sup_norm);
    std::vector<double> mass;
    for (std::size_t k = 0; k < cert.coeffs.size(); ++k) {
        const double a = cert.coeffs[k];
        if (!(a < 0.0))
            continue;
        cert.negative_set.push_back(k);
        mass.push_back(cert.weight(k) * a * a);
        const double lower = k <= cert.regime_cutoff ? -eps2 / (4.0 * C * tau_v)
                                                     : -C / static_cast<double>(k);
        if (a < lower - slack)
            cert.coefficient_bounds_hold = false;
    }
    cert.negative_mass = pairwise_sum(mass);
    if (!cert.coefficient_bounds_hold)
        cert.notes.push_back("some negative coefficient violates a_k >= max(-eps^2/(4 C tau), -C/k)");
    if (cert.negative_mass > 0.25 * eps2)
        throw CertificationFailed(
            "build_certificate: the strictly negative Fourier coefficients carry " +
                fmt(cert.negative_mass) + " > eps^2/4 = " + fmt(0.25 * eps2) +
                "; g is not dissipative to this accuracy",
            "||g_N^-||^2 <= eps^2/4", cert.negative_mass, 0.25 * eps2, cert);

    // Achieved error of g_N^+ by direct quadrature. d = g - g_N^+ is a difference of O(1)
    // terms, so d^2 carries relative rounding noise near 1e-13; ask for less than that.
    const auto plus = cert.positive_coeffs();
    const auto panels = std::max<std::size_t>(cert.N + 1, static_cast<std::size_t>(std::ceil(tau_v)));
    const auto err2 = integrate_panels(
        [&](double t) {
            const double d = g.value(t) - cosine_series(tau_v, plus, t);
            return d * d;
        },
        0.0, tau_v, panels, 1e-10);
    cert.achieved_error = std::sqrt(std::max(err2.value, 0.0));
    if (cert.achieved_error > epsilon)
        throw CertificationFailed("build_certificate: achieved error " + fmt(cert.achieved_error) +
                                      " exceeds epsilon",
                                  "||g - g_N^+|| <= eps", cert.achieved_error, epsilon, cert);

    return {cert, realize_cosine_series(tau_v, plus)};
}

double supplied_energy_under(const ImpulseResponse& g, const InputSignal& u, double horizon,
                             std::size_t grid_points)
{
    if (!(horizon > 0.0))
        throw InvalidArgument("supplied_energy_under: horizon must be positive");
    grid_points = std::max<std::size_t>(grid_points | 1u, 3);
    const auto grid = uniform_grid(0.0, horizon, grid_points);
    std::vector<double> yu(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const double y =
            t <= 0.0 ? 0.0
                     : integrate_panels([&](double s) { return g.value(s) * u.value(t - s); }, 0.0,
                                        t, static_cast<std::size_t>(std::ceil(t)) + 1)
                           .value;
        yu[i] = y * u.value(t);
    }
    return simpson(grid[1] - grid[0], yu);
}

FalsificationReport falsify_if_direction(const ImpulseResponse& g, const LosslessSystem& candidate,
                                         double horizon, const FalsifierOptions& opts)
{
    if (!(horizon > 0.0))
        throw InvalidArgument("falsify_if_direction: horizon must be positive");
    if (opts.modes == 0)
        throw InvalidArgument("falsify_if_direction: need at least one input mode");

    const std::size_t M = opts.modes;
    const std::size_t G = std::max<std::size_t>(opts.grid_points | 1u, 3);
    const auto grid = uniform_grid(0.0, horizon, G);
    const double h = grid[1] - grid[0];

    FalsificationReport rep;
    rep.horizon = horizon;
    {
        std::ostringstream fam;
        fam << "u(t) = sum_{m=1.." << M << "} c_m (1 - cos(m pi t / " << horizon << "))";
        rep.input_family = fam.str();
    }

    std::vector<std::vector<double>> conv(M, std::vector<double>(G));
    std::vector<std::vector<double>> phi(M, std::vector<double>(G));
    for (std::size_t m = 0; m < M; ++m) {
        const double w = static_cast<double>(m + 1) * pi / horizon;
        for (std::size_t i = 0; i < G; ++i)
            phi[m][i] = 1.0 - std::cos(w * grid[i]);
        conv[m] = convolve_mode(g, w, grid);
    }
    Eigen::MatrixXd Q(M, M);
    std::vector<double> prod(G);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t n = 0; n < M; ++n) {
            for (std::size_t i = 0; i < G; ++i)
                prod[i] = conv[m][i] * phi[n][i];
            Q(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = simpson(h, prod);
        }
    const Eigen::MatrixXd Qs = 0.5 * (Q + Q.transpose());
    rep.supplied_energy_form = Qs;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Qs);
    rep.min_eigenvalue = eig.eigenvalues()(0);
    const double threshold = -1e-10 * std::max(Qs.cwiseAbs().maxCoeff(), 1e-300);

    // Candidate inputs: the most negative direction, then random draws.
    std::vector<std::pair<double, Eigen::VectorXd>> witnesses;
    auto consider = [&](Eigen::VectorXd c) {
        c /= c.norm();
        const double s = c.dot(Qs * c);
        ++rep.inputs_searched;
        if (s < threshold)
            witnesses.emplace_back(s, std::move(c));
    };
    consider(eig.eigenvectors().col(0));
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t r = 0; r < opts.random_inputs; ++r) {
        Eigen::VectorXd c(M);
        for (std::size_t m = 0; m < M; ++m)
            c(static_cast<Eigen::Index>(m)) = normal(rng);
        consider(std::move(c));
    }
    rep.witnesses_found = witnesses.size();
    std::stable_sort(witnesses.begin(), witnesses.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    const Eigen::Index n = candidate.dim();
    rep.min_candidate_work = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < std::min(witnesses.size(), opts.max_verified); ++w) {
        const Eigen::VectorXd& c = witnesses[w].second;
        EnergyWitness wit;
        wit.coeffs.assign(c.data(), c.data() + c.size());
        wit.K1 = -witnesses[w].first;

        std::vector<double> u(G, 0.0), y(G, 0.0), absu(G), u2(G);
        for (std::size_t i = 0; i < G; ++i) {
            for (std::size_t m = 0; m < M; ++m) {
                u[i] += c(static_cast<Eigen::Index>(m)) * phi[m][i];
                y[i] += c(static_cast<Eigen::Index>(m)) * conv[m][i];
            }
            absu[i] = std::abs(u[i]);
            u2[i] = u[i] * u[i];
        }
        wit.K2 = simpson(h, absu);
        wit.K3 = std::sqrt(simpson(h, u2));

        std::vector<double> yc(G, 0.0);
        if (n > 0) {
            const std::vector<double> cv = wit.coeffs;
            auto sum = [cv, horizon](double t, int order) {
                double acc = 0.0;
                for (std::size_t m = 0; m < cv.size(); ++m) {
                    const double w = static_cast<double>(m + 1) * pi / horizon;
                    if (order == 0)
                        acc += cv[m] * (1.0 - std::cos(w * t));
                    else if (order == 1)
                        acc += cv[m] * w * std::sin(w * t);
                    else
                        acc += cv[m] * w * w * std::cos(w * t);
                }
                return acc;
            };
            const auto input = InputSignal::closed_form([sum](double t) { return sum(t, 0); },
                                                        [sum](double t) { return sum(t, 1); },
                                                        [sum](double t) { return sum(t, 2); });
            const auto traj = simulate(candidate, input, Eigen::VectorXd::Zero(n), grid);
            yc = traj.outputs();
            wit.candidate_final_energy = traj.energy(G - 1);
        }
        std::vector<double> work(G), diff2(G);
        for (std::size_t i = 0; i < G; ++i) {
            work[i] = yc[i] * u[i];
            diff2[i] = (yc[i] - y[i]) * (yc[i] - y[i]);
        }
        wit.candidate_work = simpson(h, work);
        wit.energy_defect = std::abs(wit.candidate_work - wit.candidate_final_energy);
        wit.output_mismatch = std::sqrt(simpson(h, diff2));
        wit.mismatch_lower_bound = wit.K3 > 0.0 ? wit.K1 / wit.K3 : 0.0;
        wit.contradiction = wit.candidate_work >= -1e-9 &&
                            wit.output_mismatch >= wit.mismatch_lower_bound * (1.0 - 1e-8);
        rep.min_candidate_work = std::min(rep.min_candidate_work, wit.candidate_work);
        rep.max_energy_defect = std::max(rep.max_energy_defect, wit.energy_defect);
        rep.verified.push_back(std::move(wit));
    }
    if (rep.verified.empty())
        rep.min_candidate_work = 0.0;
    return rep;
}

} // namespace lossless
