#include "lossless/ensemble.hpp"

#include "lossless/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace lossless {

namespace {

// F with F F^T = X, for symmetric positive semidefinite X.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& X)
{
    if (X.rows() == 0)
        return X;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(X);
    const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * roots.asDiagonal();
}

Eigen::VectorXd draw(const Eigen::MatrixXd& factor, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(factor.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        z(i) = normal(rng);
    return factor * z;
}

// Length of [lo, hi] intersected with [-b, b].
double overlap(double lo, double hi, double b)
{
    return std::max(0.0, std::min(hi, b) - std::max(lo, -b));
}

double antideriv_cos_cos(double a, double b, double h)
{
    if (a == b)
        return a == 0.0 ? h : 0.5 * h + std::sin(2.0 * a * h) / (4.0 * a);
    return std::sin((a - b) * h) / (2.0 * (a - b)) + std::sin((a + b) * h) / (2.0 * (a + b));
}

double antideriv_sin_sin(double a, double b, double h)
{
    if (a == b)
        return 0.5 * h - std::sin(2.0 * a * h) / (4.0 * a);
    return std::sin((a - b) * h) / (2.0 * (a - b)) - std::sin((a + b) * h) / (2.0 * (a + b));
}

// int_{-h}^0 sin(c s) ds = (cos(c h) - 1)/c, written without cancellation.
double int_sin(double c, double h)
{
    if (c == 0.0)
        return 0.0;
    const double s = std::sin(0.5 * c * h);
    return -2.0 * s * s / c;
}

// int_{-h}^0 sin(a s) cos(b s) ds
double antideriv_sin_cos(double a, double b, double h)
{
    return 0.5 * (int_sin(a + b, h) + int_sin(a - b, h));
}

} // namespace

EnsembleSpec thermal_ensemble(Eigen::Index n, double temperature, std::size_t trials,
                              std::uint64_t base_seed)
{
    if (temperature < 0.0)
        throw InvalidArgument("thermal_ensemble: temperature must be non-negative");
    EnsembleSpec spec;
    spec.mean0 = Eigen::VectorXd::Zero(n);
    spec.X = temperature * Eigen::MatrixXd::Identity(n, n);
    spec.trials = trials;
    spec.base_seed = base_seed;
    return spec;
}

void validate(const EnsembleSpec& spec, Eigen::Index n)
{
    if (spec.mean0.size() != n || spec.X.rows() != n || spec.X.cols() != n)
        throw InvalidArgument("ensemble: mean/covariance dimensions do not match the system");
    if (spec.trials < 2)
        throw InvalidArgument("ensemble: need at least two trials");
    if (n == 0)
        return;
    const double scale = std::max(1.0, spec.X.cwiseAbs().maxCoeff());
    if ((spec.X - spec.X.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw InvalidArgument("ensemble: covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spec.X, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
        throw InvalidArgument("ensemble: covariance is not positive semidefinite");
}

double covariance_exact(const LosslessSystem& sys, const Eigen::MatrixXd& X, double s, double t)
{
    if (X.rows() != sys.dim() || X.cols() != sys.dim())
        throw InvalidArgument("covariance_exact: X does not match the system dimension");
    const Eigen::VectorXd vt = propagate(sys, sys.B(), -t);
    const Eigen::VectorXd vs = propagate(sys, sys.B(), -s);
    return vt.dot(X * vs);
}

double covariance_exact(const HarmonicRealization& real, const Eigen::MatrixXd& X, double s,
                        double t)
{
    return covariance_exact(real.sys, X, s, t);
}

std::vector<double> deterministic_response(const LosslessSystem& sys,
                                           const Eigen::VectorXd& mean0, const InputSignal& u,
                                           std::span<const double> grid)
{
    return simulate(sys, u, mean0, grid).outputs();
}

CovarianceEstimate ensemble_simulate(const LosslessSystem& sys, const EnsembleSpec& spec,
                                     const InputSignal& u, std::span<const double> grid,
                                     const ExecutionOptions& exec)
{
    validate(spec, sys.dim());
    const std::size_t g = grid.size();
    const std::size_t trials = spec.trials;
    const auto mean_path = deterministic_response(sys, spec.mean0, u, grid);
    const Eigen::MatrixXd factor = covariance_factor(spec.X);

    // Deviation from the deterministic part, one column per trial.
    Eigen::MatrixXd dev(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(trials));
    parallel_for(trials, exec, [&](std::size_t j) {
        const Eigen::VectorXd x0 = draw(factor, spec.base_seed + j);
        const auto y = simulate(sys, InputSignal::zero(), x0, grid).outputs();
        for (std::size_t i = 0; i < g; ++i)
            dev(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = y[i];
    });

    CovarianceEstimate est;
    est.grid.assign(grid.begin(), grid.end());
    est.trials = trials;
    const auto gi = static_cast<Eigen::Index>(g);
    est.mean.resize(gi);
    est.mean_stderr.resize(gi);
    est.R_hat.resize(gi, gi);
    est.stderr.resize(gi, gi);
    const double nt = static_cast<double>(trials);

    std::vector<double> buf(trials);
    std::vector<double> centred(trials * g);
    for (Eigen::Index i = 0; i < gi; ++i) {
        for (std::size_t j = 0; j < trials; ++j)
            buf[j] = dev(i, static_cast<Eigen::Index>(j));
        const double m = pairwise_sum(buf) / nt;
        for (std::size_t j = 0; j < trials; ++j) {
            centred[static_cast<std::size_t>(i) * trials + j] = buf[j] - m;
            buf[j] = (buf[j] - m) * (buf[j] - m);
        }
        est.mean(i) = mean_path[static_cast<std::size_t>(i)] + m;
        est.mean_stderr(i) = std::sqrt(pairwise_sum(buf) / (nt - 1.0) / nt);
    }

    for (Eigen::Index a = 0; a < gi; ++a) {
        for (Eigen::Index b = a; b < gi; ++b) {
            const double* da = &centred[static_cast<std::size_t>(a) * trials];
            const double* db = &centred[static_cast<std::size_t>(b) * trials];
            for (std::size_t j = 0; j < trials; ++j)
                buf[j] = da[j] * db[j];
            const double r = pairwise_sum(buf) / (nt - 1.0);
            const double mp = pairwise_sum(buf) / nt;
            for (std::size_t j = 0; j < trials; ++j)
                buf[j] = (da[j] * db[j] - mp) * (da[j] * db[j] - mp);
            const double se = std::sqrt(pairwise_sum(buf) / (nt - 1.0) / nt);
            est.R_hat(a, b) = est.R_hat(b, a) = r;
            est.stderr(a, b) = est.stderr(b, a) = se;
        }
    }
    return est;
}

CovarianceEstimate ensemble_simulate(const HarmonicRealization& real, const EnsembleSpec& spec,
                                     const InputSignal& u, std::span<const double> grid,
                                     const ExecutionOptions& exec)
{
    return ensemble_simulate(real.sys, spec, u, grid, exec);
}

TemperatureCheck check_temperature(const LosslessSystem& sys, const Eigen::MatrixXd& X,
                                   const TemperatureOptions& opts)
{
    if (X.rows() != sys.dim() || X.cols() != sys.dim())
        throw InvalidArgument("check_temperature: X does not match the system dimension");
    std::vector<double> times = opts.times;
    if (times.empty())
        times = uniform_grid(0.0, 10.0, 11);

    // Columns e^{-J t} B for each grid time.
    std::vector<Eigen::VectorXd> v;
    v.reserve(times.size());
    for (double t : times)
        v.push_back(propagate(sys, sys.B(), -t));

    std::vector<double> r, h;
    for (std::size_t a = 0; a < times.size(); ++a) {
        for (std::size_t b = 0; b < times.size(); ++b) {
            // R(s, t) with s = times[a], t = times[b].
            r.push_back(v[b].dot(X * v[a]));
            h.push_back(impulse_response(sys, times[b] - times[a]));
        }
    }
    std::vector<double> rh(r.size()), hh(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        rh[i] = r[i] * h[i];
        hh[i] = h[i] * h[i];
    }
    const double denom = pairwise_sum(hh);
    TemperatureCheck out;
    out.fitted_temperature = denom > 0.0 ? pairwise_sum(rh) / denom : 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        out.max_defect = std::max(out.max_defect, std::abs(r[i] - out.fitted_temperature * h[i]));
    out.is_thermal = out.max_defect <= opts.tolerance;
    if (out.is_thermal)
        out.temperature = out.fitted_temperature;

    if (sys.dim() > 0) {
        const double scale = std::max(1.0, X.cwiseAbs().maxCoeff() * std::max(1.0, sys.J().cwiseAbs().maxCoeff()));
        out.commutator_norm = (X * sys.J() - sys.J() * X).cwiseAbs().maxCoeff();
        out.commutes = out.commutator_norm <= opts.commute_tolerance * scale;
        const double bb = sys.B().squaredNorm();
        if (bb > 0.0) {
            out.b_eigenvalue = sys.B().dot(X * sys.B()) / bb;
            const double resid = (X * sys.B() - out.b_eigenvalue * sys.B()).cwiseAbs().maxCoeff();
            out.b_eigenvector = resid <= opts.commute_tolerance * std::max(1.0, X.cwiseAbs().maxCoeff()) * std::sqrt(bb);
        }
    }
    return out;
}

EquipartitionState maxent_covariance(double energy, Eigen::Index n)
{
    if (energy < 0.0)
        throw InvalidArgument("maxent_covariance: energy must be non-negative");
    if (n < 1)
        throw InvalidArgument("maxent_covariance: dimension must be positive");
    EquipartitionState st;
    st.temperature = 2.0 * energy / static_cast<double>(n);
    st.X = st.temperature * Eigen::MatrixXd::Identity(n, n);
    return st;
}

Eigen::MatrixXd whitenoise_covariance(const HarmonicRealization& real, double intensity, double h)
{
    if (!(h > 0.0))
        throw InvalidArgument("whitenoise_covariance: h must be positive");
    const auto blocks = static_cast<Eigen::Index>(real.harmonics);
    const Eigen::Index n = real.dim();
    // B_N = realization input / sqrt(2).
    const Eigen::VectorXd bn = real.sys.B() / std::numbers::sqrt2;

    // Basis functions of e^{-J s} B_N: cos(w_l s), sin(w_l s), 1.
    enum class Kind { cos, sin, one };
    auto kind = [blocks](Eigen::Index p) {
        return p < blocks ? Kind::cos : (p < 2 * blocks ? Kind::sin : Kind::one);
    };
    auto freq = [&](Eigen::Index p) {
        const Eigen::Index l = p < blocks ? p : (p < 2 * blocks ? p - blocks : 0);
        return p < 2 * blocks ? static_cast<double>(l + 1) * real.omega0 : 0.0;
    };
    auto gain = [&](Eigen::Index p) {
        // The sine states share the gain of their cosine partner.
        return p < blocks ? bn(p) : (p < 2 * blocks ? bn(p - blocks) : bn(n - 1));
    };

    auto integral = [&](Eigen::Index p, Eigen::Index q) {
        const Kind kp = kind(p), kq = kind(q);
        const double a = freq(p), b = freq(q);
        if (kp == Kind::one && kq == Kind::one)
            return h;
        if (kp == Kind::one || kq == Kind::one) {
            const Kind other = kp == Kind::one ? kq : kp;
            const double w = kp == Kind::one ? b : a;
            return other == Kind::cos ? std::sin(w * h) / w : int_sin(w, h);
        }
        if (kp == Kind::cos && kq == Kind::cos)
            return antideriv_cos_cos(a, b, h);
        if (kp == Kind::sin && kq == Kind::sin)
            return antideriv_sin_sin(a, b, h);
        return kp == Kind::sin ? antideriv_sin_cos(a, b, h) : antideriv_sin_cos(b, a, h);
    };

    Eigen::MatrixXd X(n, n);
    const double pre = 2.0 * intensity / h;
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = p; q < n; ++q)
            X(p, q) = X(q, p) = pre * gain(p) * gain(q) * integral(p, q);
    return X;
}

double gaussian_entropy(const Eigen::MatrixXd& X)
{
    Eigen::LLT<Eigen::MatrixXd> llt(X);
    if (llt.info() != Eigen::Success)
        throw InvalidArgument("gaussian_entropy: covariance must be positive definite");
    const Eigen::MatrixXd& l = llt.matrixL();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        logdet += 2.0 * std::log(l(i, i));
    const double n = static_cast<double>(X.rows());
    return 0.5 * (n * std::log(2.0 * std::numbers::pi * std::numbers::e) + logdet);
}

FluctuationDissipationReport fluctuation_dissipation_check(const LosslessSystem& sys,
                                                           const Eigen::MatrixXd& X,
                                                           std::span<const double> lags,
                                                           double base_time,
                                                           const TemperatureOptions& opts)
{
    FluctuationDissipationReport rep;
    const TemperatureCheck temp = check_temperature(sys, X, opts);
    if (!temp.is_thermal) {
        rep.note = "initial-state covariance is not thermal; check skipped";
        return rep;
    }
    if (lags.empty() || lags.front() < 0.0)
        throw InvalidArgument("fluctuation_dissipation_check: lags must be non-negative");

    rep.checked = true;
    rep.temperature = temp.temperature;
    const double T = *temp.temperature;
    rep.lags.assign(lags.begin(), lags.end());
    rep.impulse_response = simulate_impulse_response(sys, lags);
    for (double s0 : {0.0, base_time}) {
        for (std::size_t i = 0; i < lags.size(); ++i) {
            const double r = covariance_exact(sys, X, s0, s0 + lags[i]);
            if (s0 == 0.0)
                rep.covariance.push_back(r);
            const double defect =
                T > 0.0 ? std::abs(r / T - rep.impulse_response[i]) : std::abs(r);
            rep.max_defect = std::max(rep.max_defect, defect);
        }
    }
    return rep;
}

BandLimitedVariance band_limited_variance(const HarmonicRealization& real,
                                          const EnsembleSpec& spec, double bandwidth,
                                          const BandOptions& opts)
{
    validate(spec, real.dim());
    if (!(bandwidth > 0.0))
        throw InvalidArgument("band_limited_variance: bandwidth must be positive");

    BandLimitedVariance out;
    out.bandwidth = bandwidth;
    out.window = opts.window > 0.0 ? opts.window : 2.0 * real.tau;
    out.samples = opts.samples > 0 ? opts.samples
                                   : std::bit_ceil(4 * real.harmonics + 4);
    out.trials = spec.trials;
    if (out.samples < 8)
        out.samples = 8;

    const std::size_t m = out.samples;
    const double dt = out.window / static_cast<double>(m);
    std::vector<double> grid(m);
    for (std::size_t i = 0; i < m; ++i)
        grid[i] = dt * static_cast<double>(i);

    const double dw = 2.0 * std::numbers::pi / out.window;
    // Overlap of each signed-frequency bin with [-B, B].
    std::vector<double> weight(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double idx = i <= m / 2 ? static_cast<double>(i)
                                      : static_cast<double>(i) - static_cast<double>(m);
        const double centre = idx * dw;
        weight[i] = overlap(centre - 0.5 * dw, centre + 0.5 * dw, bandwidth);
    }
    const double density_scale = out.window / (static_cast<double>(m) * static_cast<double>(m));

    const Eigen::MatrixXd factor = covariance_factor(spec.X);
    std::vector<double> per_trial(spec.trials);
    parallel_for(spec.trials, opts.exec, [&](std::size_t j) {
        const Eigen::VectorXd x0 = draw(factor, spec.base_seed + j);
        const auto y = simulate(real.sys, InputSignal::zero(), x0, grid).outputs();
        Eigen::FFT<double> fft;
        std::vector<std::complex<double>> spectrum;
        fft.fwd(spectrum, y);
        std::vector<double> terms(m);
        for (std::size_t i = 0; i < m; ++i)
            terms[i] = density_scale * std::norm(spectrum[i]) * weight[i];
        per_trial[j] = pairwise_sum(terms);
    });

    const double nt = static_cast<double>(spec.trials);
    out.spectral_integral = pairwise_sum(per_trial) / nt;
    std::vector<double> sq(per_trial.size());
    for (std::size_t j = 0; j < sq.size(); ++j)
        sq[j] = (per_trial[j] - out.spectral_integral) * (per_trial[j] - out.spectral_integral);
    out.spectral_integral_stderr = std::sqrt(pairwise_sum(sq) / (nt - 1.0) / nt);
    out.filtered_variance = out.spectral_integral / (2.0 * std::numbers::pi);
    return out;
}

} // namespace lossless
