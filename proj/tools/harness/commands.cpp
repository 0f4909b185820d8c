#include "commands.hpp"

#include <lossless/lossless.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#ifndef LOSSLESS_VERSION
#define LOSSLESS_VERSION "unknown"
#endif

namespace lossless::harness {

namespace {

std::string join(const std::vector<std::size_t>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

std::string join(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "," : "") + cell(v[i]);
    return out;
}

std::uint64_t require_seed(const ExperimentConfig& cfg)
{
    if (!cfg.seed)
        throw UsageError(cfg.command + ": --seed is required for stochastic runs");
    return *cfg.seed;
}

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw UsageError(what);
}

double rel_error(double est, double expected)
{
    return expected == 0.0 ? std::abs(est) : std::abs(est - expected) / std::abs(expected);
}

LosslessSystem rotation(double omega)
{
    Eigen::MatrixXd j(2, 2);
    j << 0.0, omega, -omega, 0.0;
    Eigen::VectorXd b(2);
    b << 1.0, 0.0;
    return make_lossless(j, b);
}

InputSignal make_input(const std::string& name, double omega)
{
    if (name == "one_minus_cos")
        return inputs::one_minus_cos(omega);
    if (name == "sine")
        return inputs::sine(omega);
    if (name == "sin_squared")
        return inputs::sin_squared();
    throw UsageError("unknown --input '" + name + "' (one_minus_cos, sine, sin_squared)");
}

ImpulseResponse read_samples(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read impulse-response samples from '" + path + "'");
    std::vector<double> t, v;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a, b;
        if (ls >> a >> b) {
            t.push_back(a);
            v.push_back(b);
        }
    }
    try {
        return ImpulseResponse::sampled(std::move(t), std::move(v));
    } catch (const InvalidArgument& e) {
        throw UsageError(std::string("samples file: ") + e.what());
    }
}

ImpulseResponse make_family(const ExperimentConfig& cfg)
{
    try {
        if (cfg.family == "exp")
            return ImpulseResponse::exponential(cfg.amplitude, cfg.rate);
        if (cfg.family == "neg_exp")
            return ImpulseResponse::exponential(-cfg.amplitude, cfg.rate);
        if (cfg.family == "damped_cos")
            return ImpulseResponse::damped_cosine(cfg.amplitude, cfg.rate, cfg.family_omega);
        if (cfg.family == "zero")
            return ImpulseResponse::zero();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    if (cfg.family == "sampled")
        return read_samples(cfg.samples_path);
    throw UsageError("unknown --family '" + cfg.family + "' (exp, neg_exp, damped_cos, zero, sampled)");
}

} // namespace

std::string version_string()
{
    return LOSSLESS_VERSION;
}

ExecutionOptions execution_from_env()
{
    ExecutionOptions exec;
    exec.threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LOSSLESS_APPROX_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0)
            exec.threads = std::min<unsigned>(exec.threads, static_cast<unsigned>(cap));
    }
    return exec;
}

RunReport cmd_approx(const ExperimentConfig& cfg)
{
    const double k = cfg.gain.value_or(1.0);
    const double tau = cfg.tau.value_or(10.0);
    std::vector<std::size_t> Ns = cfg.harmonics;
    if (Ns.empty())
        Ns = {25, 50, 100, 200};
    const std::size_t points = cfg.grid_points.value_or(2001);
    const double horizon = cfg.horizon.value_or(tau);
    require(k > 0.0, "approx: --gain must be positive");
    require(tau > 0.0, "approx: --tau must be positive");
    require(points >= 3, "approx: --grid-points must be at least 3");
    require(horizon > 0.0, "approx: --horizon must be positive");
    const auto u = make_input(cfg.input, cfg.omega);

    RunReport rep;
    rep.config = {{"gain", cell(k)},          {"tau", cell(tau)},
                  {"harmonics", join(Ns)},     {"grid_points", cell(points)},
                  {"horizon", cell(horizon)},  {"input", cfg.input},
                  {"omega", cell(cfg.omega)}};

    const auto grid = uniform_grid(0.0, horizon, points);
    Table t{"approx_errors",
            {"N [1]", "sup_error [arb]", "sup_bound [arb]", "max_slack [arb]", "prefactor [s]",
             "bound_holds [bool]"},
            {}};
    std::vector<std::pair<std::size_t, double>> errors;
    for (std::size_t N : Ns) {
        const auto real = build_KN(k, tau, N);
        const auto r = prop1_bound(real, u, grid);
        t.add_row({cell(N), cell(r.sup_error()), cell(r.sup_bound()), cell(r.max_slack()),
                   cell(r.prefactor), cell(r.holds)});
        rep.check("error bound holds, N=" + std::to_string(N), r.holds,
                  "sup error " + cell(r.sup_error()) + ", sup bound " + cell(r.sup_bound()));
        rep.curves.push_back({"approx_error_N" + std::to_string(N), "t[s]", "abs_error[arb]",
                              r.times, r.observed_error});
        rep.curves.push_back({"approx_bound_N" + std::to_string(N), "t[s]", "bound[arb]", r.times,
                              r.bound_curve});
        errors.emplace_back(N, r.sup_error());
    }
    rep.tables.push_back(std::move(t));

    std::sort(errors.begin(), errors.end());
    bool monotone = true;
    for (std::size_t i = 1; i < errors.size(); ++i)
        monotone = monotone && errors[i].second <= errors[i - 1].second;
    if (errors.size() > 1)
        rep.check("sup error non-increasing in N", monotone);
    if (Ns.size() == 1 && Ns.front() == 0)
        rep.notes.push_back("N = 0 keeps only the constant kernel k/tau; the bound is infinite");
    return rep;
}

RunReport cmd_noise(const ExperimentConfig& cfg)
{
    const std::size_t N = cfg.harmonics.empty() ? 200 : cfg.harmonics.front();
    const double k = cfg.gain.value_or(2.0);
    const double tau = cfg.tau.value_or(10.0);
    const double T = cfg.temperature.value_or(0.5);
    const std::size_t trials = cfg.trials.value_or(10000);
    const double bandwidth = cfg.bandwidth.value_or(1.0);
    const std::size_t points = cfg.grid_points.value_or(21);
    const double horizon = cfg.horizon.value_or(tau);
    require(trials >= 2, "noise: --trials must be at least 2");
    require(k > 0.0 && tau > 0.0, "noise: --gain and --tau must be positive");
    require(T >= 0.0, "noise: --temperature must be non-negative");
    require(bandwidth > 0.0, "noise: --bandwidth must be positive");
    require(points >= 2, "noise: --grid-points must be at least 2");
    const std::uint64_t seed = require_seed(cfg);

    RunReport rep;
    rep.config = {{"harmonics", cell(N)},      {"gain", cell(k)},
                  {"tau", cell(tau)},          {"temperature", cell(T)},
                  {"trials", cell(trials)},    {"seed", std::to_string(seed)},
                  {"bandwidth", cell(bandwidth)}, {"grid_points", cell(points)},
                  {"horizon", cell(horizon)},  {"threads", std::to_string(cfg.exec.threads)}};

    const auto real = build_KN(k, tau, N);
    const auto spec = thermal_ensemble(real.dim(), T, trials, seed);
    const auto grid = uniform_grid(0.0, horizon, points);
    const auto est = ensemble_simulate(real, spec, InputSignal::zero(), grid, cfg.exec);

    Table cov{"noise_covariance",
              {"s [s]", "t [s]", "R_hat [arb^2]", "R_exact [arb^2]", "stderr [arb^2]", "z [1]"},
              {}};
    double max_z = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i; j < grid.size(); ++j) {
            const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
            const double exact = covariance_exact(real, spec.X, grid[i], grid[j]);
            const double se = est.stderr(ii, jj);
            const double z = se > 0.0 ? (est.R_hat(ii, jj) - exact) / se : 0.0;
            max_z = std::max(max_z, std::abs(z));
            cov.add_row({cell(grid[i]), cell(grid[j]), cell(est.R_hat(ii, jj)), cell(exact),
                         cell(se), cell(z)});
        }
    rep.tables.push_back(std::move(cov));
    rep.check("ensemble covariance within 5 standard errors of the closed form", max_z <= 5.0,
              "max |z| = " + cell(max_z));

    BandOptions bopts;
    bopts.exec = cfg.exec;
    const auto band = band_limited_variance(real, spec, bandwidth, bopts);
    const double expected = 4.0 * T * k * bandwidth;
    const double rel = rel_error(band.spectral_integral, expected);
    Table bt{"noise_band",
             {"bandwidth [rad/s]", "spectral_integral [arb^2]", "stderr [arb^2]",
              "expected_4TkB [arb^2]", "relative_error [1]", "filtered_variance [arb^2]",
              "window [s]", "samples [1]", "trials [1]"},
             {}};
    bt.add_row({cell(bandwidth), cell(band.spectral_integral), cell(band.spectral_integral_stderr),
                cell(expected), cell(rel), cell(band.filtered_variance), cell(band.window),
                cell(band.samples), cell(band.trials)});
    rep.tables.push_back(std::move(bt));
    rep.check("band-limited variance matches 4TkB within 10%", rel <= 0.10,
              cell(band.spectral_integral) + " vs " + cell(expected));
    return rep;
}

RunReport cmd_equipartition(const ExperimentConfig& cfg)
{
    const double E = cfg.energy;
    const std::size_t n = cfg.dim;
    require(E >= 0.0, "equipartition: --energy must be non-negative");
    require(n >= 1, "equipartition: --dim must be at least 1");
    const std::size_t N = cfg.harmonics.empty() ? (n >= 1 ? (n - 1) / 2 : 0) : cfg.harmonics.front();
    const double k = cfg.gain.value_or(1.0);
    const double tau = cfg.tau.value_or(10.0);
    const double h = cfg.horizon.value_or(2.0 * tau);
    require(k > 0.0 && tau > 0.0 && h > 0.0, "equipartition: --gain, --tau, --horizon must be positive");
    require(cfg.intensity >= 0.0, "equipartition: --intensity must be non-negative");

    RunReport rep;
    rep.config = {{"energy", cell(E)},  {"dim", cell(n)},         {"harmonics", cell(N)},
                  {"gain", cell(k)},    {"tau", cell(tau)},       {"horizon", cell(h)},
                  {"intensity", cell(cfg.intensity)}};

    const auto st = maxent_covariance(E, static_cast<Eigen::Index>(n));
    const double T_expected = 2.0 * E / static_cast<double>(n);
    const double x_dev =
        (st.X - T_expected * Eigen::MatrixXd::Identity(st.X.rows(), st.X.cols())).cwiseAbs().maxCoeff();

    const auto real = build_KN(k, tau, N);
    const Eigen::MatrixXd W = whitenoise_covariance(real, cfg.intensity, h);
    const double w_expected = cfg.intensity * k / tau;
    const double w_dev =
        (W - w_expected * Eigen::MatrixXd::Identity(W.rows(), W.cols())).cwiseAbs().maxCoeff();
    const bool full_period = std::abs(h - 2.0 * tau) <= 1e-12 * tau;

    Table t{"equipartition",
            {"quantity [label]", "value [unit]", "expected [unit]", "abs_error [unit]", "unit [label]"},
            {}};
    t.add_row({"maxent_temperature", cell(st.temperature), cell(T_expected),
               cell(std::abs(st.temperature - T_expected)), "energy"});
    t.add_row({"maxent_covariance_max_dev", cell(x_dev), cell(0.0), cell(x_dev), "energy"});
    t.add_row({"maxent_entropy", cell(gaussian_entropy(st.X)), cell(gaussian_entropy(st.X)),
               cell(0.0), "nat"});
    t.add_row({"whitenoise_diagonal", cell(W(0, 0)), cell(w_expected), cell(std::abs(W(0, 0) - w_expected)),
               "energy"});
    t.add_row({"whitenoise_max_dev_from_ik_over_tau_I", cell(w_dev), cell(0.0), cell(w_dev), "energy"});
    rep.tables.push_back(std::move(t));
    rep.matrices.push_back({"X_maxent", st.X});
    rep.matrices.push_back({"X_whitenoise", W});

    rep.check("maximum-entropy temperature equals 2E/n", st.temperature == T_expected,
              "T = " + cell(st.temperature));
    rep.check("maximum-entropy covariance equals T I", x_dev == 0.0);
    if (full_period)
        rep.check("white-noise covariance at h = 2 tau equals (i k / tau) I to 1e-12",
                  w_dev <= 1e-12, "max deviation " + cell(w_dev));
    else
        rep.notes.push_back("h != 2 tau: the white-noise covariance is reported, not checked");
    return rep;
}

RunReport cmd_interconnect(const ExperimentConfig& cfg)
{
    const std::size_t N = cfg.harmonics.empty() ? 10 : cfg.harmonics.front();
    const double k = cfg.gain.value_or(1.0);
    const double tau = cfg.tau.value_or(10.0);
    const double T = cfg.temperature.value_or(0.0);
    const double horizon = cfg.horizon.value_or(100.0);
    const std::size_t points = cfg.grid_points.value_or(1001);
    require(k > 0.0 && tau > 0.0 && horizon > 0.0,
            "interconnect: --gain, --tau, --horizon must be positive");
    require(T >= 0.0, "interconnect: --temperature must be non-negative");
    require(points >= 2, "interconnect: --grid-points must be at least 2");
    const std::uint64_t seed = T > 0.0 ? require_seed(cfg) : cfg.seed.value_or(0);

    RunReport rep;
    rep.config = {{"omega", cell(cfg.omega)}, {"harmonics", cell(N)},     {"gain", cell(k)},
                  {"tau", cell(tau)},         {"temperature", cell(T)},   {"horizon", cell(horizon)},
                  {"grid_points", cell(points)}, {"seed", std::to_string(seed)}};

    const auto sys1 = rotation(cfg.omega);
    const auto real = build_KN(k, tau, N);
    const auto combined = interconnect(sys1, real.sys);
    const double skew = (combined.J() + combined.J().transpose()).cwiseAbs().maxCoeff();
    rep.check("interconnection is exactly skew-symmetric", skew == 0.0, "max |J + J^T| = " + cell(skew));
    rep.matrices.push_back({"J_combined", combined.J()});
    rep.matrices.push_back({"B_combined", combined.B()});

    // Autonomous energy of the combined system.
    Eigen::VectorXd x0 = Eigen::VectorXd::Ones(combined.dim()) / std::sqrt(double(combined.dim()));
    const auto grid = uniform_grid(0.0, horizon, points);
    const auto traj = simulate(combined, InputSignal::zero(), x0, grid);
    const double U0 = traj.energy(0);
    Table et{"interconnect_energy", {"t [s]", "energy [energy]", "relative_drift [1]"}, {}};
    double drift = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double d = std::abs(traj.energy(i) - U0) / U0;
        drift = std::max(drift, d);
        et.add_row({cell(grid[i]), cell(traj.energy(i)), cell(d)});
    }
    rep.tables.push_back(std::move(et));
    rep.check("combined autonomous energy conserved to 1e-9", drift <= 1e-9,
              "max relative drift " + cell(drift));

    // Heat-bath closure of the first system.
    const auto nsys = connect_heat_bath(sys1, make_heat_bath(k, T, tau));
    const double abscissa = spectral_abscissa(nsys.A);
    rep.matrices.push_back({"A_heat_bath", nsys.A});
    Eigen::EigenSolver<Eigen::MatrixXd> eig(nsys.A, false);
    Table ht{"heat_bath_eigenvalues", {"real [1/s]", "imag [rad/s]"}, {}};
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
        ht.add_row({cell(eig.eigenvalues()(i).real()), cell(eig.eigenvalues()(i).imag())});
    rep.tables.push_back(std::move(ht));
    rep.check("spectral abscissa of J - k B B^T <= 1e-10", abscissa <= 1e-10,
              "max Re(lambda) = " + cell(abscissa));

    const double bath_horizon = std::min(horizon, tau);
    const auto bgrid = uniform_grid(0.0, bath_horizon, points);
    Eigen::VectorXd xb = Eigen::VectorXd::Ones(sys1.dim());
    const auto noisy = simulate_noisy(nsys, InputSignal::zero(), bgrid, seed, xb);
    Curve energy_curve{"heat_bath_energy", "t[s]", "energy[energy]", noisy.times, {}};
    for (Eigen::Index i = 0; i < noisy.states.cols(); ++i)
        energy_curve.y.push_back(0.5 * noisy.states.col(i).squaredNorm());
    if (T == 0.0) {
        bool non_increasing = true;
        for (std::size_t i = 1; i < energy_curve.y.size(); ++i)
            non_increasing = non_increasing && energy_curve.y[i] <= energy_curve.y[i - 1] + 1e-9;
        rep.check("heat-bath closure at T = 0 has non-increasing energy", non_increasing);
    }
    rep.curves.push_back(std::move(energy_curve));
    for (const auto& w : noisy.warnings)
        rep.notes.push_back(w);
    return rep;
}

RunReport cmd_measure(const ExperimentConfig& cfg)
{
    std::vector<double> kms = cfg.km;
    if (kms.empty())
        kms = {0.1, 1.0, 10.0};
    const double Tm = cfg.temperature.value_or(1.0);
    const double dt = cfg.step;
    const std::size_t steps = cfg.grid_points ? *cfg.grid_points - 1 : cfg.steps;
    for (double km : kms)
        require(km > 0.0, "measure: every --km must be positive (got " + cell(km) + ")");
    require(Tm >= 0.0, "measure: --temperature must be non-negative");
    require(dt > 0.0, "measure: --step must be positive");
    require(steps >= 2, "measure: need at least two steps");
    const std::uint64_t seed = require_seed(cfg);

    RunReport rep;
    rep.config = {{"km", join(kms)},      {"temperature", cell(Tm)}, {"step", cell(dt)},
                  {"steps", cell(steps)}, {"seed", std::to_string(seed)},
                  {"omega", cell(cfg.omega)}};

    const auto sys = rotation(cfg.omega);
    std::vector<double> grid(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
        grid[i] = dt * static_cast<double>(i);

    Table t{"measure_intensities",
            {"k_m [1]", "cross_intensity [arb^2 s]", "cross_stderr [arb^2 s]",
             "expected_cross [arb^2 s]", "process_intensity [arb^2 s]",
             "expected_process [arb^2 s]", "measurement_intensity [arb^2 s]",
             "expected_measurement [arb^2 s]", "intensity_product [arb^4 s^2]",
             "spectral_abscissa [1/s]"},
            {}};
    for (std::size_t j = 0; j < kms.size(); ++j) {
        const double km = kms[j];
        const auto meas = measure(sys, km, Tm);
        const auto path = simulate_noisy(meas.dynamics, InputSignal::zero(), grid, seed + j);
        const auto est = estimate_noise_intensities(meas, path.noise_path, dt);
        const double e_cross = 2.0 * Tm;
        const double e_proc = meas.process_intensity();
        const double e_meas = meas.measurement_intensity();
        const double product = e_proc * e_meas;
        t.add_row({cell(km), cell(est.cross), cell(est.cross_stderr), cell(e_cross),
                   cell(est.process), cell(e_proc), cell(est.measurement), cell(e_meas),
                   cell(product), cell(spectral_abscissa(meas.dynamics.A))});
        std::ostringstream tag_s;
        tag_s << ", k_m=" << km;
        const std::string tag = tag_s.str();
        rep.check("cross intensity equals 2 T_m within 10%" + tag, rel_error(est.cross, e_cross) <= 0.1,
                  cell(est.cross) + " vs " + cell(e_cross));
        rep.check("process intensity equals 2 k_m T_m within 10%" + tag,
                  rel_error(est.process, e_proc) <= 0.1, cell(est.process) + " vs " + cell(e_proc));
        rep.check("measurement intensity equals 2 T_m / k_m within 10%" + tag,
                  rel_error(est.measurement, e_meas) <= 0.1,
                  cell(est.measurement) + " vs " + cell(e_meas));
        rep.check("intensity product equals (2 T_m)^2" + tag,
                  rel_error(product, 4.0 * Tm * Tm) <= 1e-12, cell(product));
    }
    rep.tables.push_back(std::move(t));
    return rep;
}

RunReport cmd_certify(const ExperimentConfig& cfg)
{
    const double eps = cfg.epsilon.value_or(0.05);
    const double req_tau = cfg.tau.value_or(5.0);
    const double f_horizon = cfg.horizon.value_or(2.0);
    const std::uint64_t seed = cfg.seed.value_or(1);
    require(eps > 0.0, "certify: --epsilon must be positive");
    require(req_tau > 0.0 && f_horizon > 0.0, "certify: --tau and --horizon must be positive");
    require(cfg.omega_points >= 1 && cfg.omega_max >= 0.0, "certify: invalid frequency grid");
    const auto g = make_family(cfg);

    RunReport rep;
    rep.config = {{"family", cfg.family},           {"impulse_response", g.label()},
                  {"epsilon", cell(eps)},           {"tau", cell(req_tau)},
                  {"horizon", cell(f_horizon)},     {"seed", std::to_string(seed)},
                  {"omega_max", cell(cfg.omega_max)}, {"omega_points", cell(cfg.omega_points)},
                  {"falsifier_inputs", cell(cfg.falsifier_inputs)}};

    std::vector<double> omegas(cfg.omega_points, 0.0);
    for (std::size_t i = 1; i < omegas.size(); ++i)
        omegas[i] = cfg.omega_max * static_cast<double>(i) / static_cast<double>(omegas.size() - 1);
    const auto pr = check_positive_real(g, omegas);
    rep.curves.push_back({"positive_real", "omega[rad/s]", "Re_g_hat[arb*s]", pr.omegas, pr.real_parts});
    Table prt{"positive_real",
              {"status [label]", "min_real_part [arb s]", "argmin_omega [rad/s]", "tail_bound [arb s]",
               "t_max [s]"},
              {}};
    prt.add_row({to_string(pr.status), cell(pr.min_real_part), cell(pr.argmin_omega),
                 cell(pr.tail_bound), cell(pr.t_max)});
    rep.tables.push_back(std::move(prt));
    if (pr.status == PositiveRealStatus::inconclusive) {
        rep.inconclusive("positive-real check", "tail bound " + cell(pr.tail_bound) +
                                                    " exceeds the resolution; extend the record");
        return rep;
    }
    rep.notes.push_back("positive-real check: " + to_string(pr.status) + ", min Re g_hat = " +
                        cell(pr.min_real_part) + " at omega = " + cell(pr.argmin_omega));

    CertificateOptions copts;
    copts.requested_tau = req_tau;
    ApproximationCertificate cert;
    std::optional<LosslessSystem> candidate;
    try {
        auto result = build_certificate(g, eps, copts);
        cert = result.certificate;
        candidate = result.system;
        rep.check("certificate issued", true);
    } catch (const CertificationFailed& e) {
        cert = e.partial();
        rep.check("certificate issued", false,
                  e.inequality() + " violated: " + cell(e.lhs()) + " > " + cell(e.rhs()));
    } catch (const ResourceExhausted& e) {
        rep.check("certificate issued", false, e.what());
    }

    const double C = cert.C_value;
    Table ct{"certificate",
             {"quantity [label]", "value [unit]", "limit [unit]", "unit [label]"},
             {}};
    ct.add_row({"epsilon", cell(cert.epsilon), "", "arb"});
    ct.add_row({"tau", cell(cert.tau), "", "s"});
    ct.add_row({"N", cell(cert.N), "", "1"});
    ct.add_row({"C", cell(C), "", "arb"});
    ct.add_row({"delta_tau", cell(cert.delta_tau), cell(C > 0 ? eps * eps / (8 * C) : 0.0), "arb s"});
    ct.add_row({"truncation_error", cell(cert.truncation_error), cell(eps / 2), "arb s^0.5"});
    ct.add_row({"negative_mass", cell(cert.negative_mass), cell(eps * eps / 4), "arb^2 s"});
    ct.add_row({"achieved_error", cell(cert.achieved_error), cell(eps), "arb s^0.5"});
    ct.add_row({"negative_count", cell(cert.negative_set.size()), "", "1"});
    ct.add_row({"regime_cutoff", cell(cert.regime_cutoff), "", "1"});
    rep.tables.push_back(std::move(ct));
    Table coeffs{"coefficients", {"k [1]", "a_k [arb]", "kept [bool]"}, {}};
    for (std::size_t i = 0; i < cert.coeffs.size(); ++i)
        coeffs.add_row({cell(i), cell(cert.coeffs[i]), cell(!(cert.coeffs[i] < 0.0))});
    rep.tables.push_back(std::move(coeffs));
    for (const auto& n : cert.notes)
        rep.notes.push_back(n);

    if (candidate) {
        rep.check("delta(tau) <= eps^2/(8C)", C == 0.0 || cert.delta_tau <= eps * eps / (8 * C),
                  cell(cert.delta_tau));
        rep.check("truncation error <= eps/2", cert.truncation_error <= eps / 2,
                  cell(cert.truncation_error));
        rep.check("negative mass <= eps^2/4", cert.negative_mass <= eps * eps / 4,
                  cell(cert.negative_mass));
        rep.check("achieved error <= eps", cert.achieved_error <= eps, cell(cert.achieved_error));
        rep.matrices.push_back({"J", candidate->J()});
        rep.matrices.push_back({"B", candidate->B()});
    } else if (!cert.coeffs.empty()) {
        candidate = realize_cosine_series(cert.tau, cert.positive_coeffs());
    } else {
        candidate = LosslessSystem{};
    }

    FalsifierOptions fopts;
    fopts.random_inputs = cfg.falsifier_inputs;
    fopts.seed = seed;
    const auto fr = falsify_if_direction(g, *candidate, f_horizon, fopts);
    Table ft{"falsifier",
             {"witness [1]", "K1 [energy]", "K2 [arb s]", "K3 [arb s^0.5]", "candidate_work [energy]",
              "energy_defect [energy]", "output_mismatch [arb s^0.5]",
              "mismatch_lower_bound [arb s^0.5]", "contradiction [bool]"},
             {}};
    for (std::size_t i = 0; i < fr.verified.size(); ++i) {
        const auto& w = fr.verified[i];
        ft.add_row({cell(i), cell(w.K1), cell(w.K2), cell(w.K3), cell(w.candidate_work),
                    cell(w.energy_defect), cell(w.output_mismatch), cell(w.mismatch_lower_bound),
                    cell(w.contradiction)});
    }
    rep.tables.push_back(std::move(ft));
    rep.notes.push_back("falsifier searched " + std::to_string(fr.inputs_searched) + " inputs of " +
                        fr.input_family + ", found " + std::to_string(fr.witnesses_found) +
                        " energy-extraction witnesses");
    rep.check("candidate supplied energy from rest is non-negative",
              fr.min_candidate_work >= -1e-9 && fr.max_energy_defect <= 1e-9,
              "min work " + cell(fr.min_candidate_work) + ", max defect " + cell(fr.max_energy_defect));
    bool all_contradict = true;
    for (const auto& w : fr.verified)
        all_contradict = all_contradict && w.contradiction;
    rep.check("every witness contradicts the candidate", all_contradict);
    return rep;
}

RunReport run_command(const ExperimentConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    RunReport rep;
    if (cfg.command == "approx")
        rep = cmd_approx(cfg);
    else if (cfg.command == "noise")
        rep = cmd_noise(cfg);
    else if (cfg.command == "equipartition")
        rep = cmd_equipartition(cfg);
    else if (cfg.command == "interconnect")
        rep = cmd_interconnect(cfg);
    else if (cfg.command == "measure")
        rep = cmd_measure(cfg);
    else if (cfg.command == "certify")
        rep = cmd_certify(cfg);
    else
        throw UsageError("unknown subcommand '" + cfg.command + "'");
    rep.command = cfg.command;
    rep.version = version_string();
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace lossless::harness
