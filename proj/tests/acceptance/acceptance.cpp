// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include "harness/commands.hpp"
#include "harness/report.hpp"

#include <lossless/lossless.hpp>

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace lossless;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

std::string num(double v)
{
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

double column(const harness::Table& t, std::size_t row, const std::string& prefix)
{
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        if (t.columns[c].rfind(prefix, 0) == 0)
            return std::stod(t.rows.at(row).at(c));
    throw std::runtime_error("no column " + prefix + " in " + t.name);
}

// Criterion 1
Outcome energy_conservation()
{
    double worst = 0.0;
    std::mt19937_64 rng(2024);
    auto drift = [&](const LosslessSystem& sys) {
        const auto x0 = oracle::random_vector(sys.dim(), rng);
        const auto tr = simulate(sys, InputSignal::zero(), x0, uniform_grid(0.0, 100.0, 10001));
        const double u0 = tr.energy(0);
        for (std::size_t i = 0; i < tr.size(); ++i)
            worst = std::max(worst, std::abs(tr.energy(i) - u0) / std::max(1.0, u0));
    };
    for (Eigen::Index n : {2, 7, 25, 64, 128, 201}) {
        const auto r = oracle::random_lossless(n, rng, 3.0);
        drift(make_lossless(r.J, r.B));
    }
    drift(build_KN(1.0, 10.0, 100).sys);
    return {worst <= 1e-9, "max relative drift " + num(worst)};
}

// Criterion 2
Outcome harmonic_error_bound()
{
    const auto grid = uniform_grid(0.0, 10.0, 2001);
    const auto u = inputs::one_minus_cos(1.0);
    bool holds = true;
    double e100 = 0.0, e200 = 0.0, oracle_gap = 0.0;
    std::string sweep;
    for (std::size_t N : {25u, 50u, 100u, 200u}) {
        const auto r = prop1_bound(build_KN(1.0, 10.0, N), u, grid);
        holds = holds && r.holds;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double ref = std::abs(1.0 - std::cos(grid[i]) -
                                        oracle::kn_response_one_minus_cos(1.0, 10.0, N, grid[i]));
            oracle_gap = std::max(oracle_gap, std::abs(ref - r.observed_error[i]));
            holds = holds && ref <= r.bound_curve[i];
        }
        if (N == 100)
            e100 = r.sup_error();
        if (N == 200)
            e200 = r.sup_error();
        sweep += " N=" + std::to_string(N) + ":" + num(r.sup_error());
    }
    const double ratio = e200 / e100;
    return {holds && ratio <= 0.6 && oracle_gap <= 1e-8,
            "sup errors" + sweep + ", ratio " + num(ratio) + ", oracle gap " + num(oracle_gap)};
}

harness::ExperimentConfig noise_config()
{
    harness::ExperimentConfig cfg;
    cfg.command = "noise";
    cfg.harmonics = {200};
    cfg.gain = 2.0;
    cfg.tau = 10.0;
    cfg.temperature = 0.5;
    cfg.trials = 10000;
    cfg.bandwidth = 1.0;
    cfg.seed = 20240607;
    cfg.exec = harness::execution_from_env();
    return cfg;
}

harness::ExperimentConfig measure_config()
{
    harness::ExperimentConfig cfg;
    cfg.command = "measure";
    cfg.km = {0.1, 1.0, 10.0};
    cfg.temperature = 1.0;
    cfg.step = 1e-3;
    cfg.steps = 100000;
    cfg.seed = 77;
    return cfg;
}

// Criterion 3
Outcome johnson_nyquist()
{
    const auto rep = harness::cmd_noise(noise_config());
    const auto* band = rep.table("noise_band");
    const double value = column(*band, 0, "spectral_integral");
    const double rel = std::abs(value - 4.0) / 4.0;
    return {rel <= 0.10, "band-limited power " + num(value) + " vs 4TkB = 4, relative error " + num(rel)};
}

// Criterion 4
Outcome equipartition()
{
    const auto st = maxent_covariance(10.5, 21);
    const bool maxent_exact = st.temperature == 1.0 && st.X == Eigen::MatrixXd::Identity(21, 21);
    double worst = 0.0;
    for (auto [k, tau, N, i] : {std::tuple{1.0, oracle::pi, 10u, 1.0}, std::tuple{2.0, 10.0, 200u, 0.5},
                                std::tuple{0.3, 1.0, 50u, 3.0}}) {
        const auto real = build_KN(k, tau, N);
        const auto X = whitenoise_covariance(real, i, 2.0 * tau);
        const Eigen::MatrixXd ref = (i * k / tau) * Eigen::MatrixXd::Identity(real.dim(), real.dim());
        worst = std::max(worst, (X - ref).cwiseAbs().maxCoeff());
    }
    return {maxent_exact && worst <= 1e-12,
            std::string("maxent T=1, X=I ") + (maxent_exact ? "exact" : "NOT exact") +
                ", white-noise max deviation " + num(worst)};
}

// Criterion 5
Outcome back_action()
{
    const auto rep = harness::cmd_measure(measure_config());
    const auto* t = rep.table("measure_intensities");
    bool ok = true;
    std::string detail;
    for (std::size_t r = 0; r < t->rows.size(); ++r) {
        const double km = column(*t, r, "k_m");
        const double cross = column(*t, r, "cross_intensity");
        const double proc = column(*t, r, "process_intensity");
        const double meas = column(*t, r, "measurement_intensity");
        const double rc = std::abs(cross - 2.0) / 2.0;
        const double rp = std::abs(proc - 2.0 * km) / (2.0 * km);
        const double rm = std::abs(meas - 2.0 / km) / (2.0 / km);
        ok = ok && rc <= 0.1 && rp <= 0.1 && rm <= 0.1;
        detail += (detail.empty() ? "" : "; ") + std::string("k_m=") + num(km) + ": cross " + num(cross) +
                  ", process " + num(proc) + ", measurement " + num(meas);
    }
    return {ok, detail};
}

// Criterion 6
Outcome certified_approximation()
{
    const auto g = ImpulseResponse::exponential(1.0, 1.0);
    const double eps = 0.05;
    CertificateOptions opts;
    opts.requested_tau = 5.0;
    const auto res = build_certificate(g, eps, opts);
    const auto& cert = res.certificate;
    const double C = (2.0 / oracle::pi) * (1.0 + 1.0);
    const double tau = cert.tau;
    const auto plus = cert.positive_coeffs();
    const double achieved = std::sqrt(oracle::integrate(
        [&](double t) {
            const double d = std::exp(-t) - oracle::cosine_series(tau, plus, t);
            return d * d;
        },
        0.0, tau, static_cast<int>(std::max<std::size_t>(400, 4 * plus.size()))));
    double neg = 0.0;
    for (std::size_t k = 0; k < cert.coeffs.size(); ++k)
        if (cert.coeffs[k] < 0.0)
            neg += (k == 0 ? 0.25 : 0.5) * tau * cert.coeffs[k] * cert.coeffs[k];
    const double delta = std::exp(-tau);
    const bool ok = achieved <= eps && neg <= 6.25e-4 && delta <= eps * eps / (8.0 * C) &&
                    std::abs(cert.C_value - C) <= 1e-12;
    return {ok, "tau " + num(tau) + ", N " + std::to_string(cert.N) + ", L2 error " + num(achieved) +
                    ", negative mass " + num(neg) + ", delta(tau) " + num(delta) + " <= " +
                    num(eps * eps / (8.0 * C))};
}

// Criterion 7
Outcome non_dissipative_refusal()
{
    const auto g = ImpulseResponse::exponential(-1.0, 1.0);
    const auto pr = check_positive_real(g, uniform_grid(0.0, 50.0, 2001));
    const double oracle_min = -oracle::re_transform_exp(1.0, 1.0, pr.argmin_omega);
    bool pr_ok = !pr.is_positive_real && pr.argmin_omega == 0.0 &&
                 std::abs(pr.min_real_part - (-1.0)) <= 1e-6 &&
                 std::abs(pr.min_real_part - oracle_min) <= 1e-6;

    bool cert_failed = false;
    try {
        build_certificate(g, 0.05);
    } catch (const CertificationFailed&) {
        cert_failed = true;
    }

    std::mt19937_64 rng(11);
    const auto r = oracle::random_lossless(12, rng);
    const std::vector<LosslessSystem> candidates{
        build_KN(1.0, 10.0, 50).sys, make_lossless(r.J, r.B),
        build_certificate(ImpulseResponse::exponential(1.0, 1.0), 0.05).system};
    bool witnesses = true;
    double min_work = INFINITY, max_defect = 0.0;
    for (const auto& cand : candidates) {
        const auto rep = falsify_if_direction(g, cand, 2.0);
        witnesses = witnesses && rep.witness_found() && !rep.verified.empty();
        for (const auto& w : rep.verified) {
            witnesses = witnesses && w.K1 > 0.0 && w.contradiction;
            min_work = std::min(min_work, w.candidate_work);
            max_defect = std::max(max_defect, w.energy_defect);
        }
    }
    const bool ok = pr_ok && cert_failed && witnesses && min_work >= -1e-9 && max_defect <= 1e-9;
    return {ok, "min Re g_hat " + num(pr.min_real_part) + " at omega " + num(pr.argmin_omega) +
                    ", certificate " + (cert_failed ? "refused" : "ISSUED") +
                    ", candidate supplied energy >= " + num(min_work) + ", defect " + num(max_defect)};
}

// Criterion 8
Outcome fluctuation_dissipation()
{
    const auto real = build_KN(1.0, 10.0, 50);
    const auto lags = uniform_grid(0.0, 10.0, 501);
    const auto rep = fluctuation_dissipation_check(
        real.sys, 2.0 * Eigen::MatrixXd::Identity(real.dim(), real.dim()), lags, 1.5);
    return {rep.checked && rep.max_defect <= 1e-8, "max defect " + num(rep.max_defect)};
}

std::string csv_bytes(const harness::RunReport& rep, const fs::path& dir)
{
    fs::remove_all(dir);
    harness::write_report(rep, dir, false);
    std::string all;
    for (const auto& t : rep.tables) {
        std::ifstream in(dir / (t.name + ".csv"), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        all += s.str();
    }
    fs::remove_all(dir);
    return all;
}

// Criterion 9
Outcome determinism()
{
    const auto base = fs::temp_directory_path() / "lossless-acceptance";
    auto noise_serial = noise_config();
    noise_serial.exec = {1};
    const auto n1 = csv_bytes(harness::cmd_noise(noise_config()), base / "n1");
    const auto n2 = csv_bytes(harness::cmd_noise(noise_serial), base / "n2");
    const auto m1 = csv_bytes(harness::cmd_measure(measure_config()), base / "m1");
    const auto m2 = csv_bytes(harness::cmd_measure(measure_config()), base / "m2");
    const bool ok = !n1.empty() && !m1.empty() && n1 == n2 && m1 == m2;
    return {ok, "noise CSV " + std::to_string(n1.size()) + " bytes " + (n1 == n2 ? "identical" : "DIFFER") +
                    ", measure CSV " + std::to_string(m1.size()) + " bytes " +
                    (m1 == m2 ? "identical" : "DIFFER")};
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "energy conservation", 10.0, energy_conservation},
        {2, "harmonic approximation error bound", 30.0, harmonic_error_bound},
        {3, "Johnson-Nyquist band power", 120.0, johnson_nyquist},
        {4, "equipartition closed forms", 1.0, equipartition},
        {5, "back-action trade-off", 60.0, back_action},
        {6, "certified memory approximation", 30.0, certified_approximation},
        {7, "non-dissipative memory refused", 30.0, non_dissipative_refusal},
        {8, "fluctuation-dissipation", 10.0, fluctuation_dissipation},
        {9, "determinism", 300.0, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.budget_seconds;
        const bool pass = out.ok && in_time;
        failures += pass ? 0 : 1;
        std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << "): "
                  << out.detail << "; " << num(secs) << " s of " << c.budget_seconds << " s"
                  << (in_time ? "" : " OVER BUDGET") << std::endl;
    }
    std::cout << (failures == 0 ? "all acceptance criteria passed" : "acceptance failures: ")
              << (failures == 0 ? "" : std::to_string(failures)) << std::endl;
    return failures == 0 ? 0 : 1;
}
