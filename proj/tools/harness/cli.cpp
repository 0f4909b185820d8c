#include "cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace lossless::harness {

namespace {

constexpr const char* config_schema = R"(Config files use TOML/INI syntax with one section per subcommand:

  [noise]
  seed = 42
  trials = 10000
  harmonics = [200]

Keys are the long flag names without dashes; list values use [a, b, c].)";

struct Subcommand {
    const char* name;
    const char* help;
};

constexpr Subcommand subcommands[] = {
    {"approx", "K_N step-response error against the pointwise bound over an N sweep"},
    {"noise", "thermal ensemble covariance and band-limited output variance"},
    {"equipartition", "maximum-entropy covariance and periodic white-noise covariance"},
    {"interconnect", "lossless interconnection and heat-bath closure"},
    {"measure", "measurement back action: process/measurement noise intensities over a k_m sweep"},
    {"certify", "lossless approximation certificate for an impulse response"},
};

} // namespace

void configure_cli(CLI::App& app, ExperimentConfig& cfg)
{
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_config("--config", "", "configuration file (TOML/INI); command-line flags win")
        ->check(CLI::ExistingFile);
    app.footer(config_schema);

    for (const auto& s : subcommands) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->callback([&cfg, name = std::string(s.name)] { cfg.command = name; });
        sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "base seed (required for stochastic runs)");
        sub->add_option("--trials", cfg.trials, "Monte Carlo trials")->check(CLI::NonNegativeNumber);
        sub->add_option("--grid-points", cfg.grid_points, "time-grid points");
        sub->add_option("--epsilon", cfg.epsilon, "target L2 error");
        sub->add_option("--tau", cfg.tau, "recurrence time / requested horizon [s]");
        sub->add_option("--harmonics", cfg.harmonics, "harmonic count(s) N[,N...]")->delimiter(',');
        sub->add_option("--bandwidth", cfg.bandwidth, "low-pass half-width B [rad/s]");
        sub->add_option("--km", cfg.km, "measurement gain(s) k_m[,k_m...]")->delimiter(',');
        sub->add_option("--temperature", cfg.temperature, "temperature T");
        sub->add_option("--gain", cfg.gain, "system gain k");
        sub->add_option("--horizon", cfg.horizon, "simulation horizon [s]");
        sub->add_flag("--plot-script", cfg.plot_script, "also write a gnuplot script for the curves");
    }
    auto* approx = app.get_subcommand("approx");
    approx->add_option("--input", cfg.input, "one_minus_cos | sine | sin_squared")->capture_default_str();
    approx->add_option("--omega", cfg.omega, "input frequency [rad/s]")->capture_default_str();

    auto* eq = app.get_subcommand("equipartition");
    eq->add_option("--energy", cfg.energy, "mean energy E")->capture_default_str();
    eq->add_option("--dim", cfg.dim, "state dimension n")->capture_default_str();
    eq->add_option("--intensity", cfg.intensity, "white-noise intensity i")->capture_default_str();

    auto* ic = app.get_subcommand("interconnect");
    ic->add_option("--omega", cfg.omega, "rotation frequency of the first system")->capture_default_str();

    auto* ms = app.get_subcommand("measure");
    ms->add_option("--step", cfg.step, "time step [s]")->capture_default_str();
    ms->add_option("--steps", cfg.steps, "number of steps")->capture_default_str();
    ms->add_option("--omega", cfg.omega, "rotation frequency of the measured system")->capture_default_str();

    auto* ce = app.get_subcommand("certify");
    ce->add_option("--family", cfg.family, "exp | neg_exp | damped_cos | zero | sampled")
        ->capture_default_str();
    ce->add_option("--amplitude", cfg.amplitude, "family amplitude")->capture_default_str();
    ce->add_option("--rate", cfg.rate, "family decay rate [1/s]")->capture_default_str();
    ce->add_option("--family-omega", cfg.family_omega, "damped_cos frequency [rad/s]")
        ->capture_default_str();
    ce->add_option("--samples", cfg.samples_path, "two-column file t, g(t) for --family sampled");
    ce->add_option("--omega-max", cfg.omega_max, "upper end of the positive-real grid [rad/s]")
        ->capture_default_str();
    ce->add_option("--omega-points", cfg.omega_points, "points of the positive-real grid")
        ->capture_default_str();
    ce->add_option("--falsifier-inputs", cfg.falsifier_inputs, "random inputs tried by the falsifier")
        ->capture_default_str();
}

int run_cli(int argc, char** argv)
{
    CLI::App app{"Lossless approximations of dissipative systems: experiment driver"};
    app.set_version_flag("--version", version_string());
    ExperimentConfig cfg;
    configure_cli(app, cfg);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    cfg.exec = execution_from_env();

    try {
        OutputLock lock(cfg.out_dir);
        const auto rep = run_command(cfg);
        write_report(rep, cfg.out_dir, cfg.plot_script);
        std::cout << to_text(rep);
        return rep.exit_code();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace lossless::harness
