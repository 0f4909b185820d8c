#pragma once

#include "report.hpp"

#include <lossless/errors.hpp>
#include <lossless/numerics.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lossless::harness {

/// Invalid configuration; the CLI maps it to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Parameters for every subcommand. Unset optionals take the subcommand's default.
struct ExperimentConfig {
    std::string command;
    std::filesystem::path out_dir = "lossless-out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> grid_points;
    std::optional<double> epsilon;
    std::optional<double> tau;
    std::vector<std::size_t> harmonics;
    std::optional<double> bandwidth;
    std::vector<double> km;
    std::optional<double> temperature;

    std::optional<double> gain;
    std::optional<double> horizon;
    std::string input = "one_minus_cos";
    double omega = 1.0;
    double energy = 10.5;
    std::size_t dim = 21;
    double intensity = 1.0;
    double step = 1e-3;
    std::size_t steps = 100000;
    std::string family = "exp";
    double amplitude = 1.0;
    double rate = 1.0;
    double family_omega = 0.0;
    std::string samples_path;
    double omega_max = 50.0;
    std::size_t omega_points = 2001;
    std::size_t falsifier_inputs = 1000;
    bool plot_script = false;
    ExecutionOptions exec;
};

RunReport cmd_approx(const ExperimentConfig& cfg);
RunReport cmd_noise(const ExperimentConfig& cfg);
RunReport cmd_equipartition(const ExperimentConfig& cfg);
RunReport cmd_interconnect(const ExperimentConfig& cfg);
RunReport cmd_measure(const ExperimentConfig& cfg);
RunReport cmd_certify(const ExperimentConfig& cfg);

/// Dispatches on cfg.command and fills version and wall-clock.
RunReport run_command(const ExperimentConfig& cfg);

/// git-describe style version baked in at configure time.
std::string version_string();

/// Thread count from LOSSLESS_APPROX_THREADS (a cap on hardware concurrency).
ExecutionOptions execution_from_env();

} // namespace lossless::harness
