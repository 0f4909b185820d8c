#pragma once

#include "commands.hpp"

namespace CLI {
class App;
}

namespace lossless::harness {

/// Registers the subcommands and flags on `app`, writing parsed values into `cfg`.
/// Flags given on the command line override values from --config.
void configure_cli(CLI::App& app, ExperimentConfig& cfg);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv);

} // namespace lossless::harness
