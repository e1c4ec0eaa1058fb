#pragma once

#include <CLI11.hpp>

namespace osgmm::cli {

/// Adds the split-dataset, fit, score, eval, train-toy and report subcommands.
void register_commands(CLI::App& app);

/// Parses the command line, runs the chosen subcommand and maps failures to
/// exit codes: 1 usage or validation, 2 data, 3 numerical.
int run(int argc, char** argv);

}  // namespace osgmm::cli
