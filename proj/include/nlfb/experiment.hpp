#pragma once

#include <string>

namespace nlfb {

/// Runs one declarative experiment config (see docs/config.md): parses and
/// validates the config (unknown keys are errors), executes the subcommand,
/// writes CSVs, SVG plots and a manifest into out_dir. Returns 0 when all
/// pass predicates hold, 2 when the run completed but a predicate failed.
/// Config and runtime errors throw; the CLI maps them to exit code 1.
int run_experiment(const std::string& config_path, const std::string& out_dir,
                   bool verbose = false);

}  // namespace nlfb
