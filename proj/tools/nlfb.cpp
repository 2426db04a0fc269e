#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "nlfb/experiment.hpp"
#include "nlfb/version.hpp"

// Thin wrapper: everything about a run lives in the JSON config; the command
// line only says which config, where to write, and how chatty to be.
int main(int argc, char** argv) {
  CLI::App app{"nlfb: numerical laboratory for inhomogeneous nonlocal "
               "operators and free boundaries"};
  app.set_version_flag("--version", nlfb::kVersion);

  std::string config, out_dir = "out";
  bool verbose = false;
  app.add_option("config", config, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("-o,--out", out_dir, "output directory (default: out)");
  app.add_flag("-v,--verbose", verbose, "print a summary line per run");

  CLI11_PARSE(app, argc, argv);

  try {
    return nlfb::run_experiment(config, out_dir, verbose);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
