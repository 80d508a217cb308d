#include <CLI11.hpp>

#include <cstdio>

// Command-line driver.  Subcommands are registered as the corresponding
// library modules land; run with --help for the current surface.
int main(int argc, char** argv) {
  CLI::App app{"cylinder geometry laboratory"};
  app.set_version_flag("--version", "cylab 0.1");
  CLI11_PARSE(app, argc, argv);
  std::puts("no subcommand given; see --help");
  return 2;
}
