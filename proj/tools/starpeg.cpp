#include <CLI11.hpp>

#include <iostream>

#include "starpeg/cli/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Graceful inscribed squares in star-shaped curves and tables on the sphere"};
  app.require_subcommand(1, 1);

  starpeg::cli::RunOptions opts;
  std::string out_path, svg_path;
  std::uint64_t seed = 0;

  const char* commands[] = {"peg-find", "peg-parity", "peg-continue", "table-find", "table-center", "fiber-parity"};
  const char* help[] = {
      "find all graceful squares of a star-shaped curve",
      "count graceful squares and report their parity",
      "track the ellipse's square to the target curve",
      "find tables of radius a for a spherical field (direct solver)",
      "find tables as zeros of the fiber center map",
      "count fiber graceful squares over a sphere grid",
  };
  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(commands[i], help[i]);
    sub->add_option("--config", opts.config_path, "YAML run configuration")->required();
    sub->add_option("--out", out_path, "result document path (default: stdout)");
    sub->add_option("--svg", svg_path, "SVG plot path");
    sub->add_option("--seed", seed, "random seed (overrides the config)");
    sub->add_flag("--timing", opts.timing, "record wall-clock seconds in the result");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : starpeg::cli::kExitInputError;
  }

  CLI::App* sub = app.get_subcommands().front();
  opts.command = sub->get_name();
  if (sub->count("--out")) opts.out_path = out_path;
  if (sub->count("--svg")) opts.svg_path = svg_path;
  if (sub->count("--seed")) opts.seed = seed;
  return starpeg::cli::run(opts, std::cout, std::cerr);
}
