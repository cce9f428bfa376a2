// Command-line front-end: one subcommand per mode.

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "seqmeas/cli.hpp"

namespace {

struct Options {
  std::string input;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace seqmeas::cli;
  CLI::App app{"Statistics of consecutive quantum measurements"};
  app.require_subcommand(1);

  Options opts;
  std::optional<Mode> chosen;
  for (Mode mode : all_modes()) {
    auto* sub = app.add_subcommand(std::string(to_string(mode)));
    sub->add_option("--input", opts.input, "JSON run description")->required();
    sub->add_option("--output", opts.output, "CSV destination (default: stdout)");
    sub->add_option("--seed", opts.seed, "overrides the seed in the input");
    sub->add_option("--tolerance", opts.tolerance, "overrides the tolerance in the input");
    sub->callback([&chosen, mode] { chosen = mode; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidInput;
  }

  const bool to_stdout = opts.output.empty() || opts.output == "-";
  std::ostream& log = to_stdout ? std::cerr : std::cout;
  try {
    RunSpec spec = load_spec(opts.input, *chosen);
    spec.output_path = opts.output;
    if (opts.seed) spec.seed = *opts.seed;
    if (opts.tolerance) {
      if (!(*opts.tolerance > 0.0)) {
        std::cerr << "error: --tolerance must be positive\n";
        return kExitInvalidInput;
      }
      spec.tolerance = *opts.tolerance;
    }
    return run(spec, log);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
