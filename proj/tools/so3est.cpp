#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "so3est/cli/commands.hpp"
#include "so3est/cli/io.hpp"

int main(int argc, char** argv) {
  using so3est::cli::CommandOptions;

  CLI::App app{"Attitude determination and filtering on SO(3)"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::uint64_t seed = 0;
  int trials = 0;
  std::string mode;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* config = sub->add_option("--config", opts.config, "JSON config file (schema 1)");
    if (needs_config) config->required()->check(CLI::ExistingFile);
    sub->add_option("--output", opts.output,
                    "Output file (default stdout); relative paths honour SO3EST_OUTPUT_DIR");
  };
  const auto add_filter_flags = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Master noise seed (overrides scenario.noise.seed)");
    sub->add_option("--mode", mode, "Filter variant")->check(CLI::IsMember({"no-gyro", "with-gyro"}));
  };

  add_common(app.add_subcommand("paper-example", "Reproduce the published seven-vector example"), false);
  add_common(app.add_subcommand("determine", "One-shot attitude determination from vector sets"), true);
  add_common(app.add_subcommand("propagate", "Integrate rigid-body attitude dynamics"), true);
  auto* filter = app.add_subcommand("filter", "Run a filter on a simulated scenario; CSV time series");
  add_common(filter, true);
  add_filter_flags(filter);
  auto* mc = app.add_subcommand("montecarlo", "Monte-Carlo filter campaign; JSON summary");
  add_common(mc, true);
  add_filter_flags(mc);
  mc->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  if (const auto* o = sub->get_option_no_throw("--seed"); o != nullptr && o->count() > 0) opts.seed = seed;
  if (const auto* o = sub->get_option_no_throw("--trials"); o != nullptr && o->count() > 0) opts.trials = trials;
  if (!mode.empty()) opts.mode = so3est::io::parse_mode(mode);

  return so3est::cli::run_command(sub->get_name(), opts, std::cout, std::cerr);
}
