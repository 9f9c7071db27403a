#include "stablab_cli/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <ostream>

#include "CLI11.hpp"
#include "context.hpp"
#include "stablab/error.hpp"
#include "stablab/parallel.hpp"

#ifndef STABLAB_VERSION
#define STABLAB_VERSION "unknown"
#endif

namespace stablab::cli {

namespace {

using Command = std::function<void(const Context&)>;

std::filesystem::path resolve_output_dir(const std::string& flag, const ExperimentConfig& cfg) {
  if (!flag.empty()) return flag;
  if (cfg.output.directory) return *cfg.output.directory;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return "stablab-out";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation lab for alpha-stable random fields", "stablab"};
  app.set_version_flag("--version", STABLAB_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string output;
  std::size_t workers = 0;
  int verbosity = 0;
  app.add_option("-c,--config", config_path, "Experiment configuration (INI or JSON)")->required();
  auto* seed_opt = app.add_option("--seed", seed, "Override budget.seed");
  app.add_option("-o,--output", output,
                 std::string("Output directory (default: output.directory, then $") + kOutputDirEnv + ")");
  app.add_option("-w,--workers", workers, "Worker threads (0: one per logical core)");
  app.add_flag("-v,--verbose", verbosity, "Log progress to stderr (repeat for more)");

  const std::pair<const char*, Command> commands[] = {
      {"simulate", cmd_simulate},       {"constants", cmd_constants}, {"moment-index", cmd_moment_index},
      {"modulus", cmd_modulus},         {"net-info", cmd_net_info},
  };
  const char* descriptions[] = {
      "Simulate LePage-series paths on a net",
      "Report series constants, normalizations and envelope fits",
      "Estimate the maximal moment index of a reference sequence",
      "Increment maxima and modulus-of-continuity ratios",
      "Net sizes and neighbor counts",
  };
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, descriptions[i]);
    sub->fallthrough();
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const auto chosen = std::find_if(subs.begin(), subs.end(), [](CLI::App* s) { return s->parsed(); });
  const auto& [name, command] = commands[chosen - subs.begin()];

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (seed_opt->count() > 0) cfg.budget.seed = seed;
    Manifest manifest(resolve_output_dir(output, cfg), name, cfg);
    const Context ctx{cfg, resolve_output_dir(output, cfg), workers == 0 ? default_workers() : workers,
                      verbosity, out, err, manifest};
    try {
      command(ctx);
      manifest.finish("complete");
    } catch (...) {
      manifest.finish("failed");
      throw;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace stablab::cli
