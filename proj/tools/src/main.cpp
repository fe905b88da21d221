#include <cstdio>
#include <exception>

#include "CLI11.hpp"

#include "lsgda/errors.hpp"
#include "lsgda/version.hpp"
#include "lsgda_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Distributed minimax simulator: local descent ascent with "
               "periodic averaging"};
  app.set_version_flag("--version", lsgda::kVersion);
  app.require_subcommand(1);

  lsgda::cli::CommonFlags flags;
  uint64_t seed_value = 0;
  bool parallel = false;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* cfg = sub->add_option("--config", flags.config_path,
                                "JSON config file");
    if (needs_config) cfg->required();
    sub->add_option("--seed", seed_value,
                    "override the seed found in the config")
        ->expected(1);
    sub->add_option("--output", flags.output_dir,
                    "output directory (default: current)");
    sub->add_flag("--quiet", flags.quiet, "suppress progress output");
  };

  CLI::App* gen = app.add_subcommand(
      "generate-data", "synthesize or ingest a federated dataset file");
  add_common(gen, true);

  CLI::App* run = app.add_subcommand(
      "run", "execute one configured experiment, writing CSV + JSON");
  add_common(run, true);
  run->add_flag("--parallel", parallel,
                "run workers on threads (bitwise identical output)");

  CLI::App* sweep = app.add_subcommand(
      "sweep-tau", "rerun one experiment across averaging gaps");
  add_common(sweep, true);

  CLI::App* check = app.add_subcommand(
      "check-gradients",
      "finite-difference audit of every built-in problem family");
  add_common(check, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed() && gen->count("--seed") > 0) {
      flags.seed_override = seed_value;
    }
    if (run->parsed() && run->count("--seed") > 0) {
      flags.seed_override = seed_value;
    }
    if (sweep->parsed() && sweep->count("--seed") > 0) {
      flags.seed_override = seed_value;
    }

    if (gen->parsed()) return lsgda::cli::cmd_generate_data(flags);
    if (run->parsed()) return lsgda::cli::cmd_run(flags, parallel);
    if (sweep->parsed()) return lsgda::cli::cmd_sweep_tau(flags);
    return lsgda::cli::cmd_check_gradients(flags.quiet);
  } catch (const lsgda::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
}
