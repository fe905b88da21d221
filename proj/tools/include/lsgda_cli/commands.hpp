#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace lsgda::cli {

// Flags shared by the subcommands. seed_override replaces the seed found in
// the config (master_seed for runs, the generator seed for datasets).
struct CommonFlags {
  std::string config_path;
  std::string output_dir = ".";
  std::optional<uint64_t> seed_override;
  bool quiet = false;
};

// Each command returns a process exit code: 0 on success, 1 on failure.
// Errors derived from lsgda::Error are thrown and reported by the caller.
int cmd_generate_data(const CommonFlags& flags);
int cmd_run(const CommonFlags& flags, bool parallel);
int cmd_sweep_tau(const CommonFlags& flags);
int cmd_check_gradients(bool quiet);

} // namespace lsgda::cli
