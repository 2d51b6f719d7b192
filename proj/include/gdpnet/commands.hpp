#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "gdpnet/run_config.hpp"

namespace gdpnet::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,   // gradient check above tolerance, unexpected errors
  kExitBadInput = 2,  // config, missing file, malformed data, incompatible checkpoint
  kExitDiverged = 3,  // non-finite training loss
};

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> checkpoint;  // overrides the config key
  std::optional<std::uint64_t> seed;                // overrides seed / synth_seed
};

// Each command validates the whole configuration and its inputs before
// writing anything. They throw; run_command maps exceptions to exit codes.
void cmd_train(const RunConfig& rc, std::ostream& out);
void cmd_eval(const RunConfig& rc, std::ostream& out);
void cmd_analyze(const RunConfig& rc, std::ostream& out);
// Returns false when the error exceeds the configured tolerance.
bool cmd_gradcheck(const RunConfig& rc, std::ostream& out);
void cmd_synth(const RunConfig& rc, std::ostream& out);

/// Loads the config, applies overrides, runs `command` and converts errors
/// into a message on `err` plus an exit code.
int run_command(const std::string& command, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

}  // namespace gdpnet::cli
