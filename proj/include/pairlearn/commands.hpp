#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pairlearn/config.hpp"

namespace pairlearn {

struct CommandContext {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override; // replaces the command's operative seed
};

// Joins relative paths onto the output directory; absolute paths pass through.
std::string resolve_output_path(const CommandContext& ctx, const std::string& path);

// CLI command bodies. Each throws on failure (ConfigError, ContractError,
// FormatError, ...) and writes its artifacts before returning.
void cmd_gen_data(const ExperimentConfig& cfg, const CommandContext& ctx);
void cmd_train(const ExperimentConfig& cfg, const CommandContext& ctx);
void cmd_eval(const ExperimentConfig& cfg, const CommandContext& ctx);
void cmd_landscape(const ExperimentConfig& cfg, const CommandContext& ctx);

} // namespace pairlearn
