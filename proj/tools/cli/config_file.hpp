#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace slca::cli {

/// Parses a flat TOML-style file of `key = value` lines into flag tokens
/// (`--key value`). Booleans become bare flags when true and are dropped
/// when false; `#` starts a comment; string values may be quoted.
/// Throws IoError if unreadable and InvalidArgument on malformed lines.
std::vector<std::string> config_file_tokens(const std::filesystem::path& path);

/// Splices tokens from any `--config <path>` found in args directly after
/// the subcommand name, so explicit flags (parsed later) take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace slca::cli
