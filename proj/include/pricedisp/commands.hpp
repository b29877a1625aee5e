#pragma once

// Subcommands behind the `pricedisp` executable. Each reads a Config, writes
// its tables plus manifest.txt into an output directory and reports the
// files it produced.

#include "pricedisp/config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pdisp {

inline constexpr const char* kVersion = "pricedisp 0.1.0";

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitModel = 2 };

struct RunRequest {
    std::string command;
    Config config;
    std::optional<std::uint64_t> seed;  // overrides the config's `seed`
    std::filesystem::path out_dir = ".";
};

const std::vector<std::string>& command_names();

/// Runs one command and returns the artifact file names (manifest last).
/// Throws the library's exceptions unchanged.
std::vector<std::string> dispatch(const RunRequest& request);

/// dispatch() with exceptions mapped to exit codes; diagnostics go to `err`.
int execute(const RunRequest& request, std::ostream& err);

/// Writes `content` to dir/name through a temporary file and a rename.
void write_atomically(const std::filesystem::path& dir, const std::string& name, const std::string& content);

}  // namespace pdisp
