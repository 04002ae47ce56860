#pragma once

#include "blackstock/run_config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace blackstock {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitDiverged = 2;
inline constexpr int kExitPrecondition = 3;

struct RunOptions {
  std::optional<std::filesystem::path> output;  // overrides output_dir
  int jobs = 0;                                 // sweep workers; 0 = hardware threads
  bool quiet = false;
};

// Dispatches one of simulate, fit, threshold, weighted-study,
// verify-inequalities, sweep. Errors go to `err`, one-line status to `out`.
int run(std::string_view subcommand, const RunConfig& cfg, const RunOptions& options, std::ostream& out,
        std::ostream& err);

nlohmann::json inequality_report(const InequalitySettings& settings, std::uint64_t seed);

// blackstock <subcommand> --config <path> [--output <dir>] [--jobs N]
int cli_main(int argc, const char* const* argv);

}  // namespace blackstock
