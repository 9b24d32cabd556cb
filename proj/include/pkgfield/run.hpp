#pragma once

#include "pkgfield/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pkgfield {

enum ExitCode : int {
    kExitSuccess = 0,
    kExitUsage = 1,          // bad flags, bad config, bad input files
    kExitNumerical = 2,      // solver failure
    kExitThreshold = 3,      // compare error above --fail-above-db
};

struct RunOptions {
    std::optional<double> fail_above_db;
};

/// Executes one run. Map mode writes the field CSV and a summary with the
/// sweep wall-clock time; link mode prints the component breakdown; compare
/// mode writes the report and error map. Library errors propagate as Error.
int run(const RunConfig& config, const RunOptions& options, std::ostream& out);

/// Command-line front end; never throws, returns an ExitCode.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pkgfield
