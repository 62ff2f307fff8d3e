#pragma once

#include <string>
#include <vector>

namespace depthkit::cli {

/// Parses and executes one command line (program name excluded).  Returns
/// the process exit code: 0 on success, 2 for configuration and usage
/// errors, 3 for domain, degeneracy, or numeric failures.  Every successful
/// run leaves a manifest.json in its output directory, written after every
/// other output file.
int run_command(const std::vector<std::string>& args);

}  // namespace depthkit::cli
