#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "hrvqe/config.hpp"
#include "hrvqe/studies.hpp"

namespace hrvqe {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitAssertion = 2, kExitNumerical = 3 };

/// Study names accepted by `study <name>`, in selfcheck-all order.
const std::vector<std::string>& study_names();

/// Runs one study with parameters taken from the config; unset values use
/// the study defaults.
StudyResult run_study(const std::string& name, const RunConfig& config);

/// Entry point of the hrvqe command line. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hrvqe
