#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "wicklab/cli/config.hpp"
#include "wicklab/error.hpp"

namespace wicklab::cli {

/// Exit status for a failure category: 2 for validation, 3 for numerics.
int exit_code(ErrorCode code);

/// Executes a parsed configuration. Throws wicklab::Error on failure.
void run(const RunConfig& cfg, std::ostream& out);

/// Full entry point: parse, dispatch, report. Errors print one line
///   error: code=E_... message="..."
/// on `err` and return the matching exit status.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace wicklab::cli
