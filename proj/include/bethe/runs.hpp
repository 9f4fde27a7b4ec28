#pragma once

#include <string>

namespace bethe {

// Executes one named command with a JSON parameter object and returns the
// report document: tool metadata, the resolved parameter echo (thread count
// excluded so reports are byte-identical across parallelism settings), and
// the command result. Unknown commands or parameters throw ConfigError;
// failed assertions throw VerificationError; numerical breakdowns throw
// NumericsError.
std::string run_command(const std::string& command, const std::string& params_json);

}  // namespace bethe
