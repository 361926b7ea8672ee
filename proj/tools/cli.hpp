#pragma once

#include <ostream>

#include "checkseg/error.hpp"

namespace checkseg::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 2,
    kBandNotFound = 3,
    kUnknownBank = 4,
    kNoDifference = 5,
    kRecognitionFailure = 6,
};

int exit_code(ErrorCode code);

/// Parses and runs one command. Diagnostics go to `err` as a single line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace checkseg::cli
