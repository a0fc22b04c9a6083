#pragma once

#include <ostream>

namespace copyguard::cli {

// Exit status: 0 ok, 2 input error, 3 external service, 4 internal.
// Failures print {"error": {...}} as one JSON line on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace copyguard::cli
