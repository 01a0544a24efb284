#pragma once

namespace fwmod {

// Entry point for the fwmod command line tool. Returns the process exit
// code: 0 success, 1 internal error, 2 config/usage, 3 missing artifact,
// 4 endpoint failure.
int cli_main(int argc, const char* const* argv);

}  // namespace fwmod
