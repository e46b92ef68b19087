#pragma once

namespace cfpc {

// Full command-line entry point: parses arguments, assembles the experiment
// configuration (defaults -> preset -> config file -> flags) and dispatches.
// Returns the process exit code: 0 success, 1 runtime failure, 2 usage or
// configuration error.
int run_cli(int argc, const char* const* argv);

} // namespace cfpc
