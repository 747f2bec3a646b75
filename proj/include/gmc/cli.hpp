#pragma once

namespace gmc {

// Full command-line entry point (eval / robustness / ablation / combine).
// Returns the process exit code: 0 success, 2 configuration error, 3 data
// error.
int run_cli(int argc, const char* const* argv);

} // namespace gmc
