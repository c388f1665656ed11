#pragma once

namespace iceline::cli {

// Entry point for the `iceline` executable.  Exit codes: 0 success,
// 1 runtime failure (partial outputs preserved), 2 bad invocation or
// degenerate configuration.
int run_cli(int argc, char** argv);

}  // namespace iceline::cli
