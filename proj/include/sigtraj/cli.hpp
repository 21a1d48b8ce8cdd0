#pragma once

namespace sigtraj {

// Exit codes: 0 success, 2 validation/usage error, 3 numerical failure.
int run_cli(int argc, char** argv);

}  // namespace sigtraj
