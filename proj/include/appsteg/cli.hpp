#pragma once

namespace appsteg {

/// Exit codes: 0 success, 1 usage error, 2 data error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `appsteg` tool. The first stdout line of every
/// subcommand is its resolved configuration as JSON.
int run_cli(int argc, char** argv);

}  // namespace appsteg
