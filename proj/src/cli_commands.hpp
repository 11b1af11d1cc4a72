#ifndef SMOOTHPO_CLI_COMMANDS_HPP
#define SMOOTHPO_CLI_COMMANDS_HPP

#include <ostream>

namespace smoothpo::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_violation = 2;
inline constexpr int exit_config = 3;

/// Parses the command line and runs one subcommand. Output goes to --out
/// when given, otherwise to `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smoothpo::cli

#endif  // SMOOTHPO_CLI_COMMANDS_HPP
