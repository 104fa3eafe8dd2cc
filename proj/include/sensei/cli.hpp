#ifndef SENSEI_CLI_HPP
#define SENSEI_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace sensei::cli {

/// Process exit codes.
enum ExitCode : int {
    Ok = 0,
    Failure = 1,
    Usage = 2,
    InsufficientData = 3,
    Schema = 4,
    Input = 5,
    Shape = 6,
};

/// Runs one subcommand (`args` excludes the program name). JSON goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sensei::cli

#endif // SENSEI_CLI_HPP
