// cli.hpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef PIKA_TOOLS_CLI_HPP
#define PIKA_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace pika {

// Exit codes of run_cli.
inline constexpr int exit_ok = 0;
inline constexpr int exit_syntax_errors = 1;
inline constexpr int exit_usage = 2;

// Runs the command line tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pika

#endif // PIKA_TOOLS_CLI_HPP
