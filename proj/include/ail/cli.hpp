#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ail {

// Exit codes of the command-line tool.
enum ExitCode : int { exit_pass = 0, exit_fail = 1, exit_usage = 2, exit_internal = 3 };

// args excludes the program name: {"rate", "--lemma", "1", ...}
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace ail
