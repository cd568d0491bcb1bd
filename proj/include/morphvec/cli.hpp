#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace morphvec::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kRuntimeFailure = 3,
};

// args[0] is the program name. Data goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

// Reads a "key = value" file into "--key=value" arguments. Underscores in
// keys become dashes; [section] headers and #/; comments are ignored.
std::vector<std::string> config_file_args(const std::string& path);

// Splices the --config file's arguments in right after the subcommand name so
// that flags given on the command line take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace morphvec::cli
