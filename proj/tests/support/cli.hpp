#pragma once

// Runs the command-line tool as a subprocess.

#include <sys/wait.h>

#include <cstdlib>
#include <string>

namespace autoblock::testing {

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

/// Exit status of `autoblock <args>`; stdout and stderr go to `log`.
inline int run_cli(const std::string& args, const std::string& log) {
  const std::string command = shell_quote(AUTOBLOCK_CLI) + " " + args + " >" + shell_quote(log) + " 2>&1";
  const int status = std::system(command.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

}  // namespace autoblock::testing
