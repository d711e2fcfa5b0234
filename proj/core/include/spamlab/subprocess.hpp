#pragma once

#include <string>
#include <utility>
#include <vector>

namespace spamlab {

struct ProcessResult {
  int exit_code = -1;  // -1 when killed by a signal
  std::string stdout_text;
};

/// Runs argv[0] with the given arguments, feeding `input` to its standard
/// input and collecting its standard output. `extra_env` entries are added
/// to (or override) the inherited environment. Standard error is inherited.
/// Throws std::system_error when the process cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          const std::vector<std::pair<std::string, std::string>>& extra_env = {});

/// Runs `command` through /bin/sh -c, passing `args` as positional
/// parameters ($1, $2, ...) appended to the command.
ProcessResult run_shell(const std::string& command, const std::vector<std::string>& args,
                        const std::string& input,
                        const std::vector<std::pair<std::string, std::string>>& extra_env = {});

}  // namespace spamlab
