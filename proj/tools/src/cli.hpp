/*
 * Copyright 2026 The locstruct Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LOCSTRUCT_TOOLS_CLI_HPP
#define LOCSTRUCT_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace locstruct::tools {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,  // library or configuration error, reported as one JSON line
  kExitUsage = 2,  // bad command line
};

// Runs one subcommand. `args` excludes the program name. Failures print a
// single line {"error": kind, "message": ..., "line": n} on `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace locstruct::tools

#endif  // LOCSTRUCT_TOOLS_CLI_HPP
