// Copyright 2026 The UPS Hopper Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef HOPPER_TOOLS_CLI_HPP_
#define HOPPER_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace hopper {

/// Exit codes of the command-line tool.
enum CliExit : int { kExitOk = 0, kExitUsage = 1, kExitRunFailure = 2 };

/// Parses and executes one command line; argv[0] is the program name.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace hopper

#endif  // HOPPER_TOOLS_CLI_HPP_
