//
// Copyright 2026 The advtext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef ADVTEXT_TOOLS_CLI_H_
#define ADVTEXT_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace advtext {

// Exit codes of the advtext command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitBackendError = 2;

// Runs one advtext invocation; args exclude the program name. Regular output
// goes to `out`, diagnostics and usage to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace advtext

#endif  // ADVTEXT_TOOLS_CLI_H_
