// tools/cli.h

// Copyright 2026  The sreval Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SREVAL_TOOLS_CLI_H_
#define SREVAL_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace sreval::cli {

enum ExitCode {
  kOk = 0,
  kValidation = 2,
  kParse = 3,
  kConfig = 4,
  kInternal = 5,
};

/// Version of the machine-readable record layout (--format machine).
inline constexpr int kSchemaVersion = 1;

/// Runs one `sreval` invocation. args[0] is the program name.
int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace sreval::cli

#endif  // SREVAL_TOOLS_CLI_H_
