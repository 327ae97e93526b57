//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_CLI_H_
#define PEPVIEW_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace pepview {

enum ExitCode {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumeric = 3,
};

// Runs the command line tool. args excludes the program name. Errors are
// written to err as one JSON object per line.
int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);

}  // namespace pepview

#endif  // PEPVIEW_CLI_H_
