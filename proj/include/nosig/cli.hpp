// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nosig::cli {

/// Runs one command-line invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on validation or computation failure, 2 on usage
/// errors. Results go to `out` (or a path given with -o), messages to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace nosig::cli
