// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace quadprop::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kConfigError = 2 };

/// Runs one `quadprop` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace quadprop::cli
