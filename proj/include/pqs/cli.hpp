/*
 * Copyright 2026 The pqsense Authors
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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pqs::cli {

enum ExitCode : int {
    kOk = 0,
    kValidation = 2,
    kNumeric = 3,
    kIo = 4,
};

/// Runs the `pqsense` front end on `args` (program name excluded). Reports
/// go to `out`, diagnostics to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Locale-independent shortest round-trip decimal.
std::string format_number(double x);

/// Fixed-point with `decimals` digits, locale-independent.
std::string format_fixed(double x, int decimals);

} // namespace pqs::cli
