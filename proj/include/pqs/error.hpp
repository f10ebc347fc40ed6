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

#include <stdexcept>
#include <string>

namespace pqs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An input violated a documented precondition or type invariant.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// A numeric operation is undefined for the given inputs (zero shot-noise
/// level, vanishing conjugate noise, negative variance from inconsistent
/// moments, ...).
class NumericError : public Error {
  public:
    using Error::Error;
};

/// A least-squares calibration could not reproduce its targets.
class FitError : public Error {
  public:
    using Error::Error;
};

/// Bracketing search failed (objective not bracketed, no crossing).
class SearchError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

namespace detail {
inline void require(bool cond, const std::string &msg) {
    if (!cond) {
        throw ValidationError(msg);
    }
}
} // namespace detail

} // namespace pqs
