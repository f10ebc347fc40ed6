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

#include <cmath>

namespace pqs {

/// Power ratio to decibels.
inline double to_db(double ratio) { return 10.0 * std::log10(ratio); }

inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Attenuation of an amplitude factor g, 20 log10(1/g).
inline double attenuation_db_amplitude(double g) { return -20.0 * std::log10(g); }

/// Attenuation of g read as a power factor, 10 log10(1/g).
inline double attenuation_db_power(double g) { return -10.0 * std::log10(g); }

} // namespace pqs
