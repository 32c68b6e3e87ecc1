// Copyright 2026 The nmrqc Authors
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

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nmrqc {

/// Parses an angle written as a decimal or a multiple of pi: "0.5", "pi",
/// "-pi/2", "3pi/4", "3*pi/4", "2pi", "1e-3".
double parse_angle(std::string_view text);

/// "start:step:stop" (inclusive, each bound an angle) or a comma list of
/// angles. Values are start + i * step.
std::vector<double> parse_grid(std::string_view text);

/// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace nmrqc
