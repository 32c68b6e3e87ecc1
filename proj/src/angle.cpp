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

#include "nmrqc/angle.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "nmrqc/error.hpp"

namespace nmrqc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_angle(std::string_view text) {
  throw Error("bad_angle", "cannot parse angle '" + std::string(text) + "'");
}

// Consumes a leading unsigned decimal number; returns false if none.
bool take_number(std::string_view& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr == begin) return false;
  s.remove_prefix(static_cast<std::size_t>(ptr - begin));
  return true;
}

}  // namespace

double parse_angle(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) bad_angle(text);
  double sign = 1.0;
  if (s.front() == '-' || s.front() == '+') {
    if (s.front() == '-') sign = -1.0;
    s.remove_prefix(1);
  }
  double coefficient = 1.0;
  const bool has_number = take_number(s, coefficient);
  if (has_number && !s.empty() && s.front() == '*') s.remove_prefix(1);
  bool has_pi = false;
  if (s.starts_with("pi") || s.starts_with("PI")) {
    has_pi = true;
    s.remove_prefix(2);
  }
  if (!has_number && !has_pi) bad_angle(text);
  double value = coefficient * (has_pi ? std::numbers::pi : 1.0);
  if (!s.empty() && s.front() == '/') {
    s.remove_prefix(1);
    double denom = 0.0;
    if (!take_number(s, denom) || denom == 0.0) bad_angle(text);
    value /= denom;
  }
  if (!s.empty()) bad_angle(text);
  return sign * value;
}

std::vector<double> parse_grid(std::string_view text) {
  std::string_view s = trim(text);
  std::vector<double> out;
  if (s.empty()) return out;
  if (s.find(':') != std::string_view::npos) {
    const auto c1 = s.find(':');
    const auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw Error("bad_grid", "grid must be start:step:stop");
    }
    const double start = parse_angle(s.substr(0, c1));
    const double step = parse_angle(s.substr(c1 + 1, c2 - c1 - 1));
    const double stop = parse_angle(s.substr(c2 + 1));
    if (step == 0.0 || (stop - start) / step < -1e-9) {
      throw Error("bad_grid", "grid step does not reach stop");
    }
    const double span = (stop - start) / step;
    const auto count = static_cast<long>(std::floor(span + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) {
      out.push_back(start + static_cast<double>(i) * step);
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto piece = s.substr(pos, comma == std::string_view::npos
                                         ? std::string_view::npos
                                         : comma - pos);
    out.push_back(parse_angle(piece));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace nmrqc
