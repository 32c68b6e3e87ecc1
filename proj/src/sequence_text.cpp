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

#include <charconv>
#include <map>
#include <sstream>

#include "nmrqc/angle.hpp"
#include "nmrqc/sequence.hpp"

namespace nmrqc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<int> parse_ints(std::string_view s, std::size_t line_no) {
  std::vector<int> out;
  while (!s.empty()) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc()) {
      throw Error("bad_sequence", "line " + std::to_string(line_no) +
                                      ": expected integer list");
    }
    out.push_back(v);
    s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
    if (!s.empty()) {
      if (s.front() != ',') {
        throw Error("bad_sequence", "line " + std::to_string(line_no) +
                                        ": expected ',' in integer list");
      }
      s.remove_prefix(1);
    }
  }
  return out;
}

double parse_seconds(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("bad_sequence", "line " + std::to_string(line_no) +
                                    ": bad number '" + std::string(s) + "'");
  }
  return v;
}

struct Fields {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;

  std::string_view require(std::string_view key) const {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw Error("bad_sequence", "line " + std::to_string(line_no) +
                                      ": missing field '" + std::string(key) + "'");
    }
    return it->second;
  }
  bool has(std::string_view key) const { return kv.find(key) != kv.end(); }
};

}  // namespace

std::string to_text(const Instruction& instr) {
  return std::visit(
      overloaded{
          [](const Rotation& r) {
            std::string s = "ROT spins=" + join_ints(r.spins) +
                            " axis=" + std::string(to_string(r.axis)) +
                            " angle=" + format_double(r.angle);
            if (r.duration != 0.0) s += " duration=" + format_double(r.duration);
            return s;
          },
          [](const CouplingBlock& b) {
            std::string s = "CPL pair=" + std::to_string(b.pair.first) + "," +
                            std::to_string(b.pair.second);
            if (b.angle) {
              s += " angle=" + format_double(*b.angle);
            } else {
              s += " tau=" + format_double(b.tau);
            }
            s += b.realization == Realization::Ideal ? " mode=ideal"
                                                     : " mode=compiled";
            return s;
          },
          [](const FreeDelay& d) { return "DELAY tau=" + format_double(d.tau); },
          [](const Gradient& g) {
            std::string s = "GRAD";
            if (g.duration != 0.0) s += " duration=" + format_double(g.duration);
            return s;
          },
      },
      instr);
}

std::string to_text(const PulseSequence& seq) {
  std::string out;
  if (!seq.name.empty()) out += ".name " + seq.name + "\n";
  if (!seq.description.empty()) out += ".description " + seq.description + "\n";
  for (const auto& instr : seq.instructions) out += to_text(instr) + "\n";
  return out;
}

PulseSequence parse_sequence(std::string_view text) {
  PulseSequence seq;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with(".name ")) {
      seq.name = line.substr(6);
      continue;
    }
    if (line.starts_with(".description ")) {
      seq.description = line.substr(13);
      continue;
    }
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream words(line);
    std::string op;
    if (!(words >> op)) continue;

    Fields f;
    f.line_no = line_no;
    std::string word;
    while (words >> word) {
      const auto eq = word.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error("bad_sequence", "line " + std::to_string(line_no) +
                                        ": expected key=value, got '" + word + "'");
      }
      f.kv[word.substr(0, eq)] = word.substr(eq + 1);
    }

    if (op == "ROT") {
      Rotation r;
      r.spins = parse_ints(f.require("spins"), line_no);
      r.axis = parse_axis(f.require("axis"));
      r.angle = parse_angle(f.require("angle"));
      if (f.has("duration")) r.duration = parse_seconds(f.require("duration"), line_no);
      seq.append(r);
    } else if (op == "CPL") {
      CouplingBlock b;
      const auto pair = parse_ints(f.require("pair"), line_no);
      if (pair.size() != 2) {
        throw Error("bad_sequence", "line " + std::to_string(line_no) +
                                        ": pair needs two spins");
      }
      b.pair = {pair[0], pair[1]};
      if (f.has("angle")) {
        b.angle = parse_angle(f.require("angle"));
      } else {
        b.tau = parse_seconds(f.require("tau"), line_no);
      }
      const auto mode = f.has("mode") ? f.require("mode") : std::string_view("ideal");
      if (mode == "ideal") {
        b.realization = Realization::Ideal;
      } else if (mode == "compiled") {
        b.realization = Realization::Compiled;
      } else {
        throw Error("bad_sequence", "line " + std::to_string(line_no) +
                                        ": unknown mode '" + std::string(mode) + "'");
      }
      seq.append(b);
    } else if (op == "DELAY") {
      seq.append(FreeDelay{parse_seconds(f.require("tau"), line_no)});
    } else if (op == "GRAD") {
      Gradient g;
      if (f.has("duration")) g.duration = parse_seconds(f.require("duration"), line_no);
      seq.append(g);
    } else {
      throw Error("bad_sequence", "line " + std::to_string(line_no) +
                                      ": unknown instruction '" + op + "'");
    }
  }
  return seq;
}

}  // namespace nmrqc
