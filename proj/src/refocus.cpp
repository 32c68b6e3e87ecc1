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

#include "nmrqc/refocus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace nmrqc {

Eigen::MatrixXi walsh_matrix(int m) {
  if (m < 1 || !std::has_single_bit(static_cast<unsigned>(m))) {
    throw Error("bad_segments", "segment count must be a power of two");
  }
  // Sylvester construction, then reorder rows by number of sign changes.
  Eigen::MatrixXi h(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      h(i, j) = (std::popcount(static_cast<unsigned>(i & j)) % 2) ? -1 : 1;
    }
  }
  auto changes = [&](int row) {
    int c = 0;
    for (int j = 1; j < m; ++j) c += h(row, j) != h(row, j - 1);
    return c;
  };
  Eigen::MatrixXi w(m, m);
  for (int i = 0; i < m; ++i) w.row(changes(i)) = h.row(i);
  return w;
}

int default_segments(int n) {
  return std::max(8, static_cast<int>(std::bit_ceil(static_cast<unsigned>(n))));
}

TogglingPattern toggling_patterns(int n, std::pair<int, int> pair, int m) {
  auto [k, l] = pair;
  if (k < 1 || k > n || l < 1 || l > n || k == l) {
    throw Error("bad_pair", "target pair must be two distinct spins in 1..n");
  }
  const Eigen::MatrixXi w = walsh_matrix(m);
  // Row 0 is constant; rows 1..m-1 have zero sum and are mutually orthogonal.
  if (n - 1 > m - 1) {
    throw Error("insufficient_orthogonal_rows",
                "insufficient orthogonal rows: " + std::to_string(n) +
                    " spins need " + std::to_string(n - 1) +
                    " zero-sum rows, " + std::to_string(m) + " segments give " +
                    std::to_string(m - 1));
  }
  TogglingPattern p;
  p.target_pair = pair;
  p.segments = m;
  p.signs.resize(n, m);
  p.signs.row(k - 1) = w.row(1);
  p.signs.row(l - 1) = w.row(1);
  // Even-sequency rows first (they end at +1), then the odd ones.
  std::vector<int> order;
  for (int r = 2; r < m; r += 2) order.push_back(r);
  for (int r = 3; r < m; r += 2) order.push_back(r);
  std::size_t next = 0;
  for (int s = 1; s <= n; ++s) {
    if (s == k || s == l) continue;
    p.signs.row(s - 1) = w.row(order[next++]);
  }
  return p;
}

void check_pattern(const TogglingPattern& p) {
  const auto n = p.signs.rows();
  const auto [k, l] = p.target_pair;
  auto fail = [](const std::string& what) { throw Error("bad_pattern", what); };
  if (p.signs.cols() != p.segments) fail("row length differs from segment count");
  for (Eigen::Index a = 0; a < n; ++a) {
    if (p.signs.row(a).sum() != 0) fail("row " + std::to_string(a + 1) + " does not sum to zero");
    if (p.signs(a, 0) != 1) fail("row " + std::to_string(a + 1) + " does not start at +1");
  }
  if (p.signs.row(k - 1) != p.signs.row(l - 1)) fail("target rows differ");
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const bool target = (a == k - 1 && b == l - 1) || (a == l - 1 && b == k - 1);
      if (target) continue;
      if (p.signs.row(a).cwiseProduct(p.signs.row(b)).sum() != 0) {
        fail("coupling " + std::to_string(a + 1) + "-" + std::to_string(b + 1) +
             " is not cancelled");
      }
    }
  }
}

PulseSequence refocus_block(const SpinSystem& sys, std::pair<int, int> pair,
                            double tau, int m, Axis pulse_axis) {
  const auto [k, l] = pair;
  if (sys.coupling(k, l) == 0.0) {
    throw Error("zero_coupling", "cannot refocus onto pair (" + std::to_string(k) +
                                     "," + std::to_string(l) + "): J is zero");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw Error("negative_duration", "refocused block duration must be >= 0");
  }
  const TogglingPattern p = toggling_patterns(sys.size(), pair, m);
  const int n = sys.size();

  PulseSequence seq;
  seq.name = "refocus-" + std::to_string(k) + "-" + std::to_string(l);
  auto flips_between = [&](int before, int after) {
    std::vector<int> spins;
    for (int s = 1; s <= n; ++s) {
      const int prev = before < 0 ? 1 : p.signs(s - 1, before);
      const int next = after < m ? p.signs(s - 1, after) : 1;
      if (prev != next) spins.push_back(s);
    }
    return spins;
  };
  const double segment = tau / m;
  for (int j = 0; j < m; ++j) {
    if (j > 0) {
      auto spins = flips_between(j - 1, j);
      if (!spins.empty()) seq.append(rot(std::move(spins), pulse_axis, std::numbers::pi));
    }
    seq.append(delay(segment));
  }
  if (auto spins = flips_between(m - 1, m); !spins.empty()) {
    seq.append(rot(std::move(spins), pulse_axis, std::numbers::pi));
  }
  return seq;
}

PulseSequence expand_compiled_blocks(const PulseSequence& seq,
                                     const SpinSystem& sys, int m) {
  if (m <= 0) m = default_segments(sys.size());
  PulseSequence out;
  out.name = seq.name;
  out.description = seq.description;
  for (const auto& instr : seq.instructions) {
    const auto* b = std::get_if<CouplingBlock>(&instr);
    if (b == nullptr || b->realization != Realization::Compiled) {
      out.append(instr);
      continue;
    }
    const double tau =
        b->angle ? coupling_duration_for_angle(sys, b->pair.first, b->pair.second, *b->angle)
                 : b->tau;
    out.append(refocus_block(sys, b->pair, tau, m));
  }
  return out;
}

std::string pattern_csv(const TogglingPattern& p) {
  std::ostringstream out;
  for (Eigen::Index a = 0; a < p.signs.rows(); ++a) {
    for (Eigen::Index j = 0; j < p.signs.cols(); ++j) {
      if (j) out << ',';
      out << (p.signs(a, j) > 0 ? "+1" : "-1");
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace nmrqc
