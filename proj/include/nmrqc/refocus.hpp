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

#include <Eigen/Dense>

#include <string>
#include <utility>

#include "nmrqc/sequence.hpp"
#include "nmrqc/spin_system.hpp"

namespace nmrqc {

/// Per-spin +-1 sign rows over `segments` equal echo segments. Row k is the
/// sign of Z_k in the toggling frame during each segment.
struct TogglingPattern {
  Eigen::MatrixXi signs;  // n x segments
  std::pair<int, int> target_pair{1, 2};
  int segments = 0;
};

/// Sequency-ordered Walsh matrix of order m (m a power of two): row r has
/// exactly r sign changes.
Eigen::MatrixXi walsh_matrix(int m);

/// Assigns Walsh rows so that only the target coupling survives averaging:
/// the target pair shares the one-change row; the remaining spins, in
/// ascending order, take the even-sequency rows 2, 4, ... and then the odd
/// rows 3, 5, ... For four spins and pair (1,2) at m = 8 this gives
/// ++++----, ++++----, ++----++, +--++--+.
TogglingPattern toggling_patterns(int n, std::pair<int, int> pair, int m);

/// Throws "bad_pattern" naming the first violated invariant.
void check_pattern(const TogglingPattern& pattern);

/// Segment count used when none is given: 8, or the next power of two
/// that can host n - 1 orthogonal rows.
int default_segments(int n);

/// Echo schedule for [tau_kl]: m delays of tau/m with pi pulses about
/// `pulse_axis` wherever a spin's row flips, plus terminal pulses that
/// return every row to +1.
PulseSequence refocus_block(const SpinSystem& sys, std::pair<int, int> pair,
                            double tau, int m = 8, Axis pulse_axis = Axis::Y);

/// Replaces every Compiled coupling block by its echo schedule.
/// `m` <= 0 means default_segments(sys.size()).
PulseSequence expand_compiled_blocks(const PulseSequence& seq,
                                     const SpinSystem& sys, int m = 0);

/// CSV export: one row per spin, one column per segment, entries +1 / -1.
std::string pattern_csv(const TogglingPattern& pattern);

}  // namespace nmrqc
