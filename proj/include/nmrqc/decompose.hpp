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

#include <optional>
#include <string>
#include <vector>

#include "nmrqc/sequence.hpp"
#include "nmrqc/spin_system.hpp"

namespace nmrqc {

/// Outcome of compiling or checking a pulse program against its ideal
/// propagator.
struct DecompositionReport {
  std::string target;
  PulseSequence sequence;
  double deviation = 0.0;
  double global_phase = 0.0;
  bool verified = false;
  /// Rotation signs had to be flipped relative to the literal factor list.
  bool corrected = false;
  /// Instruction indices whose rotation axis was negated by the correction.
  std::vector<std::size_t> flipped;
  std::string notes;
  double tolerance = 0.0;
  std::optional<double> duration_s;
};

/// Thrown when no sign pattern verifies; carries the best report.
class VerificationError : public Error {
 public:
  explicit VerificationError(DecompositionReport report);
  const DecompositionReport& report() const noexcept { return report_; }

 private:
  DecompositionReport report_;
};

/// Conjugation block mapping Z_target -> Z_control Z_target:
///   [pi/2]_y^t, exp(-i pi/4 Z_c Z_t), [pi/2]_x^t   (temporal order).
PulseSequence conjugation_forward(int control, int target);
/// Exact inverse of conjugation_forward:
///   [pi/2]_-x^t, [pi]_-y^t, exp(-i pi/4 Z_c Z_t), [pi/2]_y^t.
PulseSequence conjugation_backward(int control, int target);

PulseSequence p1_block(int l);
PulseSequence p2_block(int l);

/// Compares the propagator of `seq` with `ideal` up to global phase. A
/// mismatch is reported, not thrown.
DecompositionReport verify_decomposition(const PulseSequence& seq,
                                         const Operator& ideal,
                                         const SpinSystem& sys, double tol);

/// Searches sign flips of the rotations in `seq` (fewest flips first) for a
/// variant that matches `ideal`. Coupling blocks are never touched.
DecompositionReport correct_signs(const PulseSequence& seq, const Operator& ideal,
                                  const SpinSystem& sys, double tol,
                                  int max_rotations = 16);

/// Reduces exp(-i (pi/2) J_eff T Z_{s1} ... Z_{sn}) to conjugation blocks
/// around a single two-spin core on (s_{n-1}, s_n). Blocks are emitted in
/// angle form with ideal realization.
DecompositionReport decompose_chain(const SpinSystem& sys,
                                    const std::vector<int>& spins,
                                    double j_eff_hz, double duration_s,
                                    double tol = 1e-10);

enum class Variant { A, B };
enum class FourBodyRealization { Ideal, Refocused };
/// What to do when the core block would need a negative duration.
enum class CoreAnglePolicy { Reject, WrapModPi };

/// Four-spin pulse program. Variant A conjugates through pairs (1,2),(2,3)
/// with the core on (3,4); variant B conjugates spin 2 through (1,2),(2,3)
/// with the core on (2,4). Spin numbers refer to positions in target.spins.
DecompositionReport compile_four_body(
    const SpinSystem& sys, const FourBodyTarget& target, Variant variant,
    FourBodyRealization realization, double tol = 1e-10,
    CoreAnglePolicy policy = CoreAnglePolicy::Reject);

/// exp(-i theta Z...Z) over the given spins.
Operator zstring_propagator(const std::vector<int>& spins, double theta, int n);

std::string report_json(const DecompositionReport& report);

Variant parse_variant(std::string_view s);
FourBodyRealization parse_realization(std::string_view s);

}  // namespace nmrqc
