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
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "nmrqc/pauli.hpp"
#include "nmrqc/spin_system.hpp"

namespace nmrqc {

enum class Axis { X, Y, Z, MinusX, MinusY, MinusZ };

Axis negate(Axis a);
std::string_view to_string(Axis a);
Axis parse_axis(std::string_view s);

/// [angle]_axis on every spin in `spins`: exp(-i (angle/2) sigma_axis) per
/// spin. `duration` is bookkeeping only; pulses act instantaneously.
struct Rotation {
  std::vector<int> spins;
  Axis axis = Axis::X;
  double angle = 0.0;
  double duration = 0.0;

  friend bool operator==(const Rotation&, const Rotation&) = default;
};

enum class Realization { Ideal, Compiled };

/// Selective ZZ evolution [tau_kl] = exp(-i (pi/2) J_kl tau Z_k Z_l).
///
/// A block may instead carry a symbolic `angle`, meaning
/// exp(-i angle Z_k Z_l) independent of J; such blocks come out of the
/// sys-independent templates and are turned into durations by
/// resolve_coupling_angles(). `Compiled` blocks are expanded into an echo
/// schedule when evaluated.
struct CouplingBlock {
  std::pair<int, int> pair{1, 2};
  double tau = 0.0;
  std::optional<double> angle;
  Realization realization = Realization::Ideal;

  friend bool operator==(const CouplingBlock&, const CouplingBlock&) = default;
};

/// Evolution under the full static Hamiltonian for `tau` seconds.
struct FreeDelay {
  double tau = 0.0;
  friend bool operator==(const FreeDelay&, const FreeDelay&) = default;
};

/// z-gradient crusher. Non-unitary: only state propagation accepts it.
struct Gradient {
  double duration = 0.0;
  friend bool operator==(const Gradient&, const Gradient&) = default;
};

using Instruction = std::variant<Rotation, CouplingBlock, FreeDelay, Gradient>;

/// Instructions in temporal order: element 0 acts first.
struct PulseSequence {
  std::vector<Instruction> instructions;
  std::string name;
  std::string description;

  std::size_t size() const { return instructions.size(); }
  bool empty() const { return instructions.empty(); }
  PulseSequence& append(Instruction instr) {
    instructions.push_back(std::move(instr));
    return *this;
  }
  PulseSequence& append(const PulseSequence& other) {
    instructions.insert(instructions.end(), other.instructions.begin(),
                        other.instructions.end());
    return *this;
  }

  friend bool operator==(const PulseSequence&, const PulseSequence&) = default;
};

// Instruction builders.
Rotation rot(int spin, Axis axis, double angle);
Rotation rot(std::vector<int> spins, Axis axis, double angle);
CouplingBlock block_tau(int k, int l, double tau,
                        Realization r = Realization::Ideal);
CouplingBlock block_angle(int k, int l, double angle,
                          Realization r = Realization::Ideal);
FreeDelay delay(double tau);

/// Checks the per-instruction invariants against a register of `n` spins.
void validate(const Instruction& instr, int n);

Operator instruction_propagator(const Instruction& instr, const SpinSystem& sys);

/// Throws "non_unitary" if a Gradient is present.
Operator sequence_propagator(const PulseSequence& seq, const SpinSystem& sys);

/// Total duration in seconds. Throws "unresolved_block" for angle-form
/// coupling blocks, whose length depends on J.
double sequence_duration(const PulseSequence& seq);

/// Duration of an angle-form block on `sys`: angle / ((pi/2) J_kl).
double coupling_duration_for_angle(const SpinSystem& sys, int k, int l,
                                   double angle);

/// Replaces every angle-form block by its tau-form equivalent on `sys`.
/// Throws "negative_duration" when J_kl and the angle have opposite sign.
PulseSequence resolve_coupling_angles(const PulseSequence& seq,
                                      const SpinSystem& sys);

/// Axis-negated, order-reversed copy. Only rotations and angle-form blocks
/// have representable inverses; anything else throws "not_invertible".
PulseSequence inverse_sequence(const PulseSequence& seq);

// Line-oriented text form (one instruction per line):
//   ROT spins=2,3 axis=-y angle=pi/2 [duration=1e-6]
//   CPL pair=1,2 tau=6.906e-3 mode=ideal|compiled
//   CPL pair=1,2 angle=pi/4 mode=ideal
//   DELAY tau=1e-3
//   GRAD [duration=1e-3]
// plus optional `.name <text>` / `.description <text>` header lines. Blank
// lines and `#` comments are ignored. Numbers print in shortest round-trip
// form so parse(print(s)) == s.
std::string to_text(const PulseSequence& seq);
std::string to_text(const Instruction& instr);
PulseSequence parse_sequence(std::string_view text);

}  // namespace nmrqc
