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

#include "nmrqc/decompose.hpp"
#include "nmrqc/pauli.hpp"
#include "nmrqc/sequence.hpp"
#include "nmrqc/spin_system.hpp"

namespace nmrqc {

/// Traceless Hermitian deviation density matrix.
struct DeviationState {
  Operator rho;

  int spins() const;
  PauliTable pauli() const { return pauli_coefficients(rho); }
  /// Throws "bad_state" unless Hermitian and traceless within 1e-9.
  void check() const;
};

/// Phenomenological imperfections: every rotation angle is multiplied by
/// `angle_scale`; after each instruction, components carrying an X or Y
/// letter (the off-diagonal part) are multiplied by `damping`.
struct ErrorModel {
  double angle_scale = 1.0;
  double damping = 1.0;

  static ErrorModel ideal() { return {}; }
  void validate() const;
};

/// sum_k Z_k (equal weights, unnormalized).
DeviationState thermal_deviation_state(const SpinSystem& sys);

/// Keeps only zero-quantum coherence: elements between basis states of
/// equal total magnetization survive, everything else is zeroed.
DeviationState gradient_crush(const DeviationState& state);

/// [pi/2]_y on every spin except `target_spin`, gradient, [pi/2]_y on
/// `target_spin`.
PulseSequence preparation_sequence(const SpinSystem& sys, int target_spin,
                                   bool include_gradient = true);

/// Thermal state through the four-spin preparation; yields X on spin 3.
DeviationState prepare_initial_state(const SpinSystem& sys);
DeviationState prepare_initial_state(const SpinSystem& sys, int target_spin,
                                     bool include_gradient = true);

DeviationState apply_sequence(const DeviationState& state,
                              const PulseSequence& seq, const SpinSystem& sys,
                              const ErrorModel& err = {});

/// Tr(rho P) / 2^n.
double expectation(const DeviationState& state, const PauliString& p);

enum class EvolutionMode { Analytic, CompiledIdeal, CompiledRefocused };
std::string_view to_string(EvolutionMode m);
EvolutionMode parse_mode(std::string_view s);

DeviationState evolve_four_body(const DeviationState& state,
                                const SpinSystem& sys,
                                const FourBodyTarget& target, EvolutionMode mode,
                                const ErrorModel& err = {});

struct SweepPoint {
  double pi_j_t = 0.0;
  double expectation = 0.0;
};

/// For each duration: ideal preparation of X on target spin 3, four-body
/// evolution, readout of <X_3>. Rows follow the input order.
std::vector<SweepPoint> sweep_four_body(const SpinSystem& sys, double j_eff_hz,
                                        const std::vector<double>& durations_s,
                                        EvolutionMode mode,
                                        const ErrorModel& err = {});

/// CSV with header `pi_J_T,expectation_sx3,mode`.
std::string sweep_csv(const std::vector<SweepPoint>& points, EvolutionMode mode);

}  // namespace nmrqc
