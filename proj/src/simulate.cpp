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

#include "nmrqc/simulate.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nmrqc/angle.hpp"
#include "nmrqc/refocus.hpp"

namespace nmrqc {

int DeviationState::spins() const {
  int n = 0;
  while ((Eigen::Index{1} << n) < rho.rows()) ++n;
  return n;
}

void DeviationState::check() const {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error("bad_state", "deviation state is not Hermitian");
  }
  if (std::abs(rho.trace()) > 1e-9) {
    throw Error("bad_state", "deviation state is not traceless");
  }
}

void ErrorModel::validate() const {
  if (!(angle_scale > 0.0)) throw Error("bad_error_model", "angle_scale must be > 0");
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw Error("bad_error_model", "damping must lie in (0, 1]");
  }
}

DeviationState thermal_deviation_state(const SpinSystem& sys) {
  const int n = sys.size();
  const auto dim = static_cast<Eigen::Index>(dimension_of(n));
  Operator rho = Operator::Zero(dim, dim);
  for (int k = 1; k <= n; ++k) {
    rho += pauli_matrix(PauliString::single(n, k, PauliLetter::Z), n);
  }
  return {rho};
}

DeviationState gradient_crush(const DeviationState& state) {
  DeviationState out = state;
  for (Eigen::Index a = 0; a < out.rho.rows(); ++a) {
    for (Eigen::Index b = 0; b < out.rho.cols(); ++b) {
      if (std::popcount(static_cast<std::uint64_t>(a)) !=
          std::popcount(static_cast<std::uint64_t>(b))) {
        out.rho(a, b) = 0.0;
      }
    }
  }
  return out;
}

PulseSequence preparation_sequence(const SpinSystem& sys, int target_spin,
                                   bool include_gradient) {
  const int n = sys.size();
  if (target_spin < 1 || target_spin > n) {
    throw Error("spin_out_of_range", "preparation target outside the register");
  }
  PulseSequence seq;
  seq.name = "prepare-x" + std::to_string(target_spin);
  std::vector<int> others;
  for (int s = 1; s <= n; ++s) {
    if (s != target_spin) others.push_back(s);
  }
  const double half = std::numbers::pi / 2;
  if (!others.empty()) seq.append(rot(others, Axis::Y, half));
  if (include_gradient) seq.append(Gradient{});
  seq.append(rot(target_spin, Axis::Y, half));
  return seq;
}

DeviationState prepare_initial_state(const SpinSystem& sys) {
  if (sys.size() != 4) {
    throw Error("wrong_spin_count",
                "the four-body preparation needs exactly 4 spins");
  }
  return prepare_initial_state(sys, 3, true);
}

DeviationState prepare_initial_state(const SpinSystem& sys, int target_spin,
                                     bool include_gradient) {
  return apply_sequence(thermal_deviation_state(sys),
                        preparation_sequence(sys, target_spin, include_gradient),
                        sys);
}

DeviationState apply_sequence(const DeviationState& state,
                              const PulseSequence& seq, const SpinSystem& sys,
                              const ErrorModel& err) {
  err.validate();
  const auto dim = static_cast<Eigen::Index>(dimension_of(sys.size()));
  if (state.rho.rows() != dim) {
    throw Error("dimension_mismatch", "state and spin system sizes differ");
  }
  const PulseSequence expanded = expand_compiled_blocks(seq, sys);
  DeviationState out = state;
  for (const auto& instr : expanded.instructions) {
    if (std::holds_alternative<Gradient>(instr)) {
      out = gradient_crush(out);
    } else {
      Operator u;
      if (const auto* r = std::get_if<Rotation>(&instr); r && err.angle_scale != 1.0) {
        Rotation scaled = *r;
        scaled.angle *= err.angle_scale;
        u = instruction_propagator(scaled, sys);
      } else {
        u = instruction_propagator(instr, sys);
      }
      out.rho = (u * out.rho * u.adjoint()).eval();
    }
    if (err.damping != 1.0) {
      const Eigen::VectorXcd diag = out.rho.diagonal();
      out.rho *= err.damping;
      out.rho.diagonal() = diag;
    }
  }
  return out;
}

double expectation(const DeviationState& state, const PauliString& p) {
  const int n = p.size();
  if (state.rho.rows() != static_cast<Eigen::Index>(dimension_of(n))) {
    throw Error("dimension_mismatch", "observable and state sizes differ");
  }
  const Operator m = pauli_matrix(p, n);
  return (state.rho * m).trace().real() / static_cast<double>(state.rho.rows());
}

std::string_view to_string(EvolutionMode m) {
  switch (m) {
    case EvolutionMode::Analytic: return "analytic";
    case EvolutionMode::CompiledIdeal: return "compiled-ideal";
    case EvolutionMode::CompiledRefocused: return "compiled-refocused";
  }
  return "?";
}

EvolutionMode parse_mode(std::string_view s) {
  if (s == "analytic") return EvolutionMode::Analytic;
  if (s == "compiled-ideal") return EvolutionMode::CompiledIdeal;
  if (s == "compiled-refocused") return EvolutionMode::CompiledRefocused;
  throw Error("bad_mode",
              "mode must be analytic, compiled-ideal or compiled-refocused");
}

DeviationState evolve_four_body(const DeviationState& state,
                                const SpinSystem& sys,
                                const FourBodyTarget& target, EvolutionMode mode,
                                const ErrorModel& err) {
  target.validate(sys);
  if (mode == EvolutionMode::Analytic) {
    const std::vector<int> spins(target.spins.begin(), target.spins.end());
    const Operator u = zstring_propagator(spins, 0.5 * target.pi_j_t(), sys.size());
    return {u * state.rho * u.adjoint()};
  }
  const auto realization = mode == EvolutionMode::CompiledIdeal
                               ? FourBodyRealization::Ideal
                               : FourBodyRealization::Refocused;
  const auto report = compile_four_body(sys, target, Variant::A, realization);
  return apply_sequence(state, report.sequence, sys, err);
}

std::vector<SweepPoint> sweep_four_body(const SpinSystem& sys, double j_eff_hz,
                                        const std::vector<double>& durations_s,
                                        EvolutionMode mode,
                                        const ErrorModel& err) {
  std::vector<SweepPoint> out;
  if (durations_s.empty()) return out;
  const DeviationState initial = prepare_initial_state(sys);
  const PauliString sx3 = PauliString::single(sys.size(), 3, PauliLetter::X);
  out.reserve(durations_s.size());
  for (double t : durations_s) {
    const FourBodyTarget target{{1, 2, 3, 4}, j_eff_hz, t};
    const DeviationState evolved = evolve_four_body(initial, sys, target, mode, err);
    out.push_back({target.pi_j_t(), expectation(evolved, sx3)});
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points, EvolutionMode mode) {
  std::string out = "pi_J_T,expectation_sx3,mode\n";
  for (const auto& p : points) {
    out += format_double(p.pi_j_t) + "," + format_double(p.expectation) + "," +
           std::string(to_string(mode)) + "\n";
  }
  return out;
}

}  // namespace nmrqc
