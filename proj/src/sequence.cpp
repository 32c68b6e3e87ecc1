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

#include "nmrqc/sequence.hpp"

#include <cmath>
#include <numbers>

#include "nmrqc/refocus.hpp"

namespace nmrqc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

PauliLetter letter_of(Axis a) {
  switch (a) {
    case Axis::X: case Axis::MinusX: return PauliLetter::X;
    case Axis::Y: case Axis::MinusY: return PauliLetter::Y;
    case Axis::Z: case Axis::MinusZ: return PauliLetter::Z;
  }
  return PauliLetter::I;
}

double axis_sign(Axis a) {
  return (a == Axis::MinusX || a == Axis::MinusY || a == Axis::MinusZ) ? -1.0
                                                                       : 1.0;
}

void check_spin(int spin, int n) {
  if (spin < 1 || spin > n) {
    throw Error("spin_out_of_range", "instruction addresses spin " +
                                         std::to_string(spin) + " of " +
                                         std::to_string(n));
  }
}

}  // namespace

Axis negate(Axis a) {
  switch (a) {
    case Axis::X: return Axis::MinusX;
    case Axis::Y: return Axis::MinusY;
    case Axis::Z: return Axis::MinusZ;
    case Axis::MinusX: return Axis::X;
    case Axis::MinusY: return Axis::Y;
    case Axis::MinusZ: return Axis::Z;
  }
  return a;
}

std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
    case Axis::MinusX: return "-x";
    case Axis::MinusY: return "-y";
    case Axis::MinusZ: return "-z";
  }
  return "?";
}

Axis parse_axis(std::string_view s) {
  if (s == "x" || s == "+x") return Axis::X;
  if (s == "y" || s == "+y") return Axis::Y;
  if (s == "z" || s == "+z") return Axis::Z;
  if (s == "-x") return Axis::MinusX;
  if (s == "-y") return Axis::MinusY;
  if (s == "-z") return Axis::MinusZ;
  throw Error("unknown_axis", "unknown rotation axis '" + std::string(s) + "'");
}

Rotation rot(int spin, Axis axis, double angle) {
  return Rotation{{spin}, axis, angle, 0.0};
}

Rotation rot(std::vector<int> spins, Axis axis, double angle) {
  return Rotation{std::move(spins), axis, angle, 0.0};
}

CouplingBlock block_tau(int k, int l, double tau, Realization r) {
  return CouplingBlock{{k, l}, tau, std::nullopt, r};
}

CouplingBlock block_angle(int k, int l, double angle, Realization r) {
  return CouplingBlock{{k, l}, 0.0, angle, r};
}

FreeDelay delay(double tau) { return FreeDelay{tau}; }

void validate(const Instruction& instr, int n) {
  std::visit(
      overloaded{
          [&](const Rotation& r) {
            if (r.spins.empty()) throw Error("bad_instruction", "rotation without spins");
            for (int s : r.spins) check_spin(s, n);
            if (!std::isfinite(r.angle)) throw Error("bad_instruction", "rotation angle not finite");
            if (!(r.duration >= 0.0)) throw Error("bad_instruction", "negative pulse duration");
          },
          [&](const CouplingBlock& b) {
            check_spin(b.pair.first, n);
            check_spin(b.pair.second, n);
            if (b.pair.first == b.pair.second) {
              throw Error("bad_instruction", "coupling block on a single spin");
            }
            if (b.angle) {
              if (!std::isfinite(*b.angle)) throw Error("bad_instruction", "block angle not finite");
            } else if (!(b.tau >= 0.0) || !std::isfinite(b.tau)) {
              throw Error("bad_instruction", "coupling block tau must be >= 0");
            }
          },
          [&](const FreeDelay& d) {
            if (!(d.tau >= 0.0) || !std::isfinite(d.tau)) {
              throw Error("bad_instruction", "delay must be >= 0");
            }
          },
          [&](const Gradient& g) {
            if (!(g.duration >= 0.0)) throw Error("bad_instruction", "negative gradient duration");
          },
      },
      instr);
}

double coupling_duration_for_angle(const SpinSystem& sys, int k, int l,
                                   double angle) {
  const double j = sys.coupling(k, l);
  if (j == 0.0) {
    throw Error("zero_coupling", "J_" + std::to_string(k) + std::to_string(l) +
                                     " is zero; the block cannot be realized");
  }
  return angle / (0.5 * std::numbers::pi * j);
}

Operator instruction_propagator(const Instruction& instr, const SpinSystem& sys) {
  const int n = sys.size();
  validate(instr, n);
  const auto dim = static_cast<Eigen::Index>(dimension_of(n));
  return std::visit(
      overloaded{
          [&](const Rotation& r) -> Operator {
            const double half = 0.5 * axis_sign(r.axis) * r.angle;
            Operator u = Operator::Identity(dim, dim);
            for (int s : r.spins) {
              u = pauli_exponential(PauliString::single(n, s, letter_of(r.axis)),
                                    half, n) *
                  u;
            }
            return u;
          },
          [&](const CouplingBlock& b) -> Operator {
            const auto [k, l] = b.pair;
            if (b.realization == Realization::Compiled) {
              const double tau = b.angle
                                     ? coupling_duration_for_angle(sys, k, l, *b.angle)
                                     : b.tau;
              return sequence_propagator(
                  refocus_block(sys, b.pair, tau, default_segments(n)), sys);
            }
            const double theta =
                b.angle ? *b.angle
                        : 0.5 * std::numbers::pi * sys.coupling(k, l) * b.tau;
            return pauli_exponential(PauliString::on(n, {k, l}, PauliLetter::Z),
                                     theta, n);
          },
          [&](const FreeDelay& d) -> Operator {
            const Eigen::VectorXd h = hamiltonian_diagonal(sys);
            Eigen::VectorXcd phases(h.size());
            for (Eigen::Index a = 0; a < h.size(); ++a) {
              phases(a) = std::polar(1.0, -h(a) * d.tau);
            }
            return phases.asDiagonal();
          },
          [&](const Gradient&) -> Operator {
            throw Error("non_unitary",
                        "non-unitary sequence; simulate on a state instead");
          },
      },
      instr);
}

Operator sequence_propagator(const PulseSequence& seq, const SpinSystem& sys) {
  const auto dim = static_cast<Eigen::Index>(dimension_of(sys.size()));
  for (const auto& instr : seq.instructions) {
    if (std::holds_alternative<Gradient>(instr)) {
      throw Error("non_unitary",
                  "non-unitary sequence; simulate on a state instead");
    }
  }
  Operator u = Operator::Identity(dim, dim);
  for (const auto& instr : seq.instructions) {
    u = (instruction_propagator(instr, sys) * u).eval();
  }
  return u;
}

double sequence_duration(const PulseSequence& seq) {
  double total = 0.0;
  for (const auto& instr : seq.instructions) {
    total += std::visit(
        overloaded{
            [](const Rotation& r) { return r.duration; },
            [](const CouplingBlock& b) {
              if (b.angle) {
                throw Error("unresolved_block",
                            "angle-form coupling block has no duration until "
                            "resolved against a spin system");
              }
              return b.tau;
            },
            [](const FreeDelay& d) { return d.tau; },
            [](const Gradient& g) { return g.duration; },
        },
        instr);
  }
  return total;
}

PulseSequence resolve_coupling_angles(const PulseSequence& seq,
                                      const SpinSystem& sys) {
  PulseSequence out = seq;
  for (auto& instr : out.instructions) {
    auto* b = std::get_if<CouplingBlock>(&instr);
    if (b == nullptr || !b->angle) continue;
    const double tau =
        coupling_duration_for_angle(sys, b->pair.first, b->pair.second, *b->angle);
    if (tau < 0.0) {
      throw Error("negative_duration",
                  "block on pair (" + std::to_string(b->pair.first) + "," +
                      std::to_string(b->pair.second) +
                      ") needs a negative duration for its angle");
    }
    b->tau = tau;
    b->angle.reset();
  }
  return out;
}

PulseSequence inverse_sequence(const PulseSequence& seq) {
  PulseSequence out;
  out.name = seq.name.empty() ? "" : seq.name + "-inverse";
  for (auto it = seq.instructions.rbegin(); it != seq.instructions.rend(); ++it) {
    std::visit(overloaded{
                   [&](const Rotation& r) {
                     Rotation inv = r;
                     inv.axis = negate(r.axis);
                     out.append(inv);
                   },
                   [&](const CouplingBlock& b) {
                     if (!b.angle) {
                       throw Error("not_invertible",
                                   "timed coupling blocks cannot run backwards");
                     }
                     CouplingBlock inv = b;
                     inv.angle = -*b.angle;
                     out.append(inv);
                   },
                   [&](const FreeDelay&) {
                     throw Error("not_invertible", "free delays cannot run backwards");
                   },
                   [&](const Gradient&) {
                     throw Error("not_invertible", "gradients are not invertible");
                   },
               },
               *it);
  }
  return out;
}

}  // namespace nmrqc
