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

#include "nmrqc/decompose.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nmrqc/refocus.hpp"

namespace nmrqc {

namespace {

constexpr double kPi = std::numbers::pi;

std::string zstring_label(const std::vector<int>& spins, double theta) {
  std::ostringstream s;
  s.precision(17);
  s << "exp(-i*" << theta << "*";
  for (int spin : spins) s << "Z" << spin;
  s << ")";
  return s.str();
}

// Tau-form coupling block giving exp(-i angle Z_k Z_l) on `sys`, up to the
// sign of J (callers rely on sign correction for negative couplings).
CouplingBlock conjugation_block(const SpinSystem& sys, int k, int l) {
  const double j = sys.coupling(k, l);
  if (j == 0.0) {
    throw Error("zero_coupling", "required coupling J_" + std::to_string(k) +
                                     std::to_string(l) + " is zero");
  }
  return block_tau(k, l, 1.0 / (2.0 * std::abs(j)));
}

}  // namespace

VerificationError::VerificationError(DecompositionReport report)
    : Error("verification_failed",
            "decomposition of " + report.target +
                " failed verification (deviation " +
                std::to_string(report.deviation) + ")"),
      report_(std::move(report)) {}

Operator zstring_propagator(const std::vector<int>& spins, double theta, int n) {
  return pauli_exponential(
      PauliString::on(n, std::span<const int>(spins), PauliLetter::Z), theta, n);
}

PulseSequence conjugation_forward(int control, int target) {
  PulseSequence s;
  s.append(rot(target, Axis::Y, kPi / 2));
  s.append(block_angle(control, target, kPi / 4));
  s.append(rot(target, Axis::X, kPi / 2));
  return s;
}

PulseSequence conjugation_backward(int control, int target) {
  PulseSequence s;
  s.append(rot(target, Axis::MinusX, kPi / 2));
  s.append(rot(target, Axis::MinusY, kPi));
  s.append(block_angle(control, target, kPi / 4));
  s.append(rot(target, Axis::Y, kPi / 2));
  return s;
}

PulseSequence p1_block(int l) {
  if (l < 1) throw Error("spin_out_of_range", "P1 block index must be >= 1");
  auto s = conjugation_forward(l, l + 1);
  s.name = "P1(" + std::to_string(l) + ")";
  return s;
}

PulseSequence p2_block(int l) {
  if (l < 1) throw Error("spin_out_of_range", "P2 block index must be >= 1");
  auto s = conjugation_backward(l, l + 1);
  s.name = "P2(" + std::to_string(l) + ")";
  return s;
}

DecompositionReport verify_decomposition(const PulseSequence& seq,
                                         const Operator& ideal,
                                         const SpinSystem& sys, double tol) {
  DecompositionReport r;
  r.sequence = seq;
  r.tolerance = tol;
  const Operator u = sequence_propagator(seq, sys);
  const PhaseVerdict v = equal_up_to_global_phase(u, ideal, tol);
  r.deviation = v.deviation;
  r.global_phase = v.phase;
  r.verified = v.equal;
  try {
    r.duration_s = sequence_duration(seq);
  } catch (const Error&) {
    r.duration_s.reset();
  }
  return r;
}

DecompositionReport correct_signs(const PulseSequence& seq, const Operator& ideal,
                                  const SpinSystem& sys, double tol,
                                  int max_rotations) {
  DecompositionReport literal = verify_decomposition(seq, ideal, sys, tol);
  if (literal.verified) {
    literal.notes = "literal factor list verified without sign correction";
    return literal;
  }

  std::vector<std::size_t> rotations;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (std::holds_alternative<Rotation>(seq.instructions[i])) rotations.push_back(i);
  }
  const int r = static_cast<int>(rotations.size());
  if (r > max_rotations || r > 30) {
    literal.notes = "literal factor list failed; too many rotations for sign search";
    return literal;
  }

  std::vector<Operator> plain, flipped(seq.size());
  plain.reserve(seq.size());
  for (const auto& instr : seq.instructions) {
    plain.push_back(instruction_propagator(instr, sys));
  }
  for (std::size_t i : rotations) {
    Rotation f = std::get<Rotation>(seq.instructions[i]);
    f.axis = negate(f.axis);
    flipped[i] = instruction_propagator(f, sys);
  }

  const auto dim = ideal.rows();
  // Fewest flips first; within a popcount, masks in increasing order.
  for (int k = 1; k <= r; ++k) {
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << r); ++mask) {
      if (std::popcount(mask) != k) continue;
      Operator u = Operator::Identity(dim, dim);
      std::size_t ri = 0;
      for (std::size_t i = 0; i < seq.size(); ++i) {
        const bool is_rot = ri < rotations.size() && rotations[ri] == i;
        const bool flip = is_rot && ((mask >> ri) & 1u);
        if (is_rot) ++ri;
        u = ((flip ? flipped[i] : plain[i]) * u).eval();
      }
      const PhaseVerdict v = equal_up_to_global_phase(u, ideal, tol);
      if (v.equal) {
        DecompositionReport fixed;
        fixed.sequence = seq;
        for (int b = 0; b < r; ++b) {
          if ((mask >> b) & 1u) {
            auto& rot_instr = std::get<Rotation>(fixed.sequence.instructions[rotations[b]]);
            rot_instr.axis = negate(rot_instr.axis);
            fixed.flipped.push_back(rotations[b]);
          }
        }
        fixed.deviation = v.deviation;
        fixed.global_phase = v.phase;
        fixed.verified = true;
        fixed.corrected = true;
        fixed.tolerance = tol;
        fixed.duration_s = literal.duration_s;
        std::ostringstream notes;
        notes << "literal factor list deviated by " << literal.deviation
              << "; verified after negating " << k << " rotation axis(es)";
        fixed.notes = notes.str();
        return fixed;
      }
    }
  }
  literal.notes = "no rotation sign pattern verifies";
  return literal;
}

DecompositionReport decompose_chain(const SpinSystem& sys,
                                    const std::vector<int>& spins,
                                    double j_eff_hz, double duration_s,
                                    double tol) {
  const int n = static_cast<int>(spins.size());
  if (n < 2) throw Error("chain_too_short", "chain decomposition needs n >= 2");
  std::set<int> distinct(spins.begin(), spins.end());
  if (static_cast<int>(distinct.size()) != n) {
    throw Error("invalid_target", "chain spins must be distinct");
  }
  for (int s : spins) {
    if (s < 1 || s > sys.size()) {
      throw Error("spin_out_of_range", "chain spin " + std::to_string(s) +
                                           " outside the register");
    }
  }
  const double theta = 0.5 * kPi * j_eff_hz * duration_s;

  PulseSequence seq;
  seq.name = "zchain-" + std::to_string(n);
  for (int l = 0; l < n - 2; ++l) {
    seq.append(conjugation_forward(spins[l], spins[l + 1]));
  }
  seq.append(block_angle(spins[n - 2], spins[n - 1], theta));
  for (int l = n - 3; l >= 0; --l) {
    seq.append(conjugation_backward(spins[l], spins[l + 1]));
  }

  const Operator ideal = zstring_propagator(spins, theta, sys.size());
  DecompositionReport report = correct_signs(seq, ideal, sys, tol);
  report.target = zstring_label(spins, theta);
  if (!report.verified) throw VerificationError(std::move(report));
  return report;
}

DecompositionReport compile_four_body(const SpinSystem& sys,
                                      const FourBodyTarget& target,
                                      Variant variant,
                                      FourBodyRealization realization, double tol,
                                      CoreAnglePolicy policy) {
  target.validate(sys);
  const auto [s1, s2, s3, s4] = target.spins;
  const int core_a = variant == Variant::A ? s3 : s2;
  const int core_b = s4;

  const double j_core = sys.coupling(core_a, core_b);
  if (j_core == 0.0) {
    throw Error("zero_coupling", "core pair (" + std::to_string(core_a) + "," +
                                     std::to_string(core_b) + ") has zero J");
  }
  // [J_eff T / J_pair] gives exp(-i (pi/2) J_eff T Z Z) on the core pair.
  double tau_core = target.j_eff_hz * target.duration_s / j_core;
  std::string notes;
  if (tau_core < 0.0) {
    if (policy == CoreAnglePolicy::Reject) {
      throw Error("negative_core_duration",
                  "negative core duration; choose variant A or negate J_eff");
    }
    // exp(-i (phi + pi) ZZ) = -exp(-i phi ZZ): shift by whole periods.
    const double period = 2.0 / std::abs(j_core);
    tau_core += std::ceil(-tau_core / period) * period;
    notes = "core angle wrapped by a multiple of pi to keep tau >= 0; ";
  }

  PulseSequence seq;
  const double half = kPi / 2;
  if (variant == Variant::A) {
    seq.name = "four-body-A";
    seq.append(rot(s2, Axis::X, half));
    seq.append(rot(s2, Axis::Y, kPi));
    seq.append(conjugation_block(sys, s1, s2));
    seq.append(rot(s2, Axis::MinusY, half));
    seq.append(rot(s3, Axis::X, half));
    seq.append(rot(s3, Axis::Y, kPi));
    seq.append(conjugation_block(sys, s2, s3));
    seq.append(rot(s3, Axis::MinusY, half));
    seq.append(block_tau(core_a, core_b, tau_core));
    seq.append(rot(s3, Axis::MinusY, half));
    seq.append(conjugation_block(sys, s2, s3));
    seq.append(rot(s3, Axis::MinusX, half));
    seq.append(rot(s2, Axis::MinusY, half));
    seq.append(conjugation_block(sys, s1, s2));
    seq.append(rot(s2, Axis::MinusX, half));
  } else {
    seq.name = "four-body-B";
    seq.append(rot(s2, Axis::MinusX, half));
    seq.append(rot(s2, Axis::MinusY, kPi));
    seq.append(conjugation_block(sys, s1, s2));
    seq.append(rot(s2, Axis::Y, half));
    seq.append(rot(s2, Axis::MinusX, half));
    seq.append(rot(s2, Axis::MinusY, kPi));
    seq.append(conjugation_block(sys, s2, s3));
    seq.append(rot(s2, Axis::Y, kPi));
    seq.append(rot(s2, Axis::MinusY, half));
    seq.append(block_tau(core_a, core_b, tau_core));
    seq.append(rot(s2, Axis::Y, half));
    seq.append(conjugation_block(sys, s2, s3));
    seq.append(rot(s2, Axis::X, half));
    seq.append(rot(s2, Axis::Y, half));
    seq.append(conjugation_block(sys, s1, s2));
    seq.append(rot(s2, Axis::X, half));
  }
  std::ostringstream desc;
  desc.precision(17);
  desc << "pi*J_eff*T=" << target.pi_j_t() << " spins=" << s1 << "," << s2 << ","
       << s3 << "," << s4;
  seq.description = desc.str();

  const std::vector<int> spins{s1, s2, s3, s4};
  const double theta = 0.5 * target.pi_j_t();
  const Operator ideal = zstring_propagator(spins, theta, sys.size());

  DecompositionReport report = correct_signs(seq, ideal, sys, tol);
  report.target = zstring_label(spins, theta);
  report.notes = notes + report.notes;
  if (!report.verified) throw VerificationError(std::move(report));

  if (realization == FourBodyRealization::Refocused) {
    PulseSequence marked = report.sequence;
    for (auto& instr : marked.instructions) {
      if (auto* b = std::get_if<CouplingBlock>(&instr)) {
        b->realization = Realization::Compiled;
      }
    }
    PulseSequence expanded = expand_compiled_blocks(marked, sys);
    expanded.name = report.sequence.name + "-refocused";
    DecompositionReport refocused = verify_decomposition(expanded, ideal, sys, tol);
    refocused.target = report.target;
    refocused.corrected = report.corrected;
    refocused.flipped = report.flipped;
    refocused.notes = report.notes + "; coupling blocks refocused with " +
                      std::to_string(default_segments(sys.size())) + " segments";
    if (!refocused.verified) throw VerificationError(std::move(refocused));
    return refocused;
  }
  return report;
}

std::string report_json(const DecompositionReport& r) {
  nlohmann::ordered_json j;
  j["target"] = r.target;
  j["deviation"] = r.deviation;
  j["global_phase"] = r.global_phase;
  j["verified"] = r.verified;
  j["corrected"] = r.corrected;
  j["flipped_instructions"] = r.flipped;
  j["tolerance"] = r.tolerance;
  if (r.duration_s) {
    j["duration_s"] = *r.duration_s;
  } else {
    j["duration_s"] = nullptr;
  }
  j["instruction_count"] = r.sequence.size();
  j["notes"] = r.notes;
  j["sequence"] = to_text(r.sequence);
  return j.dump(2) + "\n";
}

Variant parse_variant(std::string_view s) {
  if (s == "A" || s == "a") return Variant::A;
  if (s == "B" || s == "b") return Variant::B;
  throw Error("bad_variant", "variant must be A or B");
}

FourBodyRealization parse_realization(std::string_view s) {
  if (s == "ideal") return FourBodyRealization::Ideal;
  if (s == "refocused") return FourBodyRealization::Refocused;
  throw Error("bad_realization", "realization must be ideal or refocused");
}

}  // namespace nmrqc
