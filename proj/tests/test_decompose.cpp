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

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nmrqc/decompose.hpp"
#include "nmrqc/refocus.hpp"
#include "oracles.hpp"

using namespace nmrqc;
using oracle::cd;
using oracle::error_code;
using oracle::max_abs;

namespace {
constexpr double kPi = std::numbers::pi;

const SpinSystem& crotonic() {
  static const SpinSystem sys = molecule_preset("crotonic-acid");
  return sys;
}

SpinSystem uncoupled(int n) {
  return SpinSystem(std::vector<double>(n, 0.0), Eigen::MatrixXd::Zero(n, n));
}

// exp(-i theta Z_{s1}..Z_{sk}) from the parity diagonal.
Eigen::MatrixXcd zstring_oracle(const std::vector<int>& spins, double theta, int n) {
  const int dim = 1 << n;
  Eigen::VectorXd parity(dim);
  for (int a = 0; a < dim; ++a) {
    int ones = 0;
    for (int s : spins) ones += (a >> (n - s)) & 1;
    parity(a) = ones % 2 ? -1.0 : 1.0;
  }
  return oracle::diag_exp(parity, theta);
}

std::vector<const CouplingBlock*> blocks_of(const PulseSequence& s) {
  std::vector<const CouplingBlock*> out;
  for (const auto& i : s.instructions)
    if (const auto* b = std::get_if<CouplingBlock>(&i)) out.push_back(b);
  return out;
}

bool has_block(const PulseSequence& s) { return !blocks_of(s).empty(); }
}  // namespace

TEST_CASE("P1 and P2 blocks") {
  SUBCASE("P1(1) in temporal order") {
    const PulseSequence p = p1_block(1);
    REQUIRE(p.size() == 3);
    CHECK(std::get<Rotation>(p.instructions[0]) == rot(2, Axis::Y, kPi / 2));
    CHECK(std::get<CouplingBlock>(p.instructions[1]) == block_angle(1, 2, kPi / 4));
    CHECK(std::get<Rotation>(p.instructions[2]) == rot(2, Axis::X, kPi / 2));
  }
  SUBCASE("P2(1) in temporal order") {
    const PulseSequence p = p2_block(1);
    REQUIRE(p.size() == 4);
    CHECK(std::get<Rotation>(p.instructions[0]) == rot(2, Axis::MinusX, kPi / 2));
    CHECK(std::get<Rotation>(p.instructions[1]) == rot(2, Axis::MinusY, kPi));
    CHECK(std::get<CouplingBlock>(p.instructions[2]) == block_angle(1, 2, kPi / 4));
    CHECK(std::get<Rotation>(p.instructions[3]) == rot(2, Axis::Y, kPi / 2));
  }
  SUBCASE("propagators equal the exponential products") {
    const auto y2 = oracle::kron_word("IY"), x2 = oracle::kron_word("IX"),
               zz = oracle::kron_word("ZZ");
    const Eigen::MatrixXcd p1 = oracle::expm_minus_i(x2, kPi / 4) *
                                oracle::expm_minus_i(zz, kPi / 4) *
                                oracle::expm_minus_i(y2, kPi / 4);
    const Eigen::MatrixXcd p2 = oracle::expm_minus_i(y2, kPi / 4) *
                                oracle::expm_minus_i(zz, kPi / 4) *
                                oracle::expm_minus_i(y2, -kPi / 2) *
                                oracle::expm_minus_i(x2, -kPi / 4);
    CHECK(max_abs(sequence_propagator(p1_block(1), uncoupled(2)) - p1) < 1e-13);
    CHECK(max_abs(sequence_propagator(p2_block(1), uncoupled(2)) - p2) < 1e-13);
    CHECK(is_unitary(sequence_propagator(p1_block(1), uncoupled(2)), 1e-12));
  }
  SUBCASE("P2 undoes P1") {
    for (int l = 1; l <= 3; ++l) {
      for (const SpinSystem& sys : {uncoupled(4), crotonic()}) {
        PulseSequence s = p1_block(l);
        s.append(p2_block(l));
        const Operator u = sequence_propagator(s, sys);
        CHECK(max_abs(u - Operator::Identity(16, 16)) < 1e-12);
      }
    }
  }
  SUBCASE("index checks") {
    CHECK(error_code([] { p1_block(0); }) == "spin_out_of_range");
    CHECK(error_code([] { sequence_propagator(p1_block(4), uncoupled(4)); }) ==
          "spin_out_of_range");
  }
}

TEST_CASE("decompose_chain examples") {
  SUBCASE("two spins give one block") {
    const auto r = decompose_chain(uncoupled(2), {1, 2}, 1.0, 0.3);
    REQUIRE(r.sequence.size() == 1);
    CHECK(r.deviation < 1e-15);
    CHECK(r.verified);
  }
  SUBCASE("four spins at pi J T = pi/4") {
    const auto r = decompose_chain(crotonic(), {1, 2, 3, 4}, 1.0, 0.25);
    CHECK(r.deviation < 1e-10);
    const Operator u = sequence_propagator(r.sequence, crotonic());
    CHECK(equal_up_to_global_phase(u, zstring_oracle({1, 2, 3, 4}, kPi / 8, 4), 1e-10).equal);
    CHECK_FALSE(r.corrected);
  }
  SUBCASE("three spins at pi J T = pi/2") {
    const auto r = decompose_chain(uncoupled(3), {1, 2, 3}, 2.0, 0.25);
    const Operator u = sequence_propagator(r.sequence, uncoupled(3));
    CHECK(equal_up_to_global_phase(u, zstring_oracle({1, 2, 3}, kPi / 4, 3), 1e-10).equal);
  }
  SUBCASE("the literal four-spin factor list verifies as printed") {
    const auto r = decompose_chain(uncoupled(4), {1, 2, 3, 4}, 1.0, 0.37);
    PulseSequence literal = p1_block(1);
    literal.append(p1_block(2));
    literal.append(block_angle(3, 4, 0.5 * kPi * 0.37));
    literal.append(p2_block(2));
    literal.append(p2_block(1));
    CHECK(r.sequence.instructions == literal.instructions);
    CHECK_FALSE(r.corrected);
    CHECK(r.flipped.empty());
    CHECK(r.notes.find("without sign correction") != std::string::npos);
  }
  SUBCASE("errors") {
    CHECK(error_code([] { decompose_chain(uncoupled(3), {1}, 1.0, 1.0); }) == "chain_too_short");
    CHECK(error_code([] { decompose_chain(uncoupled(3), {1, 1}, 1.0, 1.0); }) ==
          "invalid_target");
    CHECK(error_code([] { decompose_chain(uncoupled(3), {1, 4}, 1.0, 1.0); }) ==
          "spin_out_of_range");
  }
}

TEST_CASE("decompose_chain soundness, size and structure over random inputs") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> jt(-2.0, 2.0);
  for (int n = 2; n <= 5; ++n) {
    std::vector<int> spins(n);
    for (int i = 0; i < n; ++i) spins[i] = i + 1;
    for (int trial = 0; trial < 6; ++trial) {
      std::shuffle(spins.begin(), spins.end(), rng);
      const double x = jt(rng);
      const auto r = decompose_chain(uncoupled(n), spins, 1.0, x);
      CHECK(r.deviation < 1e-10);
      CHECK(r.sequence.size() == static_cast<std::size_t>(7 * (n - 2) + 1));
      const Operator u = sequence_propagator(r.sequence, uncoupled(n));
      CHECK(equal_up_to_global_phase(u, zstring_oracle(spins, kPi * x / 2, n), 1e-10).equal);
      // Blocks only ever couple chain neighbours.
      for (const CouplingBlock* b : blocks_of(r.sequence)) {
        bool adjacent = false;
        for (int i = 0; i + 1 < n; ++i)
          adjacent |= b->pair == std::pair{spins[i], spins[i + 1]};
        CHECK(adjacent);
      }
    }
  }
}

TEST_CASE("verify_decomposition reports without throwing") {
  const SpinSystem one = uncoupled(1);
  const auto empty = verify_decomposition({}, Operator::Identity(2, 2), one, 1e-12);
  CHECK(empty.deviation == 0.0);
  CHECK(empty.global_phase == 0.0);
  CHECK(empty.verified);
  PulseSequence x;
  x.append(rot(1, Axis::X, kPi));
  const auto flip = verify_decomposition(x, oracle::kron_word("X"), one, 1e-12);
  CHECK(flip.verified);
  CHECK(flip.global_phase == doctest::Approx(-kPi / 2));
  const auto wrong = verify_decomposition(x, oracle::kron_word("Z"), one, 1e-12);
  CHECK_FALSE(wrong.verified);
  CHECK(wrong.deviation > 0.1);
}

TEST_CASE("correct_signs repairs a corrupted rotation") {
  const auto good = decompose_chain(uncoupled(3), {1, 2, 3}, 1.0, 0.6);
  const Operator ideal = zstring_oracle({1, 2, 3}, kPi * 0.6 / 2, 3);
  for (std::size_t idx : {0u, 2u, 7u}) {
    PulseSequence bad = good.sequence;
    auto& r = std::get<Rotation>(bad.instructions[idx]);
    r.axis = negate(r.axis);
    CHECK_FALSE(verify_decomposition(bad, ideal, uncoupled(3), 1e-10).verified);
    const auto fixed = correct_signs(bad, ideal, uncoupled(3), 1e-10);
    CHECK(fixed.verified);
    CHECK(fixed.corrected);
    REQUIRE(fixed.flipped.size() == 1);
    CHECK(fixed.deviation < 1e-10);
    CHECK(equal_up_to_global_phase(sequence_propagator(fixed.sequence, uncoupled(3)), ideal,
                                   1e-10).equal);
  }
  // A pi rotation flipped to the opposite axis only changes the global phase.
  PulseSequence phase_only = good.sequence;
  auto& pi_pulse = std::get<Rotation>(phase_only.instructions[5]);
  REQUIRE(pi_pulse.angle == kPi);
  pi_pulse.axis = negate(pi_pulse.axis);
  CHECK(verify_decomposition(phase_only, ideal, uncoupled(3), 1e-10).verified);
  // Core angle is never altered: a wrong core cannot be fixed.
  PulseSequence core;
  core.append(block_angle(1, 2, 0.3));
  const auto fail = correct_signs(core, zstring_oracle({1, 2}, 0.5, 2), uncoupled(2), 1e-10);
  CHECK_FALSE(fail.verified);
}

TEST_CASE("compile_four_body variant A") {
  SUBCASE("pi J T = pi/2, ideal") {
    const auto target = FourBodyTarget::from_pi_j_t(kPi / 2, 1.0);
    const auto r = compile_four_body(crotonic(), target, Variant::A, FourBodyRealization::Ideal);
    CHECK(r.deviation < 1e-10);
    CHECK_FALSE(r.corrected);
    const auto blocks = blocks_of(r.sequence);
    REQUIRE(blocks.size() == 5);
    CHECK(blocks[2]->pair == std::pair{3, 4});
    CHECK(blocks[2]->tau == doctest::Approx(0.5 / 41.3).epsilon(1e-12));
    CHECK(blocks[2]->tau * 1e3 == doctest::Approx(12.11).epsilon(1e-3));
    CHECK(blocks[0]->tau == doctest::Approx(1 / (2 * 72.4)));
    CHECK(blocks[1]->tau == doctest::Approx(1 / (2 * 70.3)));
    REQUIRE(r.duration_s.has_value());
  }
  SUBCASE("zero angle gives the identity") {
    FourBodyTarget t;
    t.duration_s = 0.0;
    const auto r = compile_four_body(crotonic(), t, Variant::A, FourBodyRealization::Ideal);
    const Operator u = sequence_propagator(r.sequence, crotonic());
    CHECK(equal_up_to_global_phase(u, Operator::Identity(16, 16), 1e-10).equal);
  }
  SUBCASE("refocused realization contains no coupling blocks and still verifies") {
    const auto target = FourBodyTarget::from_pi_j_t(1.5707963, 1.0);
    const auto r = compile_four_body(crotonic(), target, Variant::A,
                                     FourBodyRealization::Refocused);
    CHECK_FALSE(has_block(r.sequence));
    CHECK(r.deviation < 1e-10);
    const Operator u = sequence_propagator(r.sequence, crotonic());
    CHECK(equal_up_to_global_phase(u, zstring_oracle({1, 2, 3, 4}, 1.5707963 / 2, 4), 1e-10)
              .equal);
    const auto ideal = compile_four_body(crotonic(), target, Variant::A,
                                         FourBodyRealization::Ideal);
    CHECK(sequence_duration(r.sequence) ==
          doctest::Approx(sequence_duration(ideal.sequence)).epsilon(1e-12));
  }
  SUBCASE("other spin mapping") {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(5, 5);
    c(1, 2) = c(2, 1) = 50.0;
    c(2, 3) = c(3, 2) = 40.0;
    c(3, 4) = c(4, 3) = 30.0;
    const SpinSystem five({100, 200, 300, 400, 500}, c);
    const auto t = FourBodyTarget::from_pi_j_t(0.9, 1.0, {2, 3, 4, 5});
    const auto r = compile_four_body(five, t, Variant::A, FourBodyRealization::Refocused);
    const Operator u = sequence_propagator(r.sequence, five);
    CHECK(equal_up_to_global_phase(u, zstring_oracle({2, 3, 4, 5}, 0.45, 5), 1e-10).equal);
  }
  SUBCASE("zero coupling on a required pair") {
    Eigen::MatrixXd c = crotonic().couplings();
    c(2, 3) = c(3, 2) = 0.0;
    const SpinSystem broken(crotonic().shifts(), c);
    CHECK(error_code([&] {
            compile_four_body(broken, FourBodyTarget::from_pi_j_t(1.0), Variant::A,
                              FourBodyRealization::Ideal);
          }) == "zero_coupling");
  }
}

TEST_CASE("compile_four_body variant B") {
  const auto target = FourBodyTarget::from_pi_j_t(kPi / 4, 1.0);
  CHECK(error_code([&] {
          compile_four_body(crotonic(), target, Variant::B, FourBodyRealization::Ideal);
        }) == "negative_core_duration");
  const auto b = compile_four_body(crotonic(), target, Variant::B, FourBodyRealization::Ideal,
                                   1e-10, CoreAnglePolicy::WrapModPi);
  const auto a = compile_four_body(crotonic(), target, Variant::A, FourBodyRealization::Ideal);
  const Operator ua = sequence_propagator(a.sequence, crotonic());
  const Operator ub = sequence_propagator(b.sequence, crotonic());
  CHECK(equal_up_to_global_phase(ub, ua, 1e-10).equal);
  const auto blocks = blocks_of(b.sequence);
  bool core_found = false;
  for (const auto* blk : blocks) {
    CHECK(blk->tau >= 0.0);
    core_found |= blk->pair == std::pair{2, 4};
  }
  CHECK(core_found);
}

TEST_CASE("variants agree over random angles") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> x(-2 * kPi, 2 * kPi);
  for (int trial = 0; trial < 12; ++trial) {
    const auto t = FourBodyTarget::from_pi_j_t(x(rng), trial % 2 ? 1.0 : -3.0);
    const auto policy = CoreAnglePolicy::WrapModPi;
    const auto a = compile_four_body(crotonic(), t, Variant::A, FourBodyRealization::Ideal,
                                     1e-10, policy);
    const auto b = compile_four_body(crotonic(), t, Variant::B, FourBodyRealization::Ideal,
                                     1e-10, policy);
    CHECK(equal_up_to_global_phase(sequence_propagator(a.sequence, crotonic()),
                                   sequence_propagator(b.sequence, crotonic()), 1e-10)
              .equal);
  }
}

TEST_CASE("core duration is linear in T and conjugation blocks are fixed") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> x(0.05, 3.0);
  for (int trial = 0; trial < 8; ++trial) {
    const double angle = x(rng);
    const auto one = compile_four_body(crotonic(), FourBodyTarget::from_pi_j_t(angle), Variant::A,
                                       FourBodyRealization::Ideal);
    const auto two = compile_four_body(crotonic(), FourBodyTarget::from_pi_j_t(2 * angle),
                                       Variant::A, FourBodyRealization::Ideal);
    const auto b1 = blocks_of(one.sequence), b2 = blocks_of(two.sequence);
    REQUIRE(b1.size() == b2.size());
    for (std::size_t i = 0; i < b1.size(); ++i) {
      if (b1[i]->pair == std::pair{3, 4})
        CHECK(b2[i]->tau == doctest::Approx(2 * b1[i]->tau).epsilon(1e-14));
      else
        CHECK(*b1[i] == *b2[i]);
    }
  }
}

TEST_CASE("report serialization and enum parsing") {
  const auto r = compile_four_body(crotonic(), FourBodyTarget::from_pi_j_t(kPi / 2), Variant::A,
                                   FourBodyRealization::Ideal);
  const std::string json = report_json(r);
  for (const char* key : {"\"target\"", "\"deviation\"", "\"global_phase\"", "\"corrected\"",
                          "\"notes\"", "\"duration_s\"", "\"sequence\""})
    CHECK(json.find(key) != std::string::npos);
  CHECK(parse_variant("A") == Variant::A);
  CHECK(parse_variant("B") == Variant::B);
  CHECK(error_code([] { parse_variant("C"); }) == "bad_variant");
  CHECK(parse_realization("refocused") == FourBodyRealization::Refocused);
  CHECK(error_code([] { parse_realization("x"); }) == "bad_realization");
}
