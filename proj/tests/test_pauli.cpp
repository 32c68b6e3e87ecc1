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
#include "nmrqc/pauli.hpp"
#include "oracles.hpp"

using namespace nmrqc;
using oracle::cd;
using oracle::max_abs;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("pauli_matrix builds the expected Kronecker products") {
  SUBCASE("Z on spin 1 of 2") {
    const Operator m = pauli_matrix(PauliString::parse("ZI"), 2);
    Eigen::VectorXcd d(4);
    d << 1, 1, -1, -1;
    CHECK(max_abs(m - Operator(d.asDiagonal())) == 0.0);
  }
  SUBCASE("single X") {
    Operator x(2, 2);
    x << 0, 1, 1, 0;
    CHECK(max_abs(pauli_matrix(PauliString::parse("X"), 1) - x) == 0.0);
  }
  SUBCASE("ZZZZ is the parity diagonal") {
    const Operator m = pauli_matrix(PauliString::parse("ZZZZ"), 4);
    for (int a = 0; a < 16; ++a) {
      const double parity = (std::popcount(static_cast<unsigned>(a)) % 2) ? -1.0 : 1.0;
      CHECK(m(a, a) == cd(parity));
    }
    CHECK(max_abs(m - oracle::kron_word("ZZZZ")) == 0.0);
  }
  SUBCASE("coefficient scales the matrix") {
    const Operator m = pauli_matrix(PauliString::parse("XY", -0.5), 2);
    CHECK(max_abs(m + 0.5 * oracle::kron_word("XY")) < 1e-15);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(pauli_matrix(PauliString::parse("ZZ"), 3), Error);
  }
  SUBCASE("bad letter") { CHECK_THROWS_AS(PauliString::parse("ZQ"), Error); }
}

TEST_CASE("random Pauli strings match the brute-force product and are Hermitian unitaries") {
  std::mt19937 rng(1234);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 5;
    const std::string w = oracle::random_word(rng, n);
    const Operator m = pauli_matrix(PauliString::parse(w), n);
    CHECK(max_abs(m - oracle::kron_word(w)) == 0.0);
    CHECK(max_abs(m - m.adjoint()) == 0.0);
    CHECK(is_unitary(m, 1e-15));
    CHECK(std::abs(m.trace()) == 0.0);
  }
}

TEST_CASE("pauli_exponential closed form") {
  SUBCASE("theta = 0 is the identity") {
    CHECK(max_abs(pauli_exponential(PauliString::parse("XZ"), 0.0, 2) -
                  Operator::Identity(4, 4)) == 0.0);
  }
  SUBCASE("X at pi/2 is -iX") {
    const Operator u = pauli_exponential(PauliString::parse("X"), kPi / 2, 1);
    CHECK(max_abs(u - cd(0, -1) * oracle::kron_word("X")) < 1e-16);
  }
  SUBCASE("Z1Z2 at pi/4 is the diagonal exponential") {
    const Operator u = pauli_exponential(PauliString::parse("ZZ"), kPi / 4, 2);
    Eigen::VectorXd parity(4);
    parity << 1, -1, -1, 1;
    const Eigen::MatrixXcd expected = oracle::diag_exp(parity, kPi / 4);
    CHECK(max_abs(u - expected) < 1e-15);
    CHECK(std::abs(u(0, 0) - std::polar(1.0, -kPi / 4)) < 1e-15);
    CHECK(std::abs(u(1, 1) - std::polar(1.0, kPi / 4)) < 1e-15);
  }
  SUBCASE("negative coefficient flips the generator") {
    const Operator a = pauli_exponential(PauliString::parse("Y", -1.0), 0.3, 1);
    const Operator b = pauli_exponential(PauliString::parse("Y"), -0.3, 1);
    CHECK(max_abs(a - b) < 1e-16);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(pauli_exponential(PauliString::parse("II"), 0.1, 2), Error);
    CHECK_THROWS_AS(pauli_exponential(PauliString::parse("XI", 2.0), 0.1, 2), Error);
  }
}

TEST_CASE("pauli_exponential agrees with the Pade matrix exponential and inverts") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> angle(-4.0, 4.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 4;
    const std::string w = oracle::random_word(rng, n);
    const double theta = angle(rng);
    const PauliString p = PauliString::parse(w);
    const Operator u = pauli_exponential(p, theta, n);
    CHECK(max_abs(u - oracle::expm_minus_i(oracle::kron_word(w), theta)) < 1e-12);
    CHECK(is_unitary(u, 1e-12));
    const Operator back = pauli_exponential(p, -theta, n);
    CHECK(max_abs(u * back - Operator::Identity(u.rows(), u.cols())) < 1e-12);
  }
}

TEST_CASE("compose applies the first element first") {
  const Operator a = pauli_exponential(PauliString::parse("X"), 0.4, 1);
  const Operator b = pauli_exponential(PauliString::parse("Y"), 0.9, 1);
  CHECK(max_abs(compose({a}) - a) == 0.0);
  CHECK(max_abs(compose({a, b}) - b * a) < 1e-16);
  CHECK(max_abs(compose({a, Operator(a.adjoint())}) - Operator::Identity(2, 2)) < 1e-15);
  const Operator q = pauli_exponential(PauliString::parse("X"), kPi / 4, 1);
  CHECK(max_abs(compose({q, q}) - cd(0, -1) * oracle::kron_word("X")) < 1e-15);
  CHECK_THROWS_AS(compose({a, Operator(Operator::Identity(4, 4))}), Error);
}

TEST_CASE("equal_up_to_global_phase") {
  const Operator u = pauli_exponential(PauliString::parse("XZ"), 0.7, 2);
  SUBCASE("pure phase") {
    const auto v = equal_up_to_global_phase(u, Operator(std::polar(1.0, kPi / 3) * u), 1e-12);
    CHECK(v.equal);
    CHECK(v.phase == doctest::Approx(-kPi / 3).epsilon(1e-12));
    CHECK(v.deviation < 1e-15);
    const auto w = equal_up_to_global_phase(Operator(std::polar(1.0, kPi / 3) * u), u, 1e-12);
    CHECK(w.phase == doctest::Approx(kPi / 3).epsilon(1e-12));
  }
  SUBCASE("-iX versus X") {
    const Operator x = oracle::kron_word("X");
    const auto v = equal_up_to_global_phase(Operator(cd(0, -1) * x), x, 1e-12);
    CHECK(v.equal);
    CHECK(v.phase == doctest::Approx(-kPi / 2));
  }
  SUBCASE("perturbation is detected and measured") {
    Operator e = Operator::Zero(4, 4);
    e(2, 1) = 1e-3;
    const auto v = equal_up_to_global_phase(Operator(u + e), u, 1e-10);
    CHECK_FALSE(v.equal);
    CHECK(v.deviation == doctest::Approx(1e-3).epsilon(1e-6));
  }
  SUBCASE("zero reference") {
    CHECK_THROWS_AS(equal_up_to_global_phase(u, Operator(Operator::Zero(4, 4)), 1e-9), Error);
  }
  SUBCASE("reflexive and symmetric verdicts") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
      const Operator a = pauli_exponential(PauliString::parse(oracle::random_word(rng, 3)), angle(rng), 3);
      const Operator b = pauli_exponential(PauliString::parse(oracle::random_word(rng, 3)), angle(rng), 3);
      CHECK(equal_up_to_global_phase(a, a, 0.0).equal);
      for (double tol : {0.0, 1e-12, 0.5, 3.0}) {
        CHECK(equal_up_to_global_phase(a, b, tol).equal ==
              equal_up_to_global_phase(b, a, tol).equal);
      }
    }
  }
}

TEST_CASE("pauli_coefficients reads out trace inner products") {
  SUBCASE("single term") {
    const auto t = pauli_coefficients(oracle::kron_word("IIXI"));
    REQUIRE(t.size() == 1);
    CHECK(t.begin()->first.word() == "IIXI");
    CHECK(t.begin()->second == doctest::Approx(1.0));
  }
  SUBCASE("zero matrix") { CHECK(pauli_coefficients(Operator(Operator::Zero(8, 8))).empty()); }
  SUBCASE("sum of two terms") {
    const Eigen::MatrixXcd op = oracle::kron_word("ZZ") + 0.5 * oracle::kron_word("XI");
    const auto t = pauli_coefficients(op);
    REQUIRE(t.size() == 2);
    CHECK(t.at(PauliString::parse("ZZ")) == doctest::Approx(1.0));
    CHECK(t.at(PauliString::parse("XI")) == doctest::Approx(0.5));
  }
  SUBCASE("non-Hermitian input") {
    Operator m = Operator::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(pauli_coefficients(m), Error);
  }
  SUBCASE("round trip over random tables") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 1 + trial % 4;
      PauliTable table;
      for (int term = 0; term < 5; ++term) {
        const auto p = PauliString::parse(oracle::random_word(rng, n, false));
        table[p] = coef(rng);
      }
      const auto recovered = pauli_coefficients(from_pauli_table(table, n));
      CHECK(recovered.size() == table.size());
      for (const auto& [p, c] : table) {
        REQUIRE(recovered.count(p) == 1);
        CHECK(std::abs(recovered.at(p) - c) < 1e-10);
      }
    }
  }
}

TEST_CASE("conjugating X_i by a ZZ block rotates into Y_i Z_j") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> j_dist(-80.0, 80.0), t_dist(0.0, 0.05);
  for (int trial = 0; trial < 25; ++trial) {
    const double j = j_dist(rng), t = t_dist(rng);
    const Operator u = pauli_exponential(PauliString::parse("ZZI"), kPi * j * t / 2, 3);
    const Operator x1 = pauli_matrix(PauliString::parse("XII"), 3);
    const Operator expected = std::cos(kPi * j * t) * x1 +
                              std::sin(kPi * j * t) * pauli_matrix(PauliString::parse("YZI"), 3);
    CHECK(max_abs(u * x1 * u.adjoint() - expected) < 1e-10);
  }
}
