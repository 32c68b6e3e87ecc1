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

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nmrqc/pauli.hpp"

namespace nmrqc {

/// Chemical shifts and scalar couplings of an Ising-type spin register.
/// Spins are addressed 1..n everywhere in the public API.
class SpinSystem {
 public:
  /// Validates and builds. `couplings_hz` must be n x n, symmetric, with a
  /// zero diagonal. Empty `labels` default to S1..Sn.
  SpinSystem(std::vector<double> shifts_hz, Eigen::MatrixXd couplings_hz,
             std::vector<std::string> labels = {});

  int size() const { return static_cast<int>(shifts_.size()); }
  double shift(int spin) const { return shifts_.at(spin - 1); }
  double coupling(int k, int l) const;
  const std::vector<double>& shifts() const { return shifts_; }
  const Eigen::MatrixXd& couplings() const { return couplings_; }
  const std::vector<std::string>& labels() const { return labels_; }

  SpinSystem with_shifts_scaled(double factor) const;
  /// Copy with every coupling except (k,l) set to zero.
  SpinSystem with_only_coupling(int k, int l) const;

 private:
  std::vector<double> shifts_;
  Eigen::MatrixXd couplings_;
  std::vector<std::string> labels_;
};

/// Effective many-body term exp(-i (pi/2) J_eff T Z..Z) on four spins.
struct FourBodyTarget {
  std::array<int, 4> spins{1, 2, 3, 4};
  double j_eff_hz = 1.0;
  double duration_s = 0.0;

  /// The dimensionless evolution angle pi * J_eff * T.
  double pi_j_t() const;
  /// Target with T chosen so that pi J_eff T == pi_j_t.
  static FourBodyTarget from_pi_j_t(double pi_j_t, double j_eff_hz = 1.0,
                                    std::array<int, 4> spins = {1, 2, 3, 4});
  void validate(const SpinSystem& sys) const;
};

/// Parses a JSON molecule document:
///   {"n": 2, "shifts_hz": [..], "couplings_hz": [[1, 2, 72.4]], "labels": [..]}
/// Coupling indices are 1-based; each unordered pair may appear once.
SpinSystem load_molecule(std::string_view json_text);
SpinSystem load_molecule_file(const std::filesystem::path& path);

/// Bundled molecule documents; "crotonic-acid" is the 13C-labelled
/// four-spin register.
SpinSystem molecule_preset(std::string_view name);
std::string_view molecule_preset_document(std::string_view name);

/// Preset name or path to a JSON document.
SpinSystem resolve_molecule(const std::string& name_or_path);

/// Diagonal of H = -pi sum_k nu_k Z_k + (pi/2) sum_{k<l} J_kl Z_k Z_l in
/// rad/s, indexed by computational basis state.
Eigen::VectorXd hamiltonian_diagonal(const SpinSystem& sys);
Operator hamiltonian(const SpinSystem& sys);

}  // namespace nmrqc
