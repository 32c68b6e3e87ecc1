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

#include "nmrqc/spin_system.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace nmrqc {

namespace {

constexpr std::string_view kCrotonicAcid = R"({
  "name": "crotonic-acid",
  "n": 4,
  "labels": ["C1", "C2", "C3", "C4"],
  "shifts_hz": [21468.9, 15255.6, 18668.0, 2190.4],
  "couplings_hz": [
    [1, 2, 72.4],
    [1, 3, -1.3],
    [1, 4, 7.0],
    [2, 3, 70.3],
    [2, 4, -1.6],
    [3, 4, 41.3]
  ]
})";

void check_spin(int spin, int n, const char* what) {
  if (spin < 1 || spin > n) {
    throw Error("spin_out_of_range", std::string(what) + ": spin " +
                                         std::to_string(spin) +
                                         " outside 1.." + std::to_string(n));
  }
}

double require_number(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) {
    throw Error("invalid_molecule", where + " is not numeric");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error("invalid_molecule", where + " is not finite");
  return d;
}

}  // namespace

SpinSystem::SpinSystem(std::vector<double> shifts_hz,
                       Eigen::MatrixXd couplings_hz,
                       std::vector<std::string> labels)
    : shifts_(std::move(shifts_hz)),
      couplings_(std::move(couplings_hz)),
      labels_(std::move(labels)) {
  const auto n = static_cast<Eigen::Index>(shifts_.size());
  if (n < 1) throw Error("invalid_molecule", "spin count must be >= 1");
  if (couplings_.rows() != n || couplings_.cols() != n) {
    throw Error("invalid_molecule", "coupling table must be n x n");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (couplings_(k, k) != 0.0) {
      throw Error("invalid_molecule", "self-coupling on the diagonal");
    }
    for (Eigen::Index l = k + 1; l < n; ++l) {
      if (couplings_(k, l) != couplings_(l, k)) {
        throw Error("asymmetric_coupling",
                    "asymmetric coupling between spins " +
                        std::to_string(k + 1) + " and " +
                        std::to_string(l + 1));
      }
    }
  }
  if (labels_.empty()) {
    for (Eigen::Index k = 0; k < n; ++k) {
      labels_.push_back("S" + std::to_string(k + 1));
    }
  } else if (static_cast<Eigen::Index>(labels_.size()) != n) {
    throw Error("invalid_molecule", "labels must have one entry per spin");
  }
}

double SpinSystem::coupling(int k, int l) const {
  check_spin(k, size(), "coupling");
  check_spin(l, size(), "coupling");
  return couplings_(k - 1, l - 1);
}

SpinSystem SpinSystem::with_shifts_scaled(double factor) const {
  auto s = shifts_;
  for (auto& v : s) v *= factor;
  return SpinSystem(std::move(s), couplings_, labels_);
}

SpinSystem SpinSystem::with_only_coupling(int k, int l) const {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(size(), size());
  j(k - 1, l - 1) = j(l - 1, k - 1) = coupling(k, l);
  return SpinSystem(shifts_, std::move(j), labels_);
}

double FourBodyTarget::pi_j_t() const {
  return std::numbers::pi * j_eff_hz * duration_s;
}

FourBodyTarget FourBodyTarget::from_pi_j_t(double pi_j_t, double j_eff_hz,
                                           std::array<int, 4> spins) {
  if (j_eff_hz == 0.0) {
    throw Error("invalid_target", "effective coupling must be nonzero");
  }
  return FourBodyTarget{spins, j_eff_hz, pi_j_t / (std::numbers::pi * j_eff_hz)};
}

void FourBodyTarget::validate(const SpinSystem& sys) const {
  std::set<int> seen;
  for (int s : spins) {
    check_spin(s, sys.size(), "four-body target");
    seen.insert(s);
  }
  if (seen.size() != spins.size()) {
    throw Error("invalid_target", "four-body target spins must be distinct");
  }
  if (!std::isfinite(j_eff_hz * duration_s)) {
    throw Error("invalid_target", "J_eff * T is not finite");
  }
}

SpinSystem load_molecule(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("invalid_molecule", std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw Error("invalid_molecule", "document is not an object");
  for (const char* key : {"n", "shifts_hz"}) {
    if (!doc.contains(key)) {
      throw Error("invalid_molecule", std::string("missing field '") + key + "'");
    }
  }
  if (!doc["n"].is_number_integer()) {
    throw Error("invalid_molecule", "'n' must be an integer");
  }
  const int n = doc["n"].get<int>();
  if (n < 1) throw Error("invalid_molecule", "'n' must be >= 1");

  const auto& shifts_doc = doc["shifts_hz"];
  if (!shifts_doc.is_array() || static_cast<int>(shifts_doc.size()) != n) {
    throw Error("invalid_molecule", "'shifts_hz' must be an array of n numbers");
  }
  std::vector<double> shifts;
  for (std::size_t k = 0; k < shifts_doc.size(); ++k) {
    shifts.push_back(
        require_number(shifts_doc[k], "shifts_hz[" + std::to_string(k) + "]"));
  }

  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXi declared = Eigen::MatrixXi::Zero(n, n);
  if (doc.contains("couplings_hz")) {
    const auto& cdoc = doc["couplings_hz"];
    if (!cdoc.is_array()) {
      throw Error("invalid_molecule", "'couplings_hz' must be an array");
    }
    for (const auto& entry : cdoc) {
      if (!entry.is_array() || entry.size() != 3 ||
          !entry[0].is_number_integer() || !entry[1].is_number_integer()) {
        throw Error("invalid_molecule",
                    "each coupling must be [k, l, J] with integer k, l");
      }
      const int k = entry[0].get<int>();
      const int l = entry[1].get<int>();
      const double value = require_number(entry[2], "coupling value");
      if (k < 1 || k > n || l < 1 || l > n) {
        throw Error("coupling_index", "coupling index out of range: [" +
                                          std::to_string(k) + ", " +
                                          std::to_string(l) + "]");
      }
      if (k == l) throw Error("coupling_index", "coupling of a spin with itself");
      if (declared(k - 1, l - 1) != 0) {
        if (j(k - 1, l - 1) != value) {
          throw Error("asymmetric_coupling",
                      "asymmetric coupling between spins " + std::to_string(k) +
                          " and " + std::to_string(l));
        }
        throw Error("duplicate_coupling", "coupling pair declared twice");
      }
      declared(k - 1, l - 1) = declared(l - 1, k - 1) = 1;
      j(k - 1, l - 1) = j(l - 1, k - 1) = value;
    }
  }

  std::vector<std::string> labels;
  if (doc.contains("labels")) {
    const auto& ldoc = doc["labels"];
    if (!ldoc.is_array() || static_cast<int>(ldoc.size()) != n) {
      throw Error("invalid_molecule", "'labels' must be an array of n strings");
    }
    for (const auto& l : ldoc) {
      if (!l.is_string()) throw Error("invalid_molecule", "label is not a string");
      labels.push_back(l.get<std::string>());
    }
  }
  return SpinSystem(std::move(shifts), std::move(j), std::move(labels));
}

SpinSystem load_molecule_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open molecule file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load_molecule(buf.str());
}

std::string_view molecule_preset_document(std::string_view name) {
  if (name == "crotonic-acid") return kCrotonicAcid;
  throw Error("unknown_preset", "unknown molecule preset '" + std::string(name) + "'");
}

SpinSystem molecule_preset(std::string_view name) {
  return load_molecule(molecule_preset_document(name));
}

SpinSystem resolve_molecule(const std::string& name_or_path) {
  if (name_or_path == "crotonic-acid") return molecule_preset(name_or_path);
  return load_molecule_file(name_or_path);
}

Eigen::VectorXd hamiltonian_diagonal(const SpinSystem& sys) {
  const int n = sys.size();
  const auto dim = static_cast<Eigen::Index>(dimension_of(n));
  Eigen::VectorXd h = Eigen::VectorXd::Zero(dim);
  const double pi = std::numbers::pi;
  for (Eigen::Index a = 0; a < dim; ++a) {
    auto z = [&](int spin) {
      return ((a >> (n - spin)) & 1) ? -1.0 : 1.0;
    };
    double e = 0.0;
    for (int k = 1; k <= n; ++k) e -= pi * sys.shift(k) * z(k);
    for (int k = 1; k <= n; ++k) {
      for (int l = k + 1; l <= n; ++l) {
        e += 0.5 * pi * sys.coupling(k, l) * z(k) * z(l);
      }
    }
    h(a) = e;
  }
  return h;
}

Operator hamiltonian(const SpinSystem& sys) {
  return hamiltonian_diagonal(sys).cast<std::complex<double>>().asDiagonal();
}

}  // namespace nmrqc
