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
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nmrqc/error.hpp"

namespace nmrqc {

template <typename Real>
using OperatorT =
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
using Operator = OperatorT<double>;

enum class PauliLetter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char to_char(PauliLetter l) { return "IXYZ"[static_cast<int>(l)]; }

/// Signed tensor product of single-spin Pauli letters. Position 0 is spin 1,
/// the leftmost (most significant) tensor factor.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<PauliLetter> letters,
                       double coefficient = 1.0)
      : letters_(std::move(letters)), coefficient_(coefficient) {}

  /// Parses a word such as "IIXI" (case-insensitive).
  static PauliString parse(std::string_view word, double coefficient = 1.0) {
    std::vector<PauliLetter> letters;
    letters.reserve(word.size());
    for (char c : word) {
      switch (c) {
        case 'I': case 'i': letters.push_back(PauliLetter::I); break;
        case 'X': case 'x': letters.push_back(PauliLetter::X); break;
        case 'Y': case 'y': letters.push_back(PauliLetter::Y); break;
        case 'Z': case 'z': letters.push_back(PauliLetter::Z); break;
        default:
          throw Error("bad_pauli", "invalid Pauli letter '" +
                                       std::string(1, c) + "' in " +
                                       std::string(word));
      }
    }
    return PauliString(std::move(letters), coefficient);
  }

  static PauliString identity(int n) {
    return PauliString(std::vector<PauliLetter>(n, PauliLetter::I));
  }

  /// Letter `l` on the 1-based `spin`, identity elsewhere.
  static PauliString single(int n, int spin, PauliLetter l) {
    auto p = identity(n);
    p.letters_.at(spin - 1) = l;
    return p;
  }

  /// Product of `l` over the given 1-based spins.
  static PauliString on(int n, std::initializer_list<int> spins,
                        PauliLetter l) {
    auto p = identity(n);
    for (int s : spins) p.letters_.at(s - 1) = l;
    return p;
  }
  static PauliString on(int n, std::span<const int> spins, PauliLetter l) {
    auto p = identity(n);
    for (int s : spins) p.letters_.at(s - 1) = l;
    return p;
  }

  int size() const { return static_cast<int>(letters_.size()); }
  PauliLetter operator[](int i) const { return letters_[i]; }
  const std::vector<PauliLetter>& letters() const { return letters_; }
  double coefficient() const { return coefficient_; }

  PauliString with_coefficient(double c) const {
    return PauliString(letters_, c);
  }

  bool is_identity() const {
    return std::all_of(letters_.begin(), letters_.end(),
                       [](PauliLetter l) { return l == PauliLetter::I; });
  }

  std::string word() const {
    std::string s;
    for (auto l : letters_) s.push_back(to_char(l));
    return s;
  }

  // Ordering and equality look at the letters only; coefficients are data.
  friend bool operator<(const PauliString& a, const PauliString& b) {
    return a.letters_ < b.letters_;
  }
  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.letters_ == b.letters_;
  }

 private:
  std::vector<PauliLetter> letters_;
  double coefficient_ = 1.0;
};

using PauliTable = std::map<PauliString, double>;

namespace detail {

template <typename Real>
Eigen::Matrix<std::complex<Real>, 2, 2> single_pauli(PauliLetter l) {
  using C = std::complex<Real>;
  Eigen::Matrix<C, 2, 2> m;
  switch (l) {
    case PauliLetter::I: m << C(1), C(0), C(0), C(1); break;
    case PauliLetter::X: m << C(0), C(1), C(1), C(0); break;
    case PauliLetter::Y: m << C(0), C(0, -1), C(0, 1), C(0); break;
    case PauliLetter::Z: m << C(1), C(0), C(0), C(-1); break;
  }
  return m;
}

// <row| P |col> for the unit-coefficient string: the single nonzero column
// of `row` and its phase.
inline std::pair<std::size_t, std::complex<double>> pauli_row_entry(
    const PauliString& p, std::size_t row) {
  const int n = p.size();
  std::size_t col = row;
  std::complex<double> phase(1.0, 0.0);
  for (int k = 0; k < n; ++k) {
    const std::size_t bit = std::size_t{1} << (n - 1 - k);
    const bool r = (row & bit) != 0;
    switch (p[k]) {
      case PauliLetter::I: break;
      case PauliLetter::X: col ^= bit; break;
      case PauliLetter::Y:
        col ^= bit;
        phase *= r ? std::complex<double>(0, 1) : std::complex<double>(0, -1);
        break;
      case PauliLetter::Z:
        if (r) phase = -phase;
        break;
    }
  }
  return {col, phase};
}

}  // namespace detail

inline std::size_t dimension_of(int n) { return std::size_t{1} << n; }

/// Dense matrix of `p` (coefficient included) on `n` spins.
template <typename Real = double>
OperatorT<Real> pauli_matrix(const PauliString& p, int n) {
  if (p.size() != n) {
    throw Error("length_mismatch", "Pauli string " + p.word() + " has " +
                                       std::to_string(p.size()) +
                                       " letters, expected " +
                                       std::to_string(n));
  }
  OperatorT<Real> m = OperatorT<Real>::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    OperatorT<Real> next =
        Eigen::kroneckerProduct(m, detail::single_pauli<Real>(p[k])).eval();
    m.swap(next);
  }
  return m * std::complex<Real>(static_cast<Real>(p.coefficient()));
}

/// exp(-i theta P) = cos(theta) I - i sin(theta) P for a unit-coefficient
/// (sign +-1) non-identity string.
template <typename Real = double>
OperatorT<Real> pauli_exponential(const PauliString& p, Real theta, int n) {
  if (std::abs(std::abs(p.coefficient()) - 1.0) > 1e-15) {
    throw Error("bad_coefficient",
                "pauli_exponential needs a coefficient of +-1");
  }
  if (p.is_identity()) {
    throw Error("identity_generator",
                "pauli_exponential needs a non-identity string");
  }
  const auto dim = static_cast<Eigen::Index>(dimension_of(n));
  return std::complex<Real>(std::cos(theta)) *
             OperatorT<Real>::Identity(dim, dim) -
         std::complex<Real>(0, std::sin(theta)) * pauli_matrix<Real>(p, n);
}

/// Product of `ops` with the first element acting first on states:
/// ops[last] * ... * ops[0].
template <typename Real>
OperatorT<Real> compose(std::span<const OperatorT<Real>> ops) {
  if (ops.empty()) {
    throw Error("empty_compose", "compose needs at least one operator");
  }
  OperatorT<Real> out = ops.front();
  for (std::size_t i = 1; i < ops.size(); ++i) {
    if (ops[i].rows() != out.rows() || ops[i].cols() != out.cols()) {
      throw Error("dimension_mismatch", "compose: operator dimensions differ");
    }
    out = (ops[i] * out).eval();
  }
  return out;
}

template <typename Real>
OperatorT<Real> compose(std::initializer_list<OperatorT<Real>> ops) {
  return compose<Real>(std::span<const OperatorT<Real>>(ops.begin(), ops.size()));
}

inline Operator compose(std::initializer_list<Operator> ops) {
  return compose<double>(std::span<const Operator>(ops.begin(), ops.size()));
}

struct PhaseVerdict {
  bool equal = false;
  double phase = 0.0;      ///< phi such that a ~ exp(i phi) b
  double deviation = 0.0;  ///< max-norm of a - exp(i phi) b
};

/// Compares `a` with `b` modulo a global phase. The phase comes from the
/// ratio at b's largest-magnitude entry; deviation is the entrywise max-norm.
template <typename DerivedA, typename DerivedB>
PhaseVerdict equal_up_to_global_phase(const Eigen::MatrixBase<DerivedA>& a,
                                      const Eigen::MatrixBase<DerivedB>& b,
                                      double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("dimension_mismatch",
                "equal_up_to_global_phase: dimensions differ");
  }
  Eigen::Index r = 0, c = 0;
  const double bmax = b.cwiseAbs().maxCoeff(&r, &c);
  if (bmax == 0.0) {
    throw Error("zero_operator", "equal_up_to_global_phase: b is zero");
  }
  PhaseVerdict v;
  const std::complex<double> ratio = std::complex<double>(a(r, c)) /
                                     std::complex<double>(b(r, c));
  v.phase = std::abs(ratio) > 0.0 ? std::arg(ratio) : 0.0;
  const std::complex<double> rot = std::polar(1.0, v.phase);
  v.deviation = (a.template cast<std::complex<double>>() -
                 rot * b.template cast<std::complex<double>>())
                    .cwiseAbs()
                    .maxCoeff();
  v.equal = v.deviation <= tol;
  return v;
}

/// Pauli expansion of a Hermitian operator: c_P = Tr(op P) / 2^n. Entries
/// with |c_P| <= 1e-12 are dropped.
template <typename Derived>
PauliTable pauli_coefficients(const Eigen::MatrixBase<Derived>& op) {
  const auto dim = static_cast<std::size_t>(op.rows());
  if (op.rows() != op.cols() || dim == 0 || (dim & (dim - 1)) != 0) {
    throw Error("bad_dimension", "operator dimension is not a power of two");
  }
  if ((op - op.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error("not_hermitian", "pauli_coefficients needs a Hermitian operator");
  }
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;

  PauliTable table;
  std::vector<PauliLetter> letters(n, PauliLetter::I);
  const std::size_t count = std::size_t{1} << (2 * n);
  for (std::size_t code = 0; code < count; ++code) {
    for (int k = 0; k < n; ++k) {
      letters[k] = static_cast<PauliLetter>((code >> (2 * (n - 1 - k))) & 3);
    }
    PauliString p(letters);
    std::complex<double> tr(0.0, 0.0);
    // Tr(op P) = sum_row P(row, col) op(col, row)
    for (std::size_t row = 0; row < dim; ++row) {
      auto [col, phase] = detail::pauli_row_entry(p, row);
      tr += phase * std::complex<double>(op(static_cast<Eigen::Index>(col),
                                            static_cast<Eigen::Index>(row)));
    }
    const double c = tr.real() / static_cast<double>(dim);
    if (std::abs(c) > 1e-12) table.emplace(p.with_coefficient(c), c);
  }
  return table;
}

/// sum_P c_P P over a coefficient table.
inline Operator from_pauli_table(const PauliTable& table, int n) {
  const auto dim = static_cast<Eigen::Index>(dimension_of(n));
  Operator out = Operator::Zero(dim, dim);
  for (const auto& [p, c] : table) {
    out += pauli_matrix(p.with_coefficient(c), n);
  }
  return out;
}

inline bool is_unitary(const Operator& u, double tol) {
  const Operator id = Operator::Identity(u.rows(), u.cols());
  return (u * u.adjoint() - id).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace nmrqc
