// Copyright 2026 The Holonome Authors
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

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "holonome/linalg.hpp"

namespace holonome {

/**
 * A phased Pauli operator on n qubits (n <= 64), stored in binary symplectic
 * form plus a power of i.
 *
 * Phase convention (fixed; everything downstream relies on it):
 *
 *   dense(P) = i^phase * sigma_0 (x) sigma_1 (x) ... (x) sigma_{n-1}
 *
 * where the per-site letter is read off the bit pair (x_j, z_j):
 *
 *   x z | letter | matrix
 *   ----+--------+---------------------
 *   0 0 |   I    | [[1,0],[0,1]]
 *   1 0 |   X    | [[0,1],[1,0]]
 *   0 1 |   Z    | [[1,0],[0,-1]]
 *   1 1 |   Y    | [[0,-i],[i,0]]
 *
 * i.e. a site with both bits set is the standard Y matrix, and the i that
 * relates Y to XZ (Y = i X Z) is folded into `phase` during arithmetic.
 * Qubit 0 is the leftmost tensor factor (most significant bit of a basis
 * index). `phase` is the exponent of i, normalized mod 4, so equality of
 * operators is plain field equality.
 */
class PauliOperator {
 public:
  PauliOperator() = default;

  PauliOperator(int n, uint64_t x_bits, uint64_t z_bits, uint8_t phase_exp = 0)
      : n_(n), x_(x_bits), z_(z_bits), phase_(phase_exp & 3) {
    if (n < 0 || n > 64) throw InvalidArgument("qubit count must be in [0,64]");
    if (n < 64 && ((x_ | z_) >> n) != 0)
      throw InvalidArgument("bit vectors extend past the qubit count");
  }

  static PauliOperator identity(int n) { return PauliOperator(n, 0, 0, 0); }

  /** Single nontrivial letter c in {I,X,Y,Z} at `qubit`, +1 phase. */
  static PauliOperator single(int n, int qubit, char c) {
    PauliOperator p = identity(n);
    p.set_letter(qubit, c);
    return p;
  }

  /**
   * Parses a Pauli literal: optional prefix "+", "-", "i", "+i", "-i"
   * followed by letters over {I,X,Y,Z}, e.g. "-ZIZ", "iXY".
   */
  static PauliOperator parse(const std::string& text) {
    size_t pos = 0;
    uint8_t phase = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      if (text[pos] == '-') phase = 2;
      ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
      phase = (phase + 1) & 3;
      ++pos;
    }
    if (pos == text.size())
      throw InvalidArgument("Pauli literal has no letters: '" + text + "'");
    PauliOperator p(static_cast<int>(text.size() - pos), 0, 0, phase);
    for (int q = 0; pos < text.size(); ++pos, ++q) p.set_letter(q, text[pos]);
    return p;
  }

  int num_qubits() const { return n_; }
  uint64_t x_bits() const { return x_; }
  uint64_t z_bits() const { return z_; }
  uint8_t phase_exp() const { return phase_; }

  bool x_bit(int q) const { return (x_ >> q) & 1u; }
  bool z_bit(int q) const { return (z_ >> q) & 1u; }

  char letter(int q) const {
    static const char table[4] = {'I', 'X', 'Z', 'Y'};
    return table[(x_bit(q) ? 1 : 0) | (z_bit(q) ? 2 : 0)];
  }

  void set_letter(int q, char c) {
    if (q < 0 || q >= n_) throw InvalidArgument("qubit index out of range");
    uint64_t bit = uint64_t{1} << q;
    x_ &= ~bit;
    z_ &= ~bit;
    switch (c) {
      case 'I': break;
      case 'X': x_ |= bit; break;
      case 'Z': z_ |= bit; break;
      case 'Y': x_ |= bit; z_ |= bit; break;
      default:
        throw InvalidArgument(std::string("invalid Pauli letter '") + c + "'");
    }
  }

  /** Number of non-identity sites. */
  int weight() const { return std::popcount(x_ | z_); }

  uint64_t support_mask() const { return x_ | z_; }

  bool is_identity_letters() const { return (x_ | z_) == 0; }
  bool is_identity() const { return is_identity_letters() && phase_ == 0; }
  bool is_hermitian() const { return phase_ == 0 || phase_ == 2; }
  double sign() const { return phase_ == 0 ? 1.0 : -1.0; }

  PauliOperator with_phase_exp(uint8_t p) const {
    return PauliOperator(n_, x_, z_, p);
  }

  friend bool operator==(const PauliOperator&, const PauliOperator&) = default;

  /** Exact group product; phases tracked symbolically. */
  friend PauliOperator operator*(const PauliOperator& a,
                                 const PauliOperator& b) {
    if (a.n_ != b.n_)
      throw InvalidArgument("Pauli product of operators on different sizes");
    // Work in the XZ-ordered convention (dense = i^h * X^x Z^z), where
    // commuting Z^z1 past X^x2 costs (-1)^{|z1 & x2|}.
    int h = a.zx_phase_exp() + b.zx_phase_exp() +
            2 * (std::popcount(a.z_ & b.x_) & 1);
    uint64_t x = a.x_ ^ b.x_;
    uint64_t z = a.z_ ^ b.z_;
    int y_count = std::popcount(x & z);
    return PauliOperator(a.n_, x, z, static_cast<uint8_t>((h - y_count) & 3));
  }

  /** True iff dense(a) dense(b) == dense(b) dense(a). */
  friend bool commutes(const PauliOperator& a, const PauliOperator& b) {
    if (a.n_ != b.n_)
      throw InvalidArgument("commutation test on mismatched sizes");
    int anti = (std::popcount(a.x_ & b.z_) + std::popcount(a.z_ & b.x_)) & 1;
    return anti == 0;
  }

  std::string str() const {
    static const char* prefix[4] = {"+", "i", "-", "-i"};
    std::string out = prefix[phase_];
    for (int q = 0; q < n_; ++q) out += letter(q);
    return out;
  }

  /** Dense 2^n x 2^n realization; subject to the dense capacity limit. */
  Matrix dense() const {
    check_dense_capacity(n_);
    static const Complex kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    Eigen::Index dim = Eigen::Index{1} << n_;
    Matrix out = Matrix::Zero(dim, dim);
    // Every Pauli has one nonzero per row: column = row ^ x-pattern, value a
    // power of i from the Z/Y letters.
    uint64_t colflip = 0;
    for (int q = 0; q < n_; ++q)
      if (x_bit(q)) colflip |= uint64_t{1} << (n_ - 1 - q);
    for (Eigen::Index row = 0; row < dim; ++row) {
      int exp = phase_;
      for (int q = 0; q < n_; ++q) {
        bool bit = (row >> (n_ - 1 - q)) & 1;  // value of qubit q in this row
        char c = letter(q);
        // Column index has qubit q flipped when the letter is X or Y; the
        // matrix element is sigma[row_bit][col_bit].
        if (c == 'Z' && bit) exp += 2;
        if (c == 'Y') exp += bit ? 1 : 3;  // Y = [[0,-i],[i,0]]
      }
      out(row, static_cast<Eigen::Index>(row ^ colflip)) = kPhases[exp & 3];
    }
    return out;
  }

 private:
  // Exponent of i in the XZ-ordered convention dense = i^h X^x Z^z.
  int zx_phase_exp() const { return (phase_ + std::popcount(x_ & z_)) & 3; }

  int n_ = 0;
  uint64_t x_ = 0;
  uint64_t z_ = 0;
  uint8_t phase_ = 0;
};

enum class CliffordGate { H, S, Sdg, X, Y, Z, CNOT };

inline const char* name(CliffordGate g) {
  switch (g) {
    case CliffordGate::H: return "H";
    case CliffordGate::S: return "S";
    case CliffordGate::Sdg: return "Sdg";
    case CliffordGate::X: return "X";
    case CliffordGate::Y: return "Y";
    case CliffordGate::Z: return "Z";
    case CliffordGate::CNOT: return "CNOT";
  }
  return "?";
}

inline CliffordGate inverse(CliffordGate g) {
  switch (g) {
    case CliffordGate::S: return CliffordGate::Sdg;
    case CliffordGate::Sdg: return CliffordGate::S;
    default: return g;  // H, X, Y, Z, CNOT are involutions
  }
}

/** Dense unitary of a Clifford gate (2x2, or 4x4 for CNOT as control(x)target). */
inline Matrix clifford_matrix(CliffordGate g) {
  Matrix m;
  switch (g) {
    case CliffordGate::H:
      m = Matrix(2, 2);
      m << 1, 1, 1, -1;
      return m / std::sqrt(2.0);
    case CliffordGate::S:
      m = Matrix(2, 2);
      m << 1, 0, 0, kI;
      return m;
    case CliffordGate::Sdg:
      m = Matrix(2, 2);
      m << 1, 0, 0, -kI;
      return m;
    case CliffordGate::X: return PauliOperator::parse("X").dense();
    case CliffordGate::Y: return PauliOperator::parse("Y").dense();
    case CliffordGate::Z: return PauliOperator::parse("Z").dense();
    case CliffordGate::CNOT:
      m = Matrix::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
      return m;
  }
  throw InvalidArgument("unknown gate");
}

namespace detail {

// Images of the single-site generators X_t and Z_t under conjugation, as
// (letter on t [and letter on second target for CNOT], extra sign).
struct GenImage {
  char on_a;
  char on_b;  // only used by CNOT
  int sign;   // 0 -> +1, 2 -> -1 phase exponent
};

inline GenImage image_of_x(CliffordGate g) {
  switch (g) {
    case CliffordGate::H: return {'Z', 'I', 0};
    case CliffordGate::S: return {'Y', 'I', 0};
    case CliffordGate::Sdg: return {'Y', 'I', 2};
    case CliffordGate::X: return {'X', 'I', 0};
    case CliffordGate::Y: return {'X', 'I', 2};
    case CliffordGate::Z: return {'X', 'I', 2};
    case CliffordGate::CNOT: return {'X', 'X', 0};  // X_c -> X_c X_t
  }
  throw InvalidArgument("unknown gate");
}

inline GenImage image_of_z(CliffordGate g) {
  switch (g) {
    case CliffordGate::H: return {'X', 'I', 0};
    case CliffordGate::S: return {'Z', 'I', 0};
    case CliffordGate::Sdg: return {'Z', 'I', 0};
    case CliffordGate::X: return {'Z', 'I', 2};
    case CliffordGate::Y: return {'Z', 'I', 2};
    case CliffordGate::Z: return {'Z', 'I', 0};
    case CliffordGate::CNOT: return {'Z', 'I', 0};  // Z_c -> Z_c
  }
  throw InvalidArgument("unknown gate");
}

// CNOT images for the target qubit: X_t -> X_t, Z_t -> Z_c Z_t.
inline GenImage image_of_x_target() { return {'I', 'X', 0}; }
inline GenImage image_of_z_target() { return {'Z', 'Z', 0}; }

}  // namespace detail

/**
 * U P U^dag for a Clifford gate, exact phases included. `targets` is one
 * qubit index, or {control, target} for CNOT.
 */
inline PauliOperator clifford_conjugate(const PauliOperator& p, CliffordGate g,
                                        const std::vector<int>& targets) {
  int n = p.num_qubits();
  size_t want = g == CliffordGate::CNOT ? 2 : 1;
  if (targets.size() != want)
    throw InvalidArgument("wrong number of targets for gate");
  for (int t : targets)
    if (t < 0 || t >= n) throw InvalidArgument("gate target out of range");
  if (want == 2 && targets[0] == targets[1])
    throw InvalidArgument("CNOT control equals target");

  auto place = [&](const detail::GenImage& img, int a, int b) {
    PauliOperator out(n, 0, 0, static_cast<uint8_t>(img.sign));
    out.set_letter(a, img.on_a);
    if (img.on_b != 'I') out.set_letter(b, img.on_b);
    return out;
  };
  int a = targets[0];
  int b = want == 2 ? targets[1] : targets[0];

  // Decompose P = i^h * prod_j X_j^{x_j} * prod_j Z_j^{z_j} and conjugate
  // factor by factor; pauli multiplication keeps all phases exact.
  int h = (p.phase_exp() + std::popcount(p.x_bits() & p.z_bits())) & 3;
  PauliOperator result = PauliOperator::identity(n).with_phase_exp(
      static_cast<uint8_t>(h));
  for (int pass = 0; pass < 2; ++pass) {
    for (int q = 0; q < n; ++q) {
      bool hit = pass == 0 ? p.x_bit(q) : p.z_bit(q);
      if (!hit) continue;
      PauliOperator factor(n, 0, 0, 0);
      if (q == a) {
        factor = place(pass == 0 ? detail::image_of_x(g)
                                 : detail::image_of_z(g),
                       a, b);
      } else if (want == 2 && q == b) {
        factor = place(pass == 0 ? detail::image_of_x_target()
                                 : detail::image_of_z_target(),
                       a, b);
      } else {
        factor = PauliOperator::single(n, q, pass == 0 ? 'X' : 'Z');
      }
      result = result * factor;
    }
  }
  return result;
}

/**
 * A real linear combination of phase-free Pauli terms, used for Hamiltonian
 * endpoints such as cos(theta) X + sin(theta) Y. Terms are kept with +1
 * operator phase; Hermitian signs live in the coefficients.
 */
struct PauliSum {
  std::vector<std::pair<double, PauliOperator>> terms;

  PauliSum() = default;

  explicit PauliSum(const PauliOperator& p) { add(1.0, p); }

  PauliSum(double c, const PauliOperator& p) { add(c, p); }

  void add(double c, const PauliOperator& p) {
    if (!p.is_hermitian())
      throw InvalidArgument("PauliSum terms must be Hermitian");
    terms.emplace_back(c * p.sign(), p.with_phase_exp(0));
  }

  int num_qubits() const {
    return terms.empty() ? 0 : terms.front().second.num_qubits();
  }

  uint64_t support_mask() const {
    uint64_t m = 0;
    for (const auto& [c, p] : terms) m |= p.support_mask();
    return m;
  }

  /** Largest single-term support; the quantity a weight audit cares about. */
  int max_term_weight() const {
    int w = 0;
    for (const auto& [c, p] : terms) w = std::max(w, p.weight());
    return w;
  }

  PauliSum negated() const {
    PauliSum out = *this;
    for (auto& [c, p] : out.terms) c = -c;
    return out;
  }

  bool proportional_to(const PauliSum& other) const;

  Matrix dense() const {
    if (terms.empty()) throw InvalidArgument("dense() of empty PauliSum");
    Matrix out = terms.front().first * terms.front().second.dense();
    for (size_t k = 1; k < terms.size(); ++k)
      out += terms[k].first * terms[k].second.dense();
    return out;
  }

  /**
   * Dense realization on the sub-register listed in `positions` (ascending
   * qubit indices); every term's support must lie inside it.
   */
  Matrix dense_on(const std::vector<int>& positions) const;
};

inline Matrix PauliSum::dense_on(const std::vector<int>& positions) const {
  int m = static_cast<int>(positions.size());
  Matrix out = Matrix::Zero(Eigen::Index{1} << m, Eigen::Index{1} << m);
  for (const auto& [c, p] : terms) {
    PauliOperator small(m, 0, 0, p.phase_exp());
    for (int j = 0; j < m; ++j) small.set_letter(j, p.letter(positions[j]));
    uint64_t mask = 0;
    for (int j : positions) mask |= uint64_t{1} << j;
    if (p.support_mask() & ~mask)
      throw InvalidArgument("PauliSum term has support outside the register");
    out += c * small.dense();
  }
  return out;
}

inline bool PauliSum::proportional_to(const PauliSum& other) const {
  if (terms.size() != 1 || other.terms.size() != 1) {
    // Fall back to a dense comparison on the joint support.
    std::vector<int> pos;
    uint64_t mask = support_mask() | other.support_mask();
    for (int q = 0; q < num_qubits(); ++q)
      if ((mask >> q) & 1) pos.push_back(q);
    if (pos.empty()) pos.push_back(0);
    Matrix a = dense_on(pos), b = other.dense_on(pos);
    double na = a.norm(), nb = b.norm();
    if (na < 1e-14 || nb < 1e-14) return false;
    return (a / na - b / nb).cwiseAbs().maxCoeff() < 1e-12 ||
           (a / na + b / nb).cwiseAbs().maxCoeff() < 1e-12;
  }
  return terms[0].second == other.terms[0].second;
}

}  // namespace holonome
