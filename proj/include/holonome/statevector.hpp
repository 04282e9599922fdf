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

#include <vector>

#include "holonome/pauli.hpp"

namespace holonome {

/**
 * State vectors are indexed with qubit 0 as the most significant bit, the
 * same convention as PauliOperator::dense().
 */
inline Vector basis_state(int n, uint64_t bits_msb_first) {
  check_state_capacity(n);
  Vector v = Vector::Zero(Eigen::Index{1} << n);
  v(static_cast<Eigen::Index>(bits_msb_first)) = 1.0;
  return v;
}

/** Applies an operator given on `support` (ascending qubits) to the state. */
inline void apply_on_support(Vector& state, const Matrix& op,
                             const std::vector<int>& support, int n) {
  int m = static_cast<int>(support.size());
  if (op.rows() != (Eigen::Index{1} << m))
    throw InvalidArgument("operator size does not match its support");
  // Bit position (from LSB) of each support qubit in the global index.
  std::vector<int> shifts(m);
  for (int j = 0; j < m; ++j) shifts[j] = n - 1 - support[j];
  uint64_t support_mask = 0;
  for (int s : shifts) support_mask |= uint64_t{1} << s;

  Eigen::Index dim = Eigen::Index{1} << n;
  Vector gathered(Eigen::Index{1} << m);
  for (uint64_t base = 0; base < static_cast<uint64_t>(dim); ++base) {
    if (base & support_mask) continue;  // enumerate complement patterns only
    for (uint64_t sub = 0; sub < (uint64_t{1} << m); ++sub) {
      uint64_t idx = base;
      for (int j = 0; j < m; ++j)
        if ((sub >> (m - 1 - j)) & 1) idx |= uint64_t{1} << shifts[j];
      gathered(static_cast<Eigen::Index>(sub)) =
          state(static_cast<Eigen::Index>(idx));
    }
    Vector out = op * gathered;
    for (uint64_t sub = 0; sub < (uint64_t{1} << m); ++sub) {
      uint64_t idx = base;
      for (int j = 0; j < m; ++j)
        if ((sub >> (m - 1 - j)) & 1) idx |= uint64_t{1} << shifts[j];
      state(static_cast<Eigen::Index>(idx)) =
          out(static_cast<Eigen::Index>(sub));
    }
  }
}

/** Applies a phased Pauli to the state in place. */
inline void apply_pauli(Vector& state, const PauliOperator& p) {
  int n = p.num_qubits();
  static const Complex kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  uint64_t flip = 0;
  for (int q = 0; q < n; ++q)
    if (p.x_bit(q)) flip |= uint64_t{1} << (n - 1 - q);
  Vector out(state.size());
  for (uint64_t idx = 0; idx < static_cast<uint64_t>(state.size()); ++idx) {
    int exp = p.phase_exp();
    for (int q = 0; q < n; ++q) {
      bool bit = (idx >> (n - 1 - q)) & 1;
      char c = p.letter(q);
      if (c == 'Z' && bit) exp += 2;
      if (c == 'Y') exp += bit ? 1 : 3;
    }
    out(static_cast<Eigen::Index>(idx ^ flip)) =
        kPhases[exp & 3] * state(static_cast<Eigen::Index>(idx));
  }
  state = out;
}

/** Expands an operator on `support` to the full 2^n register. */
inline Matrix dense_embed(const Matrix& op, const std::vector<int>& support,
                          int n) {
  check_dense_capacity(n);
  Eigen::Index dim = Eigen::Index{1} << n;
  Matrix out = Matrix::Zero(dim, dim);
  int m = static_cast<int>(support.size());
  std::vector<int> shifts(m);
  for (int j = 0; j < m; ++j) shifts[j] = n - 1 - support[j];
  uint64_t support_mask = 0;
  for (int s : shifts) support_mask |= uint64_t{1} << s;
  auto sub_index = [&](uint64_t idx) {
    uint64_t sub = 0;
    for (int j = 0; j < m; ++j)
      if ((idx >> shifts[j]) & 1) sub |= uint64_t{1} << (m - 1 - j);
    return sub;
  };
  for (uint64_t row = 0; row < static_cast<uint64_t>(dim); ++row) {
    for (uint64_t col = 0; col < static_cast<uint64_t>(dim); ++col) {
      if ((row & ~support_mask) != (col & ~support_mask)) continue;
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          op(static_cast<Eigen::Index>(sub_index(row)),
             static_cast<Eigen::Index>(sub_index(col)));
    }
  }
  return out;
}

/** <state| P |state> for a Hermitian Pauli. */
inline double pauli_expectation(const Vector& state, const PauliOperator& p) {
  Vector copy = state;
  apply_pauli(copy, p);
  Complex val = state.dot(copy);
  return val.real();
}

/** Projects onto the (+1 or -1) eigenspace of a Hermitian Pauli; returns
 * the (unnormalized) projected state. */
inline Vector project_pauli(const Vector& state, const PauliOperator& p,
                            int sign) {
  Vector copy = state;
  apply_pauli(copy, p);
  return 0.5 * (state + static_cast<double>(sign) * copy);
}

}  // namespace holonome
