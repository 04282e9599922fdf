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

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "holonome/pauli.hpp"

namespace holonome {

namespace gf2 {

/** A Pauli's symplectic bits, as one 128-bit row (x part | z part). */
struct Row {
  uint64_t x = 0, z = 0;
  friend Row operator^(Row a, Row b) { return {a.x ^ b.x, a.z ^ b.z}; }
  friend bool operator==(Row, Row) = default;
  bool zero() const { return x == 0 && z == 0; }
};

inline Row row_of(const PauliOperator& p) { return {p.x_bits(), p.z_bits()}; }

/**
 * Echelon basis over GF(2) with expression tracking: each stored row knows
 * which input generators produced it, so membership tests also return the
 * combination.
 */
class Span {
 public:
  explicit Span(const std::vector<PauliOperator>& gens) {
    for (size_t i = 0; i < gens.size(); ++i) add(row_of(gens[i]), i);
  }

  int rank() const { return static_cast<int>(rows_.size()); }

  /** Reduces r against the basis; returns residual and combination. */
  std::pair<Row, uint64_t> reduce(Row r) const {
    uint64_t combo = 0;
    for (size_t k = 0; k < rows_.size(); ++k) {
      if (leading_bit(r) == leading_bit(rows_[k]) && !r.zero()) {
        r = r ^ rows_[k];
        combo ^= combos_[k];
      }
    }
    return {r, combo};
  }

  bool contains(const PauliOperator& p) const {
    return reduce(row_of(p)).first.zero();
  }

  /** Generator index set (bitmask) expressing p, if p is in the span. */
  std::optional<uint64_t> combination_for(const PauliOperator& p) const {
    auto [res, combo] = reduce(row_of(p));
    if (!res.zero()) return std::nullopt;
    return combo;
  }

 private:
  static int leading_bit(Row r) {
    if (r.x) return std::countr_zero(r.x);
    if (r.z) return 64 + std::countr_zero(r.z);
    return 128;
  }

  void add(Row r, size_t gen_index) {
    uint64_t combo = uint64_t{1} << gen_index;
    for (size_t k = 0; k < rows_.size(); ++k) {
      if (leading_bit(r) == leading_bit(rows_[k]) && !r.zero()) {
        r = r ^ rows_[k];
        combo ^= combos_[k];
      }
    }
    if (r.zero()) return;
    rows_.push_back(r);
    combos_.push_back(combo);
    // Keep rows ordered by leading bit so reduce() is a single sweep.
    for (size_t k = rows_.size(); k-- > 1;) {
      if (leading_bit(rows_[k]) < leading_bit(rows_[k - 1])) {
        std::swap(rows_[k], rows_[k - 1]);
        std::swap(combos_[k], combos_[k - 1]);
      }
    }
  }

  std::vector<Row> rows_;
  std::vector<uint64_t> combos_;
};

}  // namespace gf2

/** Multiplies out a generator subset chosen by bitmask. */
inline PauliOperator product_of(const std::vector<PauliOperator>& gens,
                                uint64_t mask, int n) {
  PauliOperator out = PauliOperator::identity(n);
  for (size_t i = 0; i < gens.size(); ++i)
    if ((mask >> i) & 1) out = out * gens[i];
  return out;
}

/**
 * A subsystem stabilizer code. `gauge_gens` generate the full gauge group
 * (stabilizer included); for subspace codes it may be empty. Logical
 * operators are the bare ones (they commute with the whole gauge group).
 */
struct CodeSpec {
  int n = 0;  // physical qubits
  int k = 0;  // logical qubits
  int r = 0;  // gauge qubits
  std::vector<PauliOperator> stabilizer_gens;
  std::vector<PauliOperator> gauge_gens;
  std::vector<PauliOperator> logical_x, logical_z;
  // Optional grid layout for lattice codes: layout[q] = {row, col}.
  std::vector<std::pair<int, int>> layout;

  std::vector<PauliOperator> stabilizer_and_gauge() const {
    std::vector<PauliOperator> all = stabilizer_gens;
    all.insert(all.end(), gauge_gens.begin(), gauge_gens.end());
    return all;
  }

  int qubit_at(int row, int col) const {
    for (size_t q = 0; q < layout.size(); ++q)
      if (layout[q] == std::make_pair(row, col)) return static_cast<int>(q);
    throw InvalidArgument("no qubit at the requested grid position");
  }

  void validate() const;
};

inline void CodeSpec::validate() const {
  auto check_commutes = [&](const std::vector<PauliOperator>& a,
                            const std::vector<PauliOperator>& b,
                            const char* what) {
    for (const auto& p : a)
      for (const auto& q : b)
        if (!commutes(p, q))
          throw InvalidArgument(std::string("code invariant violated: ") +
                                what);
  };
  check_commutes(stabilizer_gens, stabilizer_gens,
                 "stabilizer generators must pairwise commute");
  check_commutes(stabilizer_gens, gauge_gens,
                 "stabilizer must commute with the gauge group");
  check_commutes(stabilizer_gens, logical_x,
                 "stabilizer must commute with logicals");
  check_commutes(stabilizer_gens, logical_z,
                 "stabilizer must commute with logicals");
  check_commutes(gauge_gens, logical_x, "gauge must commute with logicals");
  check_commutes(gauge_gens, logical_z, "gauge must commute with logicals");

  if (static_cast<int>(logical_x.size()) != k ||
      static_cast<int>(logical_z.size()) != k)
    throw InvalidArgument("logical operator count must equal k");
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      bool same = i == j;
      if (commutes(logical_x[i], logical_z[j]) == same)
        throw InvalidArgument(
            "logical X/Z pairing must anticommute exactly on matching index");
      if (i < j && (!commutes(logical_x[i], logical_x[j]) ||
                    !commutes(logical_z[i], logical_z[j])))
        throw InvalidArgument("logical operators of distinct qubits clash");
    }
  }

  gf2::Span stab_span(stabilizer_gens);
  if (stab_span.rank() != n - r - k)
    throw InvalidArgument("stabilizer generator rank must be n - r - k");
  if (gauge_gens.empty() && r != 0)
    throw InvalidArgument("r > 0 requires gauge generators");
  gf2::Span full_span(stabilizer_and_gauge());
  if (!gauge_gens.empty() && full_span.rank() != (n - r - k) + 2 * r)
    throw InvalidArgument("gauge group rank must be (n - r - k) + 2r");

  // -I must not be generated: every dependent combination of the listed
  // generators has to multiply out to exactly +I.
  std::vector<PauliOperator> all = stabilizer_and_gauge();
  std::vector<PauliOperator> kept;
  for (const auto& g : all) {
    if (!g.is_hermitian())
      throw InvalidArgument("generators must be Hermitian");
    gf2::Span trial(kept);
    if (auto combo = trial.combination_for(g)) {
      PauliOperator prod = product_of(kept, *combo, n);
      if (!(prod == g))
        throw InvalidArgument("-I (or a phase) is generated by the group");
    } else {
      kept.push_back(g);
    }
  }
}

/** The 9-qubit Bacon-Shor code on a 3x3 grid; qubit index = 3*row + col. */
inline CodeSpec build_bacon_shor() {
  CodeSpec code;
  code.n = 9;
  code.k = 1;
  code.r = 4;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) code.layout.push_back({row, col});

  auto at = [](int row, int col) { return 3 * row + col; };
  // Row-adjacent ZZ pairs and column-adjacent XX pairs cover every qubit
  // with weight-2 elements.
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 2; ++col) {
      PauliOperator g = PauliOperator::identity(9);
      g.set_letter(at(row, col), 'Z');
      g.set_letter(at(row, col + 1), 'Z');
      code.gauge_gens.push_back(g);
    }
  for (int col = 0; col < 3; ++col)
    for (int row = 0; row < 2; ++row) {
      PauliOperator g = PauliOperator::identity(9);
      g.set_letter(at(row, col), 'X');
      g.set_letter(at(row + 1, col), 'X');
      code.gauge_gens.push_back(g);
    }

  // Stabilizer generators are derived as products of gauge generators:
  // X on two adjacent full rows, Z on two adjacent full columns.
  for (int row = 0; row < 2; ++row) {
    PauliOperator s = PauliOperator::identity(9);
    for (int col = 0; col < 3; ++col) {
      s = s * PauliOperator::single(9, at(row, col), 'X');
      s = s * PauliOperator::single(9, at(row + 1, col), 'X');
    }
    code.stabilizer_gens.push_back(s);
  }
  for (int col = 0; col < 2; ++col) {
    PauliOperator s = PauliOperator::identity(9);
    for (int row = 0; row < 3; ++row) {
      s = s * PauliOperator::single(9, at(row, col), 'Z');
      s = s * PauliOperator::single(9, at(row, col + 1), 'Z');
    }
    code.stabilizer_gens.push_back(s);
  }

  // Bare logicals: X along the first row, Z along the first column.
  PauliOperator lx = PauliOperator::identity(9), lz = PauliOperator::identity(9);
  for (int col = 0; col < 3; ++col) lx.set_letter(at(0, col), 'X');
  for (int row = 0; row < 3; ++row) lz.set_letter(at(row, 0), 'Z');
  code.logical_x.push_back(lx);
  code.logical_z.push_back(lz);

  code.validate();
  return code;
}

/**
 * Error-correction condition: every pair product either anticommutes with
 * some stabilizer generator or lies in the stabilizer-gauge span. The
 * identity is implicitly part of the error set, so single errors are tested
 * against the condition as well.
 */
inline bool check_correctable(const CodeSpec& code,
                              const std::vector<PauliOperator>& errors) {
  std::vector<PauliOperator> set = errors;
  set.push_back(PauliOperator::identity(code.n));
  gf2::Span group(code.stabilizer_and_gauge());
  for (size_t i = 0; i < set.size(); ++i) {
    for (size_t j = i + 1; j < set.size(); ++j) {
      PauliOperator prod = set[i] * set[j];
      bool detected = false;
      for (const auto& s : code.stabilizer_gens)
        if (!commutes(prod, s)) {
          detected = true;
          break;
        }
      if (!detected && !group.contains(prod)) return false;
    }
  }
  return true;
}

/**
 * A conditional group element |0><0|_c (x) branch0 + |1><1|_c (x) branch1,
 * produced by tracking a group through a Clifford conditioned on a control
 * qubit. It is no longer a Pauli operator and is stored symbolically.
 */
struct ConditionalElement {
  int control = 0;
  PauliOperator branch0, branch1;
};

/**
 * The current stabilizer-plus-gauge generating set of one or more blocks,
 * conjugated along with the gates applied so far. Values are immutable;
 * tracking returns a new group.
 */
struct TrackedGroup {
  int n = 0;
  std::vector<PauliOperator> elements;
  std::vector<int> block_map;  // qubit -> block id
  std::vector<ConditionalElement> conditional_elements;

  static TrackedGroup from_code(const CodeSpec& code, int block_id = 0) {
    TrackedGroup g;
    g.n = code.n;
    g.elements = code.gauge_gens.empty() ? code.stabilizer_gens
                                         : code.stabilizer_and_gauge();
    g.block_map.assign(code.n, block_id);
    return g;
  }

  /** Disjoint union of two groups; `other`'s qubits are appended. */
  TrackedGroup tensor(const TrackedGroup& other) const {
    TrackedGroup out;
    out.n = n + other.n;
    int next_block = block_map.empty()
                         ? 0
                         : 1 + *std::max_element(block_map.begin(),
                                                 block_map.end());
    auto widen = [&](const PauliOperator& p, int offset) {
      PauliOperator w = PauliOperator::identity(out.n)
                            .with_phase_exp(p.phase_exp());
      for (int q = 0; q < p.num_qubits(); ++q)
        w.set_letter(q + offset, p.letter(q));
      return w;
    };
    for (const auto& e : elements) out.elements.push_back(widen(e, 0));
    for (const auto& e : other.elements) out.elements.push_back(widen(e, n));
    out.block_map = block_map;
    for (int b : other.block_map) out.block_map.push_back(b + next_block);
    return out;
  }

  void validate() const {
    for (const auto& e : elements) {
      if (e.num_qubits() != n)
        throw InvalidArgument("tracked element has wrong register size");
      for (int q = 0; q < n; ++q)
        if (e.letter(q) != 'I' && block_map[q] < 0)
          throw InvalidArgument("tracked element leaves the declared blocks");
    }
  }
};

/** Conjugates every tracked element by a Clifford gate. */
inline TrackedGroup track(const TrackedGroup& group, CliffordGate gate,
                          const std::vector<int>& targets) {
  TrackedGroup out = group;
  for (auto& e : out.elements) e = clifford_conjugate(e, gate, targets);
  for (auto& c : out.conditional_elements) {
    c.branch0 = clifford_conjugate(c.branch0, gate, targets);
    c.branch1 = clifford_conjugate(c.branch1, gate, targets);
  }
  return out;
}

/**
 * Tracks a Clifford applied conditionally on `control`: every element
 * I^c (x) G splits into |0><0| (x) G + |1><1| (x) O G O^dag, and a
 * Z^c (x) G element likewise with the branch signs absorbing the Z.
 * Elements with X or Y on the control are not block-diagonal in the
 * control basis and cannot be tracked in this form.
 */
inline TrackedGroup track_conditional(const TrackedGroup& group,
                                      CliffordGate gate,
                                      const std::vector<int>& targets,
                                      int control) {
  TrackedGroup out = group;
  out.elements.clear();
  for (const auto& e : group.elements) {
    char c = e.letter(control);
    if (c == 'X' || c == 'Y')
      throw InvalidArgument(
          "conditional tracking requires elements diagonal on the control");
    PauliOperator base = e;
    if (c == 'Z') base.set_letter(control, 'I');
    PauliOperator b0 = base;
    PauliOperator b1 = clifford_conjugate(base, gate, targets);
    if (c == 'Z') b1 = b1.with_phase_exp((b1.phase_exp() + 2) & 3);
    if (b0 == b1) {
      out.elements.push_back(b0);  // branches merged: I^c (x) b0
    } else if (b1 == b0.with_phase_exp((b0.phase_exp() + 2) & 3)) {
      PauliOperator zc = b0;  // opposite branches: Z^c (x) b0
      zc.set_letter(control, 'Z');
      out.elements.push_back(zc);
    } else {
      out.conditional_elements.push_back({control, b0, b1});
    }
  }
  return out;
}

/**
 * Tracks a non-Clifford diagonal gate diag(1, e^{i a}) on `qubit`. Only
 * elements with I or Z there survive conjugation inside the Pauli group;
 * anything else throws.
 */
inline TrackedGroup track_diagonal(const TrackedGroup& group, int qubit) {
  for (const auto& e : group.elements) {
    char c = e.letter(qubit);
    if (c == 'X' || c == 'Y')
      throw InvalidArgument(
          "tracked element leaves the Pauli group under a diagonal "
          "non-Clifford gate");
  }
  return group;
}

struct StartingElementQuery {
  int qubit = 0;
  char desired = 'Z';  // one of I, X, Y, Z
  std::vector<int> trivial_on;  // qubits the element must not touch
  std::vector<std::pair<int, char>> extra_letters;  // further pinned factors
  int enumeration_cap_bits = 22;  // search-space guard
};

/**
 * Finds a group element whose factor on `qubit` is exactly `desired` (plus
 * any extra pinned letters) and which acts as the identity on every qubit in
 * `trivial_on`. Minimal weight wins; ties break on lexicographic qubit order
 * of the support, then on the letter string. The result is canonicalized to
 * its Hermitian +-1-phase representative.
 */
inline PauliOperator find_starting_element(const TrackedGroup& group,
                                           const StartingElementQuery& query) {
  const auto& gens = group.elements;
  int n = group.n;
  if (gens.size() > 63) throw SearchFailure("too many generators to search");
  if (query.qubit < 0 || query.qubit >= n)
    throw SearchFailure("target qubit out of range");

  // Constraints: fixed (x, z) bits at the pinned qubits and zeros on every
  // trivial_on qubit. Solve over GF(2), expressing constraint coordinates of
  // the generator combination.
  struct Coord {
    int qubit;
    bool is_x;
    bool value;
  };
  std::vector<std::pair<int, char>> pinned = query.extra_letters;
  pinned.push_back({query.qubit, query.desired});
  std::vector<Coord> coords;
  for (auto [q, letter] : pinned) {
    if (letter != 'I' && letter != 'X' && letter != 'Y' && letter != 'Z')
      throw SearchFailure("pinned factor must be one of I, X, Y, Z");
    bool want_x = letter == 'X' || letter == 'Y';
    bool want_z = letter == 'Z' || letter == 'Y';
    coords.push_back({q, true, want_x});
    coords.push_back({q, false, want_z});
  }
  for (int q : query.trivial_on) {
    bool is_pinned = false;
    for (auto [pq, letter] : pinned)
      if (pq == q) {
        if (letter != 'I')
          throw SearchFailure(
              "qubit is in trivial_on but a non-identity factor was "
              "requested");
        is_pinned = true;
      }
    if (is_pinned) continue;  // desired I already pins both bits to zero
    coords.push_back({q, true, false});
    coords.push_back({q, false, false});
  }

  size_t m = gens.size();
  // Row per constraint over the m generator coefficients, plus RHS.
  std::vector<uint64_t> rows(coords.size(), 0);
  std::vector<int> rhs(coords.size(), 0);
  for (size_t c = 0; c < coords.size(); ++c) {
    for (size_t g = 0; g < m; ++g) {
      bool bit = coords[c].is_x ? gens[g].x_bit(coords[c].qubit)
                                : gens[g].z_bit(coords[c].qubit);
      if (bit) rows[c] |= uint64_t{1} << g;
    }
    rhs[c] = coords[c].value ? 1 : 0;
  }

  // Gaussian elimination for a particular solution and the nullspace.
  std::vector<int> pivot_of_row;
  std::vector<uint64_t> eliminated = rows;
  std::vector<int> el_rhs = rhs;
  std::vector<bool> used(m, false);
  size_t rank = 0;
  for (size_t col = 0; col < m && rank < eliminated.size(); ++col) {
    size_t sel = rank;
    while (sel < eliminated.size() && !((eliminated[sel] >> col) & 1)) ++sel;
    if (sel == eliminated.size()) continue;
    std::swap(eliminated[rank], eliminated[sel]);
    std::swap(el_rhs[rank], el_rhs[sel]);
    for (size_t r2 = 0; r2 < eliminated.size(); ++r2) {
      if (r2 != rank && ((eliminated[r2] >> col) & 1)) {
        eliminated[r2] ^= eliminated[rank];
        el_rhs[r2] ^= el_rhs[rank];
      }
    }
    pivot_of_row.push_back(static_cast<int>(col));
    used[col] = true;
    ++rank;
  }
  for (size_t r2 = rank; r2 < eliminated.size(); ++r2)
    if (eliminated[r2] == 0 && el_rhs[r2] != 0)
      throw SearchFailure("no group element has the requested form");

  uint64_t particular = 0;
  for (size_t r2 = 0; r2 < rank; ++r2)
    if (el_rhs[r2]) particular |= uint64_t{1} << pivot_of_row[r2];

  std::vector<uint64_t> null_basis;
  for (size_t col = 0; col < m; ++col) {
    if (used[col]) continue;
    uint64_t v = uint64_t{1} << col;
    for (size_t r2 = 0; r2 < rank; ++r2)
      if ((eliminated[r2] >> col) & 1) v |= uint64_t{1} << pivot_of_row[r2];
    null_basis.push_back(v);
  }

  if (static_cast<int>(null_basis.size()) > query.enumeration_cap_bits)
    throw SearchFailure("starting-element search space too large");

  // Enumerate the solution coset (Gray-code walk over symplectic masks; the
  // winner's phase is computed once at the end) and keep the minimal-weight
  // nontrivial element; ties break on lexicographic qubit order of the
  // support, then on the letter string.
  auto better = [](const PauliOperator& a, const PauliOperator& b) {
    if (a.weight() != b.weight()) return a.weight() < b.weight();
    for (int q = 0; q < a.num_qubits(); ++q) {
      bool sa = a.letter(q) != 'I', sb = b.letter(q) != 'I';
      if (sa != sb) return sa;  // support on an earlier qubit wins
    }
    for (int q = 0; q < a.num_qubits(); ++q)
      if (a.letter(q) != b.letter(q)) return a.letter(q) < b.letter(q);
    return false;
  };
  // Symplectic rows of the particular solution and nullspace directions.
  auto rows_of_mask = [&](uint64_t mask) {
    gf2::Row r;
    for (size_t g = 0; g < m; ++g)
      if ((mask >> g) & 1) r = r ^ gf2::row_of(gens[g]);
    return r;
  };
  std::vector<gf2::Row> null_rows;
  for (uint64_t v : null_basis) null_rows.push_back(rows_of_mask(v));
  gf2::Row cur = rows_of_mask(particular);
  uint64_t cur_mask = particular;

  std::optional<PauliOperator> best;
  std::optional<uint64_t> best_mask;
  uint64_t count = uint64_t{1} << null_basis.size();
  for (uint64_t it = 0;; ++it) {
    if (cur.x != 0 || cur.z != 0) {
      PauliOperator cand(n, cur.x, cur.z, 0);
      if (!best || better(cand, *best)) {
        best = cand;
        best_mask = cur_mask;
      }
    }
    if (it + 1 >= count) break;
    int flip = std::countr_zero(~it);  // Gray-code transition
    cur = cur ^ null_rows[flip];
    cur_mask ^= null_basis[flip];
  }
  if (!best) throw SearchFailure("no nontrivial group element matches");
  PauliOperator exact = product_of(gens, *best_mask, n);
  // Canonical Hermitian representative. A +/-i phase can only arise when the
  // group contains -I, in which case all four phases are group members.
  return exact.with_phase_exp(exact.phase_exp() == 2 ? 2 : 0);
}

}  // namespace holonome
