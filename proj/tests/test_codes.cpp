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

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "holonome/codes.hpp"
#include "holonome/codes_json.hpp"
#include "test_helpers.hpp"

using namespace holonome;
using holonome::test::random_pauli;

namespace {

std::vector<PauliOperator> all_single_qubit_paulis(int n) {
  std::vector<PauliOperator> out;
  for (int q = 0; q < n; ++q)
    for (char c : {'X', 'Y', 'Z'})
      out.push_back(PauliOperator::single(n, q, c));
  return out;
}

// Brute-force Knill-Laflamme check for a subspace stabilizer code:
// P E_i E_j P must be proportional to P for every pair.
bool knill_laflamme_dense(const CodeSpec& code,
                          std::vector<PauliOperator> errors) {
  errors.push_back(PauliOperator::identity(code.n));
  Eigen::Index dim = Eigen::Index{1} << code.n;
  Matrix proj = Matrix::Identity(dim, dim);
  for (const auto& s : code.stabilizer_gens)
    proj = proj * (Matrix::Identity(dim, dim) + s.dense()) / 2.0;
  for (size_t i = 0; i < errors.size(); ++i) {
    for (size_t j = 0; j < errors.size(); ++j) {
      Matrix m = proj * errors[i].dense() * errors[j].dense() * proj;
      Complex c = m.trace() / proj.trace();
      if ((m - c * proj).cwiseAbs().maxCoeff() > 1e-9) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("bacon-shor construction") {
  CodeSpec code = build_bacon_shor();
  REQUIRE(code.gauge_gens.size() == 12);
  REQUIRE(code.stabilizer_gens.size() == 4);
  REQUIRE(code.n - code.r - code.k == 4);
  for (const auto& s : code.stabilizer_gens) REQUIRE(s.weight() == 6);
  for (const auto& g : code.gauge_gens) REQUIRE(g.weight() == 2);

  // Every qubit is covered by a weight-2 Z-type and a weight-2 X-type
  // gauge element.
  for (int q = 0; q < 9; ++q) {
    bool z_cover = false, x_cover = false;
    for (const auto& g : code.gauge_gens) {
      if (g.letter(q) == 'Z' && g.weight() == 2) z_cover = true;
      if (g.letter(q) == 'X' && g.weight() == 2) x_cover = true;
    }
    REQUIRE(z_cover);
    REQUIRE(x_cover);
  }

  // The three row-pair Z generators spanning two adjacent columns multiply
  // to a stabilizer generator.
  gf2::Span stab(code.stabilizer_gens);
  PauliOperator prod = PauliOperator::identity(9);
  for (int row = 0; row < 3; ++row)
    prod = prod * code.gauge_gens[2 * row];  // Z_{row,0} Z_{row,1}
  REQUIRE(stab.contains(prod));
  REQUIRE(prod == code.stabilizer_gens[2]);
}

TEST_CASE("bacon-shor corrects all single-qubit errors") {
  CodeSpec code = build_bacon_shor();
  REQUIRE(check_correctable(code, all_single_qubit_paulis(9)));

  // A row-adjacent XX pair seen as one two-qubit error is handled by the
  // pair test, and the column pair X_{0,0} X_{1,0} is a gauge element.
  PauliOperator row_xx = PauliOperator::identity(9);
  row_xx.set_letter(code.qubit_at(0, 0), 'X');
  row_xx.set_letter(code.qubit_at(0, 1), 'X');
  REQUIRE(check_correctable(code, {row_xx}));

  PauliOperator col_xx = PauliOperator::identity(9);
  col_xx.set_letter(code.qubit_at(0, 0), 'X');
  col_xx.set_letter(code.qubit_at(1, 0), 'X');
  gf2::Span group(code.stabilizer_and_gauge());
  REQUIRE(group.contains(col_xx));
  REQUIRE(check_correctable(code, {col_xx}));

  REQUIRE(check_correctable(code, {}));

  // A bare logical operator is not a correctable error.
  REQUIRE_FALSE(check_correctable(code, {code.logical_z[0]}));
}

TEST_CASE("correctability agrees with a dense Knill-Laflamme oracle") {
  // [[4,2,2]] detection code: stabilizers XXXX and ZZZZ.
  CodeSpec toy;
  toy.n = 4;
  toy.k = 2;
  toy.r = 0;
  toy.stabilizer_gens = {PauliOperator::parse("XXXX"),
                         PauliOperator::parse("ZZZZ")};
  toy.logical_x = {PauliOperator::parse("XXII"), PauliOperator::parse("XIXI")};
  toy.logical_z = {PauliOperator::parse("ZIZI"), PauliOperator::parse("ZZII")};
  toy.validate();

  std::vector<std::vector<PauliOperator>> sets = {
      {},
      {PauliOperator::parse("XIII")},
      {PauliOperator::parse("XIII"), PauliOperator::parse("IXII")},
      {PauliOperator::parse("ZIII"), PauliOperator::parse("XIII")},
      all_single_qubit_paulis(4),
  };
  for (const auto& errors : sets) {
    CAPTURE(errors.size());
    REQUIRE(check_correctable(toy, errors) ==
            knill_laflamme_dense(toy, errors));
  }
}

TEST_CASE("starting-element search") {
  CodeSpec code = build_bacon_shor();
  TrackedGroup group = TrackedGroup::from_code(code);

  SECTION("fresh bacon-shor, weight-2 Z element") {
    PauliOperator e =
        find_starting_element(group, {.qubit = code.qubit_at(0, 0),
                                      .desired = 'Z'});
    PauliOperator expect = PauliOperator::identity(9);
    expect.set_letter(code.qubit_at(0, 0), 'Z');
    expect.set_letter(code.qubit_at(0, 1), 'Z');
    REQUIRE(e == expect);
  }

  SECTION("cat-state group picks the first partner") {
    TrackedGroup cat;
    cat.n = 4;
    cat.block_map.assign(4, 0);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        PauliOperator zz = PauliOperator::identity(4);
        zz.set_letter(i, 'Z');
        zz.set_letter(j, 'Z');
        cat.elements.push_back(zz);
      }
    PauliOperator e = find_starting_element(cat, {.qubit = 0, .desired = 'Z'});
    REQUIRE(e == PauliOperator::parse("ZZII"));
  }

  SECTION("trivial_on constrains the support") {
    PauliOperator e = find_starting_element(
        group, {.qubit = code.qubit_at(0, 1),
                .desired = 'Z',
                .trivial_on = {code.qubit_at(0, 0)}});
    REQUIRE(e.letter(code.qubit_at(0, 1)) == 'Z');
    REQUIRE(e.letter(code.qubit_at(0, 0)) == 'I');
    REQUIRE(e.weight() == 2);
  }

  SECTION("single-qubit <Z> has no nontrivial identity-factor element") {
    TrackedGroup tiny;
    tiny.n = 1;
    tiny.block_map = {0};
    tiny.elements = {PauliOperator::parse("Z")};
    REQUIRE_THROWS_AS(
        find_starting_element(tiny, {.qubit = 0,
                                     .desired = 'I',
                                     .trivial_on = {0}}),
        SearchFailure);
  }

  SECTION("desired letter must exist") {
    TrackedGroup tiny;
    tiny.n = 2;
    tiny.block_map = {0, 0};
    tiny.elements = {PauliOperator::parse("ZZ")};
    REQUIRE_THROWS_AS(find_starting_element(tiny, {.qubit = 0, .desired = 'X'}),
                      SearchFailure);
  }
}

TEST_CASE("tracking conjugates the group") {
  CodeSpec code = build_bacon_shor();
  TrackedGroup target = TrackedGroup::from_code(code, 0);
  TrackedGroup control = TrackedGroup::from_code(code, 1);
  TrackedGroup both = target.tensor(control);
  REQUIRE(both.n == 18);
  both.validate();

  // CNOT from control-block qubit (0,0) to target-block qubit (0,0): the
  // target element Z_t(0,0) Z_t(0,1) gains a Z on the control qubit.
  int t00 = code.qubit_at(0, 0), t01 = code.qubit_at(0, 1);
  int c00 = 9 + code.qubit_at(0, 0);
  TrackedGroup after = track(both, CliffordGate::CNOT, {c00, t00});
  PauliOperator expect = PauliOperator::identity(18);
  expect.set_letter(t00, 'Z');
  expect.set_letter(t01, 'Z');
  expect.set_letter(c00, 'Z');
  bool found = false;
  for (const auto& e : after.elements) found = found || e == expect;
  REQUIRE(found);

  // H on <Z> gives <X>.
  TrackedGroup tiny;
  tiny.n = 1;
  tiny.block_map = {0};
  tiny.elements = {PauliOperator::parse("Z")};
  REQUIRE(track(tiny, CliffordGate::H, {0}).elements[0] ==
          PauliOperator::parse("X"));

  // A gate followed by its inverse restores the group, and tracking
  // preserves pairwise commutation, for random Clifford words.
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> pick_gate(0, 6);
  std::uniform_int_distribution<int> pick_qubit(0, 8);
  for (int trial = 0; trial < 50; ++trial) {
    TrackedGroup g = TrackedGroup::from_code(code);
    auto commutation_matrix = [&](const TrackedGroup& gr) {
      std::vector<bool> bits;
      for (size_t i = 0; i < gr.elements.size(); ++i)
        for (size_t j = i + 1; j < gr.elements.size(); ++j)
          bits.push_back(commutes(gr.elements[i], gr.elements[j]));
      return bits;
    };
    auto before_bits = commutation_matrix(g);
    std::vector<std::pair<CliffordGate, std::vector<int>>> word;
    for (int step = 0; step < 6; ++step) {
      CliffordGate gate = static_cast<CliffordGate>(pick_gate(rng) % 7);
      std::vector<int> targets{pick_qubit(rng)};
      if (gate == CliffordGate::CNOT) {
        int t = pick_qubit(rng);
        while (t == targets[0]) t = pick_qubit(rng);
        targets.push_back(t);
      }
      word.push_back({gate, targets});
      g = track(g, gate, targets);
    }
    REQUIRE(commutation_matrix(g) == before_bits);
    for (auto it = word.rbegin(); it != word.rend(); ++it)
      g = track(g, inverse(it->first), it->second);
    REQUIRE(g.elements == TrackedGroup::from_code(code).elements);
  }
}

TEST_CASE("conditional tracking produces projector-split elements") {
  TrackedGroup g;
  g.n = 3;  // control qubit 0, data qubits 1..2
  g.block_map = {0, 1, 1};
  g.elements = {PauliOperator::parse("IZZ"), PauliOperator::parse("IIZ")};
  TrackedGroup after = track_conditional(g, CliffordGate::H, {1}, 0);
  REQUIRE(after.conditional_elements.size() == 1);
  const auto& ce = after.conditional_elements[0];
  REQUIRE(ce.control == 0);
  REQUIRE(ce.branch0 == PauliOperator::parse("IZZ"));
  REQUIRE(ce.branch1 == PauliOperator::parse("IXZ"));
  // The element untouched by H on qubit 1 stays a plain Pauli.
  REQUIRE(after.elements == std::vector<PauliOperator>{
                                PauliOperator::parse("IIZ")});
}

TEST_CASE("code JSON round-trips") {
  CodeSpec code = build_bacon_shor();
  auto j = code_to_json(code);
  CodeSpec back = code_from_json(j);
  REQUIRE(back.n == code.n);
  REQUIRE(back.stabilizer_gens == code.stabilizer_gens);
  REQUIRE(back.gauge_gens == code.gauge_gens);
  REQUIRE(back.logical_x == code.logical_x);
  REQUIRE(back.layout == code.layout);
}

TEST_CASE("code invariant violations are rejected") {
  CodeSpec bad = build_bacon_shor();
  bad.stabilizer_gens[0] = bad.stabilizer_gens[0].with_phase_exp(2);
  bad.stabilizer_gens.push_back(bad.stabilizer_gens[0].with_phase_exp(0));
  REQUIRE_THROWS_AS(bad.validate(), InvalidArgument);

  CodeSpec wrong_rank = build_bacon_shor();
  wrong_rank.stabilizer_gens.pop_back();
  REQUIRE_THROWS_AS(wrong_rank.validate(), InvalidArgument);
}
