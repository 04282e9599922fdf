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

#include "holonome/pauli.hpp"
#include "test_helpers.hpp"

using namespace holonome;
using holonome::test::dense_oracle;
using holonome::test::max_abs_diff;
using holonome::test::random_pauli;

TEST_CASE("pauli literals round-trip") {
  for (const char* s : {"+XYZ", "-ZIZ", "iY", "-iXXII", "+I"}) {
    PauliOperator p = PauliOperator::parse(s);
    REQUIRE(p.str() == s);
    REQUIRE(PauliOperator::parse(p.str()) == p);
  }
  // Prefix-free and "+i" forms are accepted.
  REQUIRE(PauliOperator::parse("XZ") == PauliOperator::parse("+XZ"));
  REQUIRE(PauliOperator::parse("+iZ") == PauliOperator::parse("iZ"));
  REQUIRE_THROWS_AS(PauliOperator::parse("XQ"), InvalidArgument);
  REQUIRE_THROWS_AS(PauliOperator::parse("-"), InvalidArgument);

  std::mt19937 rng(7);
  for (int k = 0; k < 200; ++k) {
    PauliOperator p = random_pauli(rng, 1 + k % 8);
    REQUIRE(PauliOperator::parse(p.str()) == p);
  }
}

TEST_CASE("dense realizations of single letters") {
  Matrix z = PauliOperator::parse("Z").dense();
  REQUIRE(max_abs_diff(z, dense_oracle(PauliOperator::parse("Z"))) == 0.0);
  REQUIRE(z(0, 0) == Complex(1, 0));
  REQUIRE(z(1, 1) == Complex(-1, 0));

  Matrix y = PauliOperator::parse("Y").dense();
  REQUIRE(y(0, 1) == Complex(0, -1));
  REQUIRE(y(1, 0) == Complex(0, 1));

  Matrix mzz = PauliOperator::parse("-ZZ").dense();
  Vector d = mzz.diagonal();
  REQUIRE(d(0) == Complex(-1, 0));
  REQUIRE(d(1) == Complex(1, 0));
  REQUIRE(d(2) == Complex(1, 0));
  REQUIRE(d(3) == Complex(-1, 0));
}

TEST_CASE("dense matches tensor-product oracle on random operators") {
  std::mt19937 rng(11);
  for (int k = 0; k < 120; ++k) {
    PauliOperator p = random_pauli(rng, 1 + k % 4);
    Matrix d = p.dense();
    REQUIRE(max_abs_diff(d, dense_oracle(p)) < 1e-12);
    REQUIRE(unitarity_defect(d) < 1e-12);
    if (p.is_hermitian()) REQUIRE(max_abs_diff(d, d.adjoint()) < 1e-12);
  }
  REQUIRE_THROWS_AS(PauliOperator::identity(40).dense(), CapacityError);
}

TEST_CASE("product tracks phases exactly") {
  PauliOperator x = PauliOperator::parse("X");
  PauliOperator z = PauliOperator::parse("Z");
  REQUIRE((x * z).str() == "-iY");
  REQUIRE((z * x).str() == "iY");

  PauliOperator zz = PauliOperator::parse("ZZ");
  REQUIRE((zz * zz) == PauliOperator::identity(2));

  std::mt19937 rng(13);
  for (int k = 0; k < 400; ++k) {
    int n = 1 + k % 4;
    PauliOperator a = random_pauli(rng, n), b = random_pauli(rng, n);
    PauliOperator p = a * b;
    REQUIRE(max_abs_diff(p.dense(), dense_oracle(a) * dense_oracle(b)) <
            1e-12);
    // Identity absorbs.
    REQUIRE(PauliOperator::identity(n) * a == a);
  }
  REQUIRE_THROWS_AS(PauliOperator::parse("X") * PauliOperator::parse("XX"),
                    InvalidArgument);
}

TEST_CASE("commutation agrees with the dense commutator") {
  REQUIRE_FALSE(commutes(PauliOperator::parse("XI"),
                         PauliOperator::parse("ZI")));
  REQUIRE(commutes(PauliOperator::parse("XX"), PauliOperator::parse("ZZ")));

  std::mt19937 rng(17);
  for (int k = 0; k < 1000; ++k) {
    int n = 1 + k % 4;
    PauliOperator a = random_pauli(rng, n), b = random_pauli(rng, n);
    REQUIRE(commutes(a, a));
    Matrix da = dense_oracle(a), db = dense_oracle(b);
    double comm_norm = (da * db - db * da).cwiseAbs().maxCoeff();
    if (commutes(a, b)) {
      REQUIRE(comm_norm < 1e-12);
    } else {
      REQUIRE(comm_norm > 1.0);
    }
  }
}

TEST_CASE("weight and canonical identity") {
  REQUIRE(PauliOperator::identity(5).weight() == 0);
  REQUIRE(PauliOperator::identity(5).phase_exp() == 0);
  REQUIRE(PauliOperator::parse("-iXIYZ").weight() == 3);
}

TEST_CASE("clifford conjugation matches the dense oracle") {
  auto check1 = [](CliffordGate g, const char* in, const char* out) {
    PauliOperator p = PauliOperator::parse(in);
    REQUIRE(clifford_conjugate(p, g, {0}).str() == out);
  };
  check1(CliffordGate::H, "+X", "+Z");
  check1(CliffordGate::H, "+Z", "+X");
  check1(CliffordGate::S, "+X", "+Y");
  check1(CliffordGate::Sdg, "+X", "-Y");

  PauliOperator xc = PauliOperator::parse("XI");
  REQUIRE(clifford_conjugate(xc, CliffordGate::CNOT, {0, 1}).str() == "+XX");

  std::mt19937 rng(19);
  std::vector<CliffordGate> singles = {CliffordGate::H,  CliffordGate::S,
                                       CliffordGate::Sdg, CliffordGate::X,
                                       CliffordGate::Y,  CliffordGate::Z};
  for (int k = 0; k < 300; ++k) {
    int n = 2 + k % 2;
    PauliOperator p = random_pauli(rng, n);
    CliffordGate g = singles[k % singles.size()];
    int t = k % n;
    PauliOperator q = clifford_conjugate(p, g, {t});
    Matrix u = Matrix::Identity(1, 1);
    for (int j = 0; j < n; ++j)
      u = kron(u, j == t ? clifford_matrix(g) : Matrix::Identity(2, 2));
    REQUIRE(max_abs_diff(q.dense(), u * p.dense() * u.adjoint()) < 1e-12);
    // Weight is preserved by single-qubit gates.
    REQUIRE(q.weight() == p.weight());
    // Group action: conjugating back gives the original.
    REQUIRE(clifford_conjugate(q, inverse(g), {t}) == p);
  }
  for (int k = 0; k < 200; ++k) {
    int n = 2 + k % 2;
    PauliOperator p = random_pauli(rng, n);
    int c = k % n, t = (c + 1 + k % (n - 1)) % n;
    if (c == t) continue;
    PauliOperator q = clifford_conjugate(p, CliffordGate::CNOT, {c, t});
    // Dense CNOT acting on (c, t) within the register.
    Matrix u = Matrix::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
    Matrix cn = clifford_matrix(CliffordGate::CNOT);
    // Build via basis mapping: |bits> -> |bits with t ^= bit c>.
    for (Eigen::Index col = 0; col < u.rows(); ++col) {
      u.col(col).setZero();
      auto bit = [&](int q2) { return (col >> (n - 1 - q2)) & 1; };
      Eigen::Index row = col;
      if (bit(c)) row ^= Eigen::Index{1} << (n - 1 - t);
      u(row, col) = 1;
    }
    (void)cn;
    REQUIRE(max_abs_diff(q.dense(), u * p.dense() * u.adjoint()) < 1e-12);
    REQUIRE(std::abs(q.weight() - p.weight()) <= 1);
    REQUIRE(clifford_conjugate(q, CliffordGate::CNOT, {c, t}) == p);
  }
  REQUIRE_THROWS_AS(
      clifford_conjugate(PauliOperator::parse("X"), CliffordGate::H, {1}),
      InvalidArgument);
}

TEST_CASE("pauli sums") {
  PauliSum h;
  h.add(std::cos(0.3), PauliOperator::parse("XI"));
  h.add(std::sin(0.3), PauliOperator::parse("YI"));
  REQUIRE(h.max_term_weight() == 1);
  REQUIRE(h.support_mask() == 1u);
  Matrix d = h.dense_on({0});
  Matrix expect = std::cos(0.3) * PauliOperator::parse("X").dense() +
                  std::sin(0.3) * PauliOperator::parse("Y").dense();
  REQUIRE(max_abs_diff(d, expect) < 1e-14);

  PauliSum neg(PauliOperator::parse("-Z"));
  REQUIRE(neg.terms[0].first == -1.0);
  REQUIRE(neg.terms[0].second.phase_exp() == 0);
  REQUIRE(neg.negated().terms[0].first == 1.0);
  REQUIRE_THROWS_AS(PauliSum(PauliOperator::parse("iZ")), InvalidArgument);
}
