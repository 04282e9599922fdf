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

#include "holonome/evolution.hpp"
#include "test_helpers.hpp"

using namespace holonome;
using Catch::Matchers::WithinAbs;
using holonome::test::max_abs_diff;

namespace {

Matrix v_theta(double theta, int sign) {
  Matrix v(2, 2);
  double s = sign >= 0 ? 1.0 : -1.0;
  v << 1, -s * std::polar(1.0, -theta), s * std::polar(1.0, theta), 1;
  return v / std::sqrt(2.0);
}

PauliSum h_theta_sum(double theta, int sign, const std::string& g_tilde) {
  double s = sign >= 0 ? 1.0 : -1.0;
  PauliSum out;
  out.add(s * std::cos(theta), PauliOperator::parse("X" + g_tilde));
  out.add(s * std::sin(theta), PauliOperator::parse("Y" + g_tilde));
  return out;
}

// Independent dense integrator used as the oracle for full-register runs.
Matrix dense_ode_oracle(const std::function<Matrix(double)>& h, double T,
                        int steps = 20000) {
  Eigen::Index dim = h(0.0).rows();
  Matrix u = Matrix::Identity(dim, dim);
  double dt = T / steps;
  for (int k = 0; k < steps; ++k)
    u = expm_i_hermitian(h((k + 0.5) * dt), dt) * u;
  return u;
}

SegmentHamiltonian z_to_htheta_segment(double theta, int sign,
                                       const std::string& g_tilde,
                                       ScheduleKind kind, double T = 1.0) {
  PauliSum start(PauliOperator::parse("-Z" + g_tilde));
  PauliSum end = h_theta_sum(theta, sign, g_tilde).negated();
  return SegmentHamiltonian::plain(start, end, Schedule(kind, T));
}

}  // namespace

TEST_CASE("two-level evolution basics") {
  Matrix z(2, 2);
  z << 1, 0, 0, -1;

  SECTION("constant Z for time pi gives -identity") {
    auto [u0, u1] = evolve_two_level([&](double) { return z; }, M_PI);
    REQUIRE(max_abs_diff(u0, -Matrix::Identity(2, 2)) < 1e-9);
    REQUIRE(max_abs_diff(u1, -Matrix::Identity(2, 2)) < 1e-9);
  }

  SECTION("flipping the sign of H swaps the pair") {
    auto h = [&](double t) {
      return Matrix(std::cos(t) * z +
                    std::sin(t) * PauliOperator::parse("X").dense());
    };
    auto hneg = [&](double t) { return Matrix(-h(t)); };
    auto [u0, u1] = evolve_two_level(h, 0.7);
    auto [v0, v1] = evolve_two_level(hneg, 0.7);
    REQUIRE(max_abs_diff(u0, v1) < 1e-9);
    REQUIRE(max_abs_diff(u1, v0) < 1e-9);
  }

  SECTION("adiabatic convergence of the ground-state overlap") {
    // The deficit oscillates with T, so test against the 1/T^2 envelope.
    for (double T : {5.0, 20.0, 80.0}) {
      Schedule sched(ScheduleKind::linear, T);
      std::function<Matrix(double)> h = [&](double t) {
        auto [f, g] = sched.fg(t);
        return Matrix(f * z + g * PauliOperator::parse("X").dense());
      };
      auto [u0, u1] = evolve_two_level(h, T);
      // Ground state of Z is |1>, of X is |->.
      Vector phi0(2), phiT(2);
      phi0 << 0, 1;
      phiT << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
      double overlap = std::abs(phiT.dot(u0 * phi0));
      REQUIRE(1.0 - overlap < 10.0 / (T * T));
    }
  }
}

TEST_CASE("assemble_full equals direct dense integration") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> angle(0.0, M_PI / 2);
  for (const std::string& g_tilde :
       {std::string("Z"), std::string("ZZ"), std::string("XZZ")}) {
    double theta = angle(rng);
    double T = 2.0;
    Schedule sched(ScheduleKind::trigonometric, T);
    Matrix x = PauliOperator::parse("X").dense();
    Matrix y = PauliOperator::parse("Y").dense();
    Matrix z = PauliOperator::parse("Z").dense();
    std::function<Matrix(double)> h2 = [&](double t) {
      auto [f, g] = sched.fg(t);
      return Matrix(f * z + g * (std::cos(theta) * x + std::sin(theta) * y));
    };
    auto [u0, u1] = evolve_two_level(h2, T, 1e-10);
    PauliOperator gt = PauliOperator::parse(g_tilde);
    Matrix assembled = assemble_full(u0, u1, gt);

    auto h_full = [&](double t) { return Matrix(-kron(h2(t), gt.dense())); };
    Matrix oracle = dense_ode_oracle(h_full, T);
    REQUIRE(max_abs_diff(assembled, oracle) < 1e-8);
  }

  REQUIRE_THROWS_AS(assemble_full(Matrix::Identity(2, 2),
                                  Matrix::Identity(2, 2),
                                  PauliOperator::identity(2)),
                    InvalidArgument);
}

TEST_CASE("proposition-2 transport gives V(theta)") {
  for (double theta : {0.0, M_PI / 8, M_PI / 4, M_PI / 2}) {
    for (int sign : {+1, -1}) {
      for (const std::string& g_tilde :
           {std::string("Z"), std::string("ZZ")}) {
        SegmentHamiltonian seg = z_to_htheta_segment(
            theta, sign, g_tilde, ScheduleKind::trigonometric);
        SegmentOperator t = exact_adiabatic_transport(seg, 2048);
        Eigen::Index gdim = Eigen::Index{1} << g_tilde.size();
        Matrix expected =
            kron(v_theta(theta, sign), Matrix::Identity(gdim, gdim));
        CAPTURE(theta, sign, g_tilde);
        REQUIRE(phase_fidelity(expected, t.op) > 1.0 - 1e-8);
      }
    }
  }

  SECTION("theta = 0 gives the explicit matrix") {
    SegmentHamiltonian seg =
        z_to_htheta_segment(0.0, +1, "Z", ScheduleKind::linear);
    SegmentOperator t = exact_adiabatic_transport(seg, 4096);
    Matrix expected = kron(v_theta(0.0, +1), Matrix::Identity(2, 2));
    REQUIRE(max_abs_diff(t.op, expected) < 1e-6);
  }
}

TEST_CASE("transport details") {
  SECTION("zero-length path is the identity") {
    SegmentHamiltonian seg =
        z_to_htheta_segment(0.3, +1, "Z", ScheduleKind::trigonometric);
    SegmentOperator t = exact_adiabatic_transport(seg, 64, 0.3, 0.3);
    REQUIRE(max_abs_diff(t.op, Matrix::Identity(4, 4)) < 1e-12);
  }

  SECTION("backward direction inverts the transport") {
    SegmentHamiltonian seg =
        z_to_htheta_segment(0.7, +1, "Z", ScheduleKind::trigonometric);
    Matrix fwd = exact_adiabatic_transport(seg, 2048).op;
    Matrix bwd = exact_adiabatic_transport(seg.reversed(), 2048).op;
    REQUIRE(max_abs_diff(bwd, fwd.adjoint()) < 1e-8);
  }

  SECTION("partial transports compose") {
    SegmentHamiltonian seg =
        z_to_htheta_segment(0.3, +1, "Z", ScheduleKind::linear);
    Matrix a = exact_adiabatic_transport(seg, 2048, 0.0, 0.4).op;
    Matrix b = exact_adiabatic_transport(seg, 2048, 0.4, 1.0).op;
    Matrix full = exact_adiabatic_transport(seg, 4096).op;
    REQUIRE(max_abs_diff(b * a, full) < 1e-7);
  }

  SECTION("plus/minus Hamiltonians yield the same geometric part") {
    SegmentHamiltonian seg =
        z_to_htheta_segment(M_PI / 8, +1, "Z", ScheduleKind::trigonometric);
    SegmentHamiltonian flipped = seg;
    for (auto& b : flipped.branches) {
      b.start = b.start.negated();
      b.end = b.end.negated();
    }
    Matrix a = exact_adiabatic_transport(seg, 2048).op;
    Matrix b = exact_adiabatic_transport(flipped, 2048).op;
    REQUIRE(max_abs_diff(a, b) < 1e-9);
  }
}

TEST_CASE("appendix-A symmetry algebra") {
  Matrix z = PauliOperator::parse("Z").dense();
  for (double theta : {0.0, M_PI / 8, M_PI / 3}) {
    Matrix w(2, 2);
    w << 0, kI * std::polar(1.0, -theta), -kI * std::polar(1.0, theta), 0;
    for (int sign : {+1, -1}) {
      Matrix v = v_theta(theta, sign);
      REQUIRE(max_abs_diff(w * v, v * w) < 1e-12);  // [W, V] = 0
      REQUIRE(max_abs_diff(w * z + z * w, Matrix::Zero(2, 2)) < 1e-12);
      // W flips the interpolated Hamiltonian at every time.
      Schedule sched(ScheduleKind::linear, 1.0);
      for (double t : {0.0, 0.25, 0.6, 1.0}) {
        auto [f, g] = sched.fg(t);
        Matrix htheta = h_theta_sum(theta, sign, "").dense_on({0});
        Matrix h = f * z + g * htheta;
        REQUIRE(max_abs_diff(w * h * w, -h) < 1e-12);
      }
    }
  }
}

TEST_CASE("prop-1 factorization of the transport") {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> angle(0.0, M_PI / 2);
  const std::string tails[] = {"Z", "X", "ZZ", "XY", "YZ"};
  for (int trial = 0; trial < 10; ++trial) {
    double theta = angle(rng);
    const std::string& tail = tails[trial % 5];
    ScheduleKind kind =
        trial % 2 == 0 ? ScheduleKind::trigonometric : ScheduleKind::linear;
    SegmentHamiltonian seg = z_to_htheta_segment(theta, +1, tail, kind);
    Matrix t = exact_adiabatic_transport(seg, 2048).op;
    Eigen::Index gdim = Eigen::Index{1} << tail.size();
    Matrix u(2, 2);
    u << t(0, 0), t(0, gdim), t(gdim, 0), t(gdim, gdim);
    REQUIRE(max_abs_diff(t, kron(u, Matrix::Identity(gdim, gdim))) < 1e-8);
    REQUIRE(unitarity_defect(t) < 1e-9);
  }
}

TEST_CASE("finite-time evolution and geometric extraction") {
  SegmentHamiltonian seg = z_to_htheta_segment(
      M_PI / 4, +1, "Z", ScheduleKind::trigonometric, 60.0);
  EvolutionResult result = evolve_segment(seg, 8192);
  REQUIRE(result.diabatic_error < 1e-3);
  REQUIRE_THAT(result.dynamical_phase, WithinAbs(60.0, 1e-6));

  Matrix geo = geometric_part(result);
  Matrix oracle = exact_adiabatic_transport(seg, 4096).op;
  REQUIRE(phase_fidelity(geo, oracle) > 1.0 - 1e-4);

  // The full unitary itself matches a dense oracle.
  Matrix direct = dense_ode_oracle(
      [&](double t) { return seg.dense_on_support(t); }, 60.0, 60000);
  REQUIRE(max_abs_diff(result.unitary, direct) < 1e-6);

  // Refusal path: a fast run has a large diabatic error.
  SegmentHamiltonian fast = z_to_htheta_segment(
      M_PI / 4, +1, "Z", ScheduleKind::trigonometric, 0.05);
  EvolutionResult bad = evolve_segment(fast, 512);
  REQUIRE(bad.diabatic_error > 1e-3);
  REQUIRE_THROWS_AS(geometric_part(bad), AccuracyError);
}

TEST_CASE("controlled segment blocks and spectrum guard") {
  // The two-branch interpolation -Y -> -+Z on the target (qubit 1) with a
  // shared Z on qubit 2, conditioned on qubit 0.
  SegmentHamiltonian::Branch b0, b1;
  b0.start = PauliSum(PauliOperator::parse("-IYZ"));
  b0.end = PauliSum(PauliOperator::parse("-IZZ"));
  b1.start = PauliSum(PauliOperator::parse("-IYZ"));
  b1.end = PauliSum(PauliOperator::parse("IZZ"));
  SegmentHamiltonian seg = SegmentHamiltonian::controlled(
      0, b0, b1, Schedule(ScheduleKind::trigonometric, 1.0));

  // Eigenvalue spread across branches vanishes on a time grid.
  for (double t : {0.0, 0.3, 0.7, 1.0}) {
    std::vector<int> sup12 = {1, 2};
    Eigen::SelfAdjointEigenSolver<Matrix> e0(
        seg.branch_matrix(seg.branches[0], sup12, t));
    Eigen::SelfAdjointEigenSolver<Matrix> e1(
        seg.branch_matrix(seg.branches[1], sup12, t));
    REQUIRE((e0.eigenvalues() - e1.eigenvalues()).cwiseAbs().maxCoeff() <
            1e-10);
  }

  Matrix t_op = exact_adiabatic_transport(seg, 2048).op;
  // Block-diagonal over the control: extract and check unitarity of each.
  Matrix t0 = t_op.block(0, 0, 4, 4), t1 = t_op.block(4, 4, 4, 4);
  REQUIRE(max_abs_diff(t_op.block(0, 4, 4, 4), Matrix::Zero(4, 4)) < 1e-12);
  REQUIRE(unitarity_defect(t0) < 1e-9);
  REQUIRE(unitarity_defect(t1) < 1e-9);

  // Mismatched spectra without normalization are rejected.
  SegmentHamiltonian::Branch wide = b1;
  wide.end = PauliSum(2.0, PauliOperator::parse("IZZ"));
  REQUIRE_THROWS_AS(SegmentHamiltonian::controlled(
                        0, b0, wide, Schedule(ScheduleKind::trigonometric, 1.0)),
                    InvalidArgument);
}

TEST_CASE("exact transport agrees with slow finite-time runs") {
  SegmentHamiltonian seg = z_to_htheta_segment(
      M_PI / 8, +1, "Z", ScheduleKind::trigonometric, 200.0);
  EvolutionResult result = evolve_segment(seg, 20000);
  Matrix oracle = exact_adiabatic_transport(seg, 4096).op;
  REQUIRE(phase_fidelity(geometric_part(result), oracle) > 1.0 - 1e-5);
}

TEST_CASE("segment validation rejects malformed endpoints") {
  Schedule sched(ScheduleKind::trigonometric, 1.0);
  // Identity term.
  REQUIRE_THROWS_AS(
      SegmentHamiltonian::plain(PauliSum(PauliOperator::parse("II")),
                                PauliSum(PauliOperator::parse("XZ")), sched),
      InvalidArgument);
  // Commuting endpoints.
  REQUIRE_THROWS_AS(
      SegmentHamiltonian::plain(PauliSum(PauliOperator::parse("ZI")),
                                PauliSum(PauliOperator::parse("IZ")), sched),
      InvalidArgument);
  // Commuting terms within one endpoint.
  PauliSum bad;
  bad.add(1.0, PauliOperator::parse("XI"));
  bad.add(1.0, PauliOperator::parse("IX"));
  REQUIRE_THROWS_AS(
      SegmentHamiltonian::plain(bad, PauliSum(PauliOperator::parse("ZI")),
                                sched),
      InvalidArgument);
}
