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

#include <functional>
#include <optional>

#include "holonome/pauli.hpp"
#include "holonome/schedules.hpp"
#include "holonome/statevector.hpp"

namespace holonome {

enum class SegmentDirection { forward, backward };

/**
 * One adiabatic path segment: an interpolation f(t) A + g(t) B between
 * Hamiltonian endpoints, possibly split into branches over computational
 * states of a set of control qubits,
 *
 *   H(t) = sum_b |bits_b><bits_b|_controls (x) [f(t) A_b + g(t) B_b] / l_b(t)
 *
 * where A_b, B_b are Hermitian Pauli combinations acting as the identity on
 * the controls, and l_b(t) = 1 unless `normalize_spectrum` is set, in which
 * case each branch is rescaled so its instantaneous eigenvalues are exactly
 * +-1 (the levels of all branches then coincide and the total spectrum stays
 * degenerate). A constant branch (A_b proportional to B_b) pins its sector.
 */
struct SegmentHamiltonian {
  struct Branch {
    uint32_t control_bits = 0;  // bit j <-> controls[j], MSB-first order
    PauliSum start, end;
  };

  int n = 0;
  std::vector<int> controls;
  std::vector<Branch> branches;
  Schedule schedule{ScheduleKind::trigonometric, 1.0};
  bool normalize_spectrum = false;
  SegmentDirection direction = SegmentDirection::forward;

  static SegmentHamiltonian plain(PauliSum start, PauliSum end,
                                  Schedule sched) {
    SegmentHamiltonian seg;
    seg.n = start.num_qubits();
    seg.schedule = std::move(sched);
    seg.branches.push_back({0, std::move(start), std::move(end)});
    seg.validate();
    return seg;
  }

  static SegmentHamiltonian controlled(int control, Branch branch0,
                                       Branch branch1, Schedule sched,
                                       bool normalize = false) {
    SegmentHamiltonian seg;
    seg.n = branch0.start.num_qubits();
    seg.controls = {control};
    branch0.control_bits = 0;
    branch1.control_bits = 1;
    seg.branches = {std::move(branch0), std::move(branch1)};
    seg.schedule = std::move(sched);
    seg.normalize_spectrum = normalize;
    seg.validate();
    return seg;
  }

  SegmentHamiltonian reversed() const {
    SegmentHamiltonian seg = *this;
    seg.direction = direction == SegmentDirection::forward
                        ? SegmentDirection::backward
                        : SegmentDirection::forward;
    return seg;
  }

  /** Sorted union of control qubits and endpoint supports. */
  std::vector<int> support() const {
    uint64_t mask = 0;
    for (int c : controls) mask |= uint64_t{1} << c;
    for (const auto& b : branches)
      mask |= b.start.support_mask() | b.end.support_mask();
    std::vector<int> out;
    for (int q = 0; q < n; ++q)
      if ((mask >> q) & 1) out.push_back(q);
    return out;
  }

  /** Support of one branch, excluding the controls. */
  std::vector<int> branch_support(const Branch& b) const {
    uint64_t mask = b.start.support_mask() | b.end.support_mask();
    std::vector<int> out;
    for (int q = 0; q < n; ++q)
      if ((mask >> q) & 1) out.push_back(q);
    return out;
  }

  /** Largest instantaneous Hamiltonian-term support, controls included. */
  int max_term_weight() const {
    int w = 0;
    int ctl = static_cast<int>(controls.size());
    for (const auto& b : branches) {
      int body = std::max(b.start.max_term_weight(), b.end.max_term_weight());
      w = std::max(w, body + (ctl > 0 ? ctl : 0));
    }
    return w;
  }

  bool branch_is_constant(const Branch& b) const {
    return b.start.proportional_to(b.end);
  }

  void validate() const;

  /** Instantaneous branch factor [f A + g B] / l at absolute time t. */
  Matrix branch_matrix(const Branch& b, const std::vector<int>& positions,
                       double t) const {
    auto [f, g] = schedule.fg(t);
    Matrix h = f * b.start.dense_on(positions) + g * b.end.dense_on(positions);
    if (normalize_spectrum) {
      double lam = branch_level(b, t);
      if (lam < 1e-12)
        throw AccuracyError("segment Hamiltonian vanished mid-path");
      h /= lam;
    }
    return h;
  }

  /** Instantaneous positive eigenvalue of a branch (before normalization). */
  double branch_level(const Branch& b, double t) const {
    auto [f, g] = schedule.fg(t);
    double s2 = 0, e2 = 0;
    for (const auto& [c, p] : b.start.terms) s2 += c * c;
    for (const auto& [c, p] : b.end.terms) e2 += c * c;
    if (branch_is_constant(b)) {
      double s = std::sqrt(s2), e = std::sqrt(e2);
      return std::abs(f * s + g * e * cross_sign(b));
    }
    return std::sqrt(f * f * s2 + g * g * e2);
  }

  /** Level of the whole (possibly normalized) segment at time t. */
  double level(double t) const {
    return normalize_spectrum ? 1.0 : branch_level(branches.front(), t);
  }

  /** Dense Hamiltonian on support() at absolute time t. */
  Matrix dense_on_support(double t) const;

 private:
  // +1 if end = +c * start, -1 if opposite sign (constant branches only).
  double cross_sign(const Branch& b) const {
    double s = b.start.terms[0].first * b.end.terms[0].first;
    return s >= 0 ? 1.0 : -1.0;
  }
};

inline void SegmentHamiltonian::validate() const {
  if (branches.size() != (size_t{1} << controls.size()))
    throw InvalidArgument("segment needs one branch per control pattern");
  double s2_ref = -1, e2_ref = -1;
  for (const auto& b : branches) {
    if (b.start.terms.empty() || b.end.terms.empty())
      throw InvalidArgument("segment endpoints must be nonempty");
    if (b.start.num_qubits() != n || b.end.num_qubits() != n)
      throw InvalidArgument("segment endpoints on the wrong register");
    for (const auto& sum : {b.start, b.end}) {
      for (const auto& [c, p] : sum.terms) {
        if (p.is_identity_letters())
          throw InvalidArgument("endpoint terms must be traceless");
        for (int ctl : controls)
          if (p.letter(ctl) != 'I')
            throw InvalidArgument("endpoint terms must not touch controls");
      }
      // Pairwise anticommuting terms make the sum an involution times a
      // scalar, which the transport and level formulas rely on.
      for (size_t i = 0; i < sum.terms.size(); ++i)
        for (size_t j = i + 1; j < sum.terms.size(); ++j)
          if (commutes(sum.terms[i].second, sum.terms[j].second))
            throw InvalidArgument("endpoint terms must anticommute");
    }
    if (!branch_is_constant(b)) {
      for (const auto& [c1, p1] : b.start.terms)
        for (const auto& [c2, p2] : b.end.terms)
          if (commutes(p1, p2))
            throw InvalidArgument(
                "segment endpoints must anticommute (or be proportional)");
    }
    double s2 = 0, e2 = 0;
    for (const auto& [c, p] : b.start.terms) s2 += c * c;
    for (const auto& [c, p] : b.end.terms) e2 += c * c;
    if (!normalize_spectrum && branches.size() > 1) {
      if (s2_ref < 0) {
        s2_ref = s2;
        e2_ref = e2;
      } else if (std::abs(s2 - s2_ref) > 1e-12 ||
                 std::abs(e2 - e2_ref) > 1e-12) {
        throw InvalidArgument(
            "branches must share their instantaneous spectrum; set "
            "normalize_spectrum or match the endpoint norms");
      }
    }
  }
}

inline Matrix SegmentHamiltonian::dense_on_support(double t) const {
  std::vector<int> sup = support();
  int m = static_cast<int>(sup.size());
  Eigen::Index dim = Eigen::Index{1} << m;
  Matrix out = Matrix::Zero(dim, dim);
  // Positions of controls within the support register.
  std::vector<int> ctl_pos;
  for (int c : controls)
    ctl_pos.push_back(static_cast<int>(
        std::find(sup.begin(), sup.end(), c) - sup.begin()));
  for (const auto& b : branches) {
    Matrix hb = branch_matrix(b, sup, t);
    if (controls.empty()) {
      out += hb;
      continue;
    }
    for (Eigen::Index row = 0; row < dim; ++row) {
      bool match = true;
      for (size_t j = 0; j < ctl_pos.size(); ++j) {
        bool bit = (row >> (m - 1 - ctl_pos[j])) & 1;
        bool want = (b.control_bits >> (controls.size() - 1 - j)) & 1;
        if (bit != want) match = false;
      }
      if (!match) continue;
      for (Eigen::Index col = 0; col < dim; ++col) {
        bool cmatch = true;
        for (size_t j = 0; j < ctl_pos.size(); ++j) {
          bool bit = (col >> (m - 1 - ctl_pos[j])) & 1;
          bool want = (b.control_bits >> (controls.size() - 1 - j)) & 1;
          if (bit != want) cmatch = false;
        }
        if (cmatch) out(row, col) += hb(row, col);
      }
    }
  }
  return out;
}

/**
 * Time-ordered pair U0 = Texp(-i int H), U1 = Texp(+i int H) for a two-level
 * family, via per-step exact exponentials of the midpoint Hamiltonian. The
 * step count doubles until the result moves by less than `tol`.
 */
inline std::pair<Matrix, Matrix> evolve_two_level(
    const std::function<Matrix(double)>& h, double T, double tol = 1e-9) {
  auto run = [&](long steps) {
    Matrix u0 = Matrix::Identity(2, 2), u1 = Matrix::Identity(2, 2);
    double dt = T / steps;
    for (long k = 0; k < steps; ++k) {
      Matrix hm = h((k + 0.5) * dt);
      // Split H = c0 I + v . sigma; exact exponential of both signs.
      Complex c0 = (hm(0, 0) + hm(1, 1)) / 2.0;
      double vz = ((hm(0, 0) - hm(1, 1)) / 2.0).real();
      double vx = hm(0, 1).real();
      double vy = -hm(0, 1).imag();
      double vn = std::sqrt(vx * vx + vy * vy + vz * vz);
      Matrix vsigma(2, 2);
      vsigma << vz, Complex(vx, -vy), Complex(vx, vy), -vz;
      Matrix step0, step1;
      if (vn < 1e-300) {
        step0 = step1 = Matrix::Identity(2, 2);
      } else {
        Matrix unit = vsigma / vn;
        step0 = std::cos(dt * vn) * Matrix::Identity(2, 2) -
                kI * std::sin(dt * vn) * unit;
        step1 = step0.adjoint();
      }
      u0 = std::exp(-kI * c0.real() * dt) * step0 * u0;
      u1 = std::exp(kI * c0.real() * dt) * step1 * u1;
    }
    return std::make_pair(u0, u1);
  };
  long steps = 256;
  auto prev = run(steps);
  for (int iter = 0; iter < 14; ++iter) {
    steps *= 2;
    auto cur = run(steps);
    double moved =
        std::max((cur.first - prev.first).cwiseAbs().maxCoeff(),
                 (cur.second - prev.second).cwiseAbs().maxCoeff());
    if (moved < tol) return cur;
    prev = cur;
  }
  throw AccuracyError("two-level evolution did not converge");
}

/**
 * Assembles the full unitary U0 (x) P0 + U1 (x) P1 from the pair driven by
 * -H(t) (x) G, where P0/P1 project the G = -1/+1 sectors. G must act
 * nontrivially somewhere, else P0 vanishes.
 */
inline Matrix assemble_full(const Matrix& u0, const Matrix& u1,
                            const PauliOperator& g_tilde) {
  if (g_tilde.is_identity_letters())
    throw InvalidArgument(
        "the shared factor must be a nontrivial Pauli (one projector "
        "vanishes otherwise)");
  Matrix g = g_tilde.dense();
  Eigen::Index dim = g.rows();
  Matrix p0 = (Matrix::Identity(dim, dim) - g) / 2.0;
  Matrix p1 = (Matrix::Identity(dim, dim) + g) / 2.0;
  return kron(u0, p0) + kron(u1, p1);
}

namespace detail {

// Discrete parallel transport of the two spectral subspaces of a branch
// along sampled times; returns sum_n G_n(end) F_n(0)^dag on the branch
// support. Sample times map [0,1] onto the segment's own direction.
inline Matrix transport_branch(const SegmentHamiltonian& seg,
                               const SegmentHamiltonian::Branch& branch,
                               const std::vector<int>& positions, int samples,
                               double from = 0.0, double to = 1.0) {
  Eigen::Index dim = Eigen::Index{1} << positions.size();
  if (seg.branch_is_constant(branch)) return Matrix::Identity(dim, dim);

  double T = seg.schedule.total_time();
  auto time_at = [&](int k) {
    double s = from + (to - from) * static_cast<double>(k) / samples;
    if (seg.direction == SegmentDirection::backward) s = 1.0 - s;
    return s * T;
  };

  Eigen::Index half = dim / 2;
  Matrix frame0_g, frame0_e, trans_g, trans_e;
  for (int k = 0; k <= samples; ++k) {
    Matrix h = seg.branch_matrix(branch, positions, time_at(k));
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.eigenvalues()(half) - es.eigenvalues()(half - 1) < 1e-9)
      throw AccuracyError("spectral gap closed along the segment");
    Matrix fg = es.eigenvectors().leftCols(half);
    Matrix fe = es.eigenvectors().rightCols(half);
    if (k == 0) {
      frame0_g = trans_g = fg;
      frame0_e = trans_e = fe;
      continue;
    }
    trans_g = fg * polar_unitary(fg.adjoint() * trans_g);
    trans_e = fe * polar_unitary(fe.adjoint() * trans_e);
  }
  return trans_g * frame0_g.adjoint() + trans_e * frame0_e.adjoint();
}

}  // namespace detail

struct SegmentOperator {
  std::vector<int> support;  // ascending qubit indices
  Matrix op;                 // 2^|support| unitary

  void apply(Vector& state, int n) const {
    apply_on_support(state, op, support, n);
  }

  Matrix dense(int n) const { return dense_embed(op, support, n); }
};

/**
 * Exact-adiabatic geometric part of a segment over the path fraction
 * [from, to], as the parallel-transport operator of each eigenspace. This is
 * the T -> infinity limit of the driven evolution with dynamical phases
 * removed, and serves as the oracle for finite-time runs.
 */
inline SegmentOperator exact_adiabatic_transport(const SegmentHamiltonian& seg,
                                                 int samples = 4096,
                                                 double from = 0.0,
                                                 double to = 1.0) {
  std::vector<int> sup = seg.support();
  int m = static_cast<int>(sup.size());
  Eigen::Index dim = Eigen::Index{1} << m;
  Matrix out = Matrix::Zero(dim, dim);

  std::vector<int> ctl_pos;
  for (int c : seg.controls)
    ctl_pos.push_back(static_cast<int>(
        std::find(sup.begin(), sup.end(), c) - sup.begin()));

  for (const auto& b : seg.branches) {
    std::vector<int> bsup = seg.branch_support(b);
    Matrix tb = detail::transport_branch(seg, b, bsup, samples, from, to);
    // Embed: controls projected on this branch's bits, other support qubits
    // untouched (identity).
    std::vector<int> bpos;  // positions of branch support within sup
    for (int q : bsup)
      bpos.push_back(static_cast<int>(
          std::find(sup.begin(), sup.end(), q) - sup.begin()));
    for (Eigen::Index row = 0; row < dim; ++row) {
      auto ctl_match = [&](Eigen::Index idx) {
        for (size_t j = 0; j < ctl_pos.size(); ++j) {
          bool bit = (idx >> (m - 1 - ctl_pos[j])) & 1;
          bool want = (b.control_bits >> (seg.controls.size() - 1 - j)) & 1;
          if (bit != want) return false;
        }
        return true;
      };
      if (!ctl_match(row)) continue;
      auto sub_of = [&](Eigen::Index idx) {
        Eigen::Index sub = 0;
        for (size_t j = 0; j < bpos.size(); ++j)
          if ((idx >> (m - 1 - bpos[j])) & 1)
            sub |= Eigen::Index{1} << (bpos.size() - 1 - j);
        return sub;
      };
      uint64_t bmask = 0;
      for (int j : bpos) bmask |= uint64_t{1} << (m - 1 - j);
      for (Eigen::Index col = 0; col < dim; ++col) {
        if (!ctl_match(col)) continue;
        if ((static_cast<uint64_t>(row) & ~bmask) !=
            (static_cast<uint64_t>(col) & ~bmask))
          continue;
        out(row, col) += tb(sub_of(row), sub_of(col));
      }
    }
  }
  return {sup, out};
}

/** Finite-time evolution output for one segment. */
struct EvolutionResult {
  std::vector<int> support;
  Matrix unitary;          // full driven evolution on the support
  Matrix geometric_part;   // dynamical phases stripped (see geometric_part())
  double dynamical_phase;  // omega(T) = int lambda dt
  double diabatic_error;   // population leaked between the +- eigenspaces
};

/**
 * Integrates the segment's Schrodinger equation on its support with per-step
 * midpoint exponentials, then strips the eigenspace dynamical phases
 * e^{+- i omega(T)}. Extraction is refused when the leak exceeds
 * `max_extraction_error`.
 */
inline EvolutionResult evolve_segment(const SegmentHamiltonian& seg,
                                      int steps = 4096,
                                      double max_extraction_error = 1e-3) {
  std::vector<int> sup = seg.support();
  Eigen::Index dim = Eigen::Index{1} << sup.size();
  double T = seg.schedule.total_time();
  auto time_at = [&](double s) {
    return seg.direction == SegmentDirection::backward ? (1.0 - s) * T : s * T;
  };

  Matrix u = Matrix::Identity(dim, dim);
  double omega = 0.0;
  double h = 1.0 / steps;
  for (int k = 0; k < steps; ++k) {
    double smid = (k + 0.5) * h;
    Matrix hm = seg.dense_on_support(time_at(smid));
    u = expm_i_hermitian(hm, h * T) * u;
    omega += seg.level(time_at(smid)) * h * T;
  }

  auto spectral_split = [&](double s) {
    Matrix hm = seg.dense_on_support(time_at(s));
    Eigen::SelfAdjointEigenSolver<Matrix> es(hm);
    Eigen::Index half = dim / 2;
    Matrix pg = es.eigenvectors().leftCols(half) *
                es.eigenvectors().leftCols(half).adjoint();
    Matrix pe = es.eigenvectors().rightCols(half) *
                es.eigenvectors().rightCols(half).adjoint();
    return std::make_pair(pg, pe);
  };
  auto [pg0, pe0] = spectral_split(0.0);
  auto [pgT, peT] = spectral_split(1.0);

  double leak = ((peT * u * pg0).squaredNorm() + (pgT * u * pe0).squaredNorm()) /
                static_cast<double>(dim / 2);

  EvolutionResult result;
  result.support = sup;
  result.unitary = u;
  result.dynamical_phase = omega;
  result.diabatic_error = leak;
  if (leak <= max_extraction_error) {
    // Ground block (eigenvalue -lambda) accumulated e^{+i omega}.
    result.geometric_part = std::exp(-kI * omega) * (pgT * u * pg0) +
                            std::exp(kI * omega) * (peT * u * pe0);
  }
  return result;
}

/**
 * Dynamical-phase-stripped geometric part of a finite-time run; throws when
 * the diabatic error was too large for the extraction to make sense.
 */
inline Matrix geometric_part(const EvolutionResult& result,
                             double max_error = 1e-3) {
  if (result.diabatic_error > max_error)
    throw AccuracyError(
        "diabatic error too large to extract a geometric part");
  return result.geometric_part;
}

}  // namespace holonome
