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
#include <iterator>
#include <map>
#include <string>

#include "holonome/codes.hpp"
#include "holonome/holonomy.hpp"

namespace holonome {

/** Images of X_q and Z_q under conjugation by some Clifford, full width. */
struct QubitImages {
  PauliOperator x_image, z_image;
};

/**
 * U P U^dag where U is described by the images of the X and Z generators on
 * a set of qubits; everything else is untouched. Exact phases.
 */
inline PauliOperator conjugate_via_images(
    const PauliOperator& p, const std::map<int, QubitImages>& images) {
  int n = p.num_qubits();
  int h = (p.phase_exp() + std::popcount(p.x_bits() & p.z_bits())) & 3;
  PauliOperator result =
      PauliOperator::identity(n).with_phase_exp(static_cast<uint8_t>(h));
  for (int pass = 0; pass < 2; ++pass) {
    for (int q = 0; q < n; ++q) {
      bool hit = pass == 0 ? p.x_bit(q) : p.z_bit(q);
      if (!hit) continue;
      auto it = images.find(q);
      PauliOperator factor =
          it == images.end()
              ? PauliOperator::single(n, q, pass == 0 ? 'X' : 'Z')
              : (pass == 0 ? it->second.x_image : it->second.z_image);
      result = result * factor;
    }
  }
  return result;
}

/** A disjoint-support factor of a program's intended geometric part. */
struct TargetFactor {
  std::vector<int> qubits;  // ascending
  Matrix op;                // 2^|qubits| unitary, exact phase included
};

/**
 * A compiled gate: ordered adiabatic segments, the group snapshots around
 * them, and the intended geometric part. Segments between two entries of
 * `chain_starts` share their junction Hamiltonians; across chain starts the
 * Hamiltonian is switched (turned off and on), which costs nothing
 * adiabatically.
 */
struct PathProgram {
  int n = 0;
  std::vector<SegmentHamiltonian> segments;
  std::vector<int> chain_starts;
  std::vector<int> correction_segments;  // phase-correction bookkeeping
  std::vector<TargetFactor> target;
  std::optional<TargetFactor> pre_correction_target;
  TrackedGroup group_before, group_after;
  std::string description;

  bool is_chain_start(int index) const {
    for (int s : chain_starts)
      if (s == index) return true;
    return false;
  }

  /** Junction invariant: adjacent segments of one chain share endpoint
   * Hamiltonians up to an overall sign (which is geometrically immaterial).
   * Compared densely on the union support so plain and projector-split
   * segments can abut. */
  void validate() const {
    for (size_t k = 1; k < segments.size(); ++k) {
      if (is_chain_start(static_cast<int>(k))) continue;
      const auto& prev = segments[k - 1];
      const auto& cur = segments[k];
      std::vector<int> sup_prev = prev.support(), sup_cur = cur.support();
      std::vector<int> sup;
      std::set_union(sup_prev.begin(), sup_prev.end(), sup_cur.begin(),
                     sup_cur.end(), std::back_inserter(sup));
      auto embed = [&](const SegmentHamiltonian& seg, double t) {
        std::vector<int> positions;
        for (int q : seg.support())
          positions.push_back(static_cast<int>(
              std::find(sup.begin(), sup.end(), q) - sup.begin()));
        return dense_embed(seg.dense_on_support(t), positions,
                           static_cast<int>(sup.size()));
      };
      Matrix a = embed(prev, prev.schedule.total_time());
      Matrix b = embed(cur, 0.0);
      double same = (a - b).cwiseAbs().maxCoeff();
      double flipped = (a + b).cwiseAbs().maxCoeff();
      if (std::min(same, flipped) > 1e-9)
        throw InvalidArgument(
            "adjacent segments must share their junction Hamiltonian");
    }
  }
};

struct WeightAudit {
  std::vector<int> per_segment;
  int max_weight = 0;
};

/** Largest instantaneous Hamiltonian-term support over the whole program. */
inline WeightAudit weight_audit(const PathProgram& program) {
  WeightAudit audit;
  for (const auto& seg : program.segments) {
    audit.per_segment.push_back(seg.max_term_weight());
    audit.max_weight = std::max(audit.max_weight, audit.per_segment.back());
  }
  return audit;
}

inline void enforce_weight_budget(const PathProgram& program, int budget) {
  WeightAudit audit = weight_audit(program);
  if (audit.max_weight > budget)
    throw InvalidArgument("program exceeds the Hamiltonian weight budget of " +
                          std::to_string(budget) + " (found " +
                          std::to_string(audit.max_weight) + ")");
}

namespace detail {

/** A signed axis on the Bloch sphere of the active qubit. */
struct AxisStep {
  double x = 0, y = 0, z = 0;

  AxisStep negated() const { return {-x, -y, -z}; }

  friend AxisStep cross(const AxisStep& a, const AxisStep& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
            a.x * b.y - a.y * b.x};
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }

  Matrix sigma() const {
    Matrix m(2, 2);
    m << z, Complex(x, -y), Complex(x, y), -z;
    return m;
  }
};

inline AxisStep ax(char letter, int sign) {
  double s = sign;
  switch (letter) {
    case 'X': return {s, 0, 0};
    case 'Y': return {0, s, 0};
    case 'Z': return {0, 0, s};
  }
  throw InvalidArgument("bad axis letter");
}

inline AxisStep ax_planar(double theta, int sign) {
  return {sign * std::cos(theta), sign * std::sin(theta), 0};
}

/**
 * Single-qubit paths, one per supported form of the starting element. Every
 * consecutive pair of axes is orthogonal, so each segment interpolates
 * between anticommuting endpoints and transports as a quarter-turn about
 * their cross axis. The pi/2-about-Z family (Phase and pi/8 gates) is only
 * reachable from a Z-form element; the pi-rotations and the Hadamard have
 * paths from every form.
 */
inline std::vector<AxisStep> chain_for(char gate, char form = 'Z') {
  using V = std::vector<AxisStep>;
  auto unsupported = [&]() -> V {
    throw SearchFailure(std::string("gate '") + gate +
                        "' has no path from a " + form + "-form element");
  };
  if (form == 'Z') {
    switch (gate) {
      case 'X': return {ax('Z', -1), ax('Y', -1), ax('Z', +1)};
      case 'Z':
        return {ax('Z', -1), ax('X', -1), ax('Z', +1), ax('Y', +1),
                ax('Z', -1)};
      case 'S':
        return {ax('Z', -1), ax_planar(M_PI / 4, -1), ax('Z', +1),
                ax('Y', +1), ax('Z', -1)};
      case 's': {
        V v = chain_for('S');
        std::reverse(v.begin(), v.end());
        return v;
      }
      case 'H':
        return {ax('Z', -1), ax('X', -1), ax('Z', +1), ax('Y', +1),
                ax('Z', -1), ax('X', -1)};
      case 'T':
        return {ax('Z', -1), ax('X', -1), ax('Z', +1), ax('Y', +1),
                ax('Z', -1), ax('Y', -1), ax('Z', +1),
                ax_planar(M_PI / 8, -1), ax('Z', -1)};
      case 't': {
        V v = chain_for('T');
        std::reverse(v.begin(), v.end());
        return v;
      }
    }
    return unsupported();
  }
  if (form == 'X') {
    switch (gate) {
      case 'Z': return {ax('X', -1), ax('Y', +1), ax('X', +1)};
      case 'H':
        // The Hadamard is its own conjugate under itself, so the Z-form
        // path maps letter-for-letter (Z <-> X, Y -> -Y).
        return {ax('X', -1), ax('Z', -1), ax('X', +1), ax('Y', -1),
                ax('X', -1), ax('Z', -1)};
    }
    return unsupported();
  }
  if (form == 'Y') {
    switch (gate) {
      case 'X': return {ax('Y', -1), ax('Z', +1), ax('Y', +1)};
      case 'Z': return {ax('Y', -1), ax('X', +1), ax('Y', +1)};
      case 'H': {
        // Quarter-turns about (X+Z)/sqrt(2), reachable from +-Y.
        AxisStep w{1 / std::sqrt(2.0), 0, -1 / std::sqrt(2.0)};
        return {ax('Y', -1), w, ax('Y', +1)};
      }
    }
    return unsupported();
  }
  throw InvalidArgument("form must be one of Z, X, Y");
}

/** Forms worth trying for a gate, most standard first. */
inline std::string supported_forms(char gate) {
  switch (gate) {
    case 'S':
    case 's':
    case 'T':
    case 't': return "Z";
    case 'X': return "ZY";
    case 'Z': return "ZXY";
    case 'H': return "ZXY";
  }
  throw InvalidArgument("unknown gate");
}

/**
 * Exact geometric part of an axis path: the product of quarter-turns
 * (I - i m.sigma)/sqrt(2) about the normalized cross axes of consecutive
 * steps. This is what the adiabatic transport of the path converges to.
 */
inline Matrix chain_net(const std::vector<AxisStep>& chain) {
  Matrix u = Matrix::Identity(2, 2);
  for (size_t k = 0; k + 1 < chain.size(); ++k) {
    AxisStep m = cross(chain[k], chain[k + 1]);
    double n = m.norm();
    if (n < 1e-12)
      throw InvalidArgument("consecutive chain axes must not be parallel");
    u = ((Matrix::Identity(2, 2) - kI * m.sigma() / n) / std::sqrt(2.0)) * u;
  }
  return u;
}

/** Exact geometric part of the catalog path (per form), phase included. */
inline Matrix catalog_matrix(char gate, char form = 'Z') {
  return chain_net(chain_for(gate, form));
}

/** The phase-free version of the catalog gate. */
inline Matrix plain_matrix(char gate) {
  Matrix m(2, 2);
  switch (gate) {
    case 'X': return clifford_matrix(CliffordGate::X);
    case 'Z': return clifford_matrix(CliffordGate::Z);
    case 'S': return clifford_matrix(CliffordGate::S);
    case 's': return clifford_matrix(CliffordGate::Sdg);
    case 'H': return clifford_matrix(CliffordGate::H);
    case 'T':
      m << 1, 0, 0, std::polar(1.0, M_PI / 4);
      return m;
    case 't':
      m << 1, 0, 0, std::polar(1.0, -M_PI / 4);
      return m;
  }
  throw InvalidArgument("unknown gate");
}

/**
 * The path realizes e^{i phi} times the plain gate; returns phi as a
 * multiple of pi/4 (mod 8) for diagonal phase corrections.
 */
inline int phase_octant(const Matrix& realized, const Matrix& plain) {
  Complex tr = (plain.adjoint() * realized).trace();
  double ang = std::arg(tr);
  int k = static_cast<int>(std::llround(ang / (M_PI / 4)));
  return ((k % 8) + 8) % 8;
}

inline int catalog_phase_octant(char gate, char form = 'Z') {
  return phase_octant(catalog_matrix(gate, form), plain_matrix(gate));
}

}  // namespace detail

struct CompileOptions {
  ScheduleKind interp = ScheduleKind::trigonometric;
  double segment_time = 1.0;
  bool bump_reparam = false;
};

namespace detail {

class Compiler {
 public:
  Compiler(TrackedGroup group, CompileOptions opt)
      : group_(std::move(group)), opt_(opt) {
    program_.n = group_.n;
    program_.group_before = group_;
  }

  Schedule schedule() const {
    return Schedule(opt_.interp, opt_.segment_time, opt_.bump_reparam);
  }

  // ----- low-level -----

  // Endpoint sum: axis applied at `qubit`, tensored with the shared factor.
  PauliSum endpoint(const AxisStep& step, int qubit,
                    const PauliOperator& g_tilde) const {
    PauliSum out;
    auto with_letter = [&](char c) {
      PauliOperator p = g_tilde.with_phase_exp(0);
      p.set_letter(qubit, c);
      return p;
    };
    if (std::abs(step.x) > 1e-15) out.add(step.x, with_letter('X'));
    if (std::abs(step.y) > 1e-15) out.add(step.y, with_letter('Y'));
    if (std::abs(step.z) > 1e-15) out.add(step.z, with_letter('Z'));
    return out;
  }

  void begin_chain() { pending_chain_start_ = true; }

  void push_segment(SegmentHamiltonian seg, bool correction = false) {
    if (pending_chain_start_) {
      program_.chain_starts.push_back(
          static_cast<int>(program_.segments.size()));
      pending_chain_start_ = false;
    }
    if (correction)
      program_.correction_segments.push_back(
          static_cast<int>(program_.segments.size()));
    program_.segments.push_back(std::move(seg));
  }

  // Appends the plain-segment chain for the axis list.
  void push_chain(const std::vector<AxisStep>& steps, int qubit,
                  const PauliOperator& g_tilde, bool correction = false) {
    begin_chain();
    for (size_t k = 0; k + 1 < steps.size(); ++k) {
      push_segment(SegmentHamiltonian::plain(
                       endpoint(steps[k], qubit, g_tilde),
                       endpoint(steps[k + 1], qubit, g_tilde), schedule()),
                   correction);
    }
  }

  void track_gate(char gate, int qubit) {
    switch (gate) {
      case 'X': group_ = track(group_, CliffordGate::X, {qubit}); break;
      case 'Z': group_ = track(group_, CliffordGate::Z, {qubit}); break;
      case 'S': group_ = track(group_, CliffordGate::S, {qubit}); break;
      case 's': group_ = track(group_, CliffordGate::Sdg, {qubit}); break;
      case 'H': group_ = track(group_, CliffordGate::H, {qubit}); break;
      case 'T':
      case 't': group_ = track_diagonal(group_, qubit); break;
      default: throw InvalidArgument("untrackable gate");
    }
  }

  void multiply_target(const Matrix& op, const std::vector<int>& qubits) {
    target_ops_.push_back({qubits, op});
  }

  // ----- catalog pieces -----

  // Single-qubit catalog gate on `qubit` from a fresh group element, trying
  // the gate's supported element forms in order.
  void single_qubit(char gate, int qubit, std::vector<int> trivial_on = {},
                    bool correction = false) {
    std::string forms = supported_forms(gate);
    PauliOperator element;
    char form = 0;
    for (char f : forms) {
      try {
        element = find_starting_element(
            group_, {.qubit = qubit, .desired = f, .trivial_on = trivial_on});
        form = f;
        break;
      } catch (const SearchFailure&) {
        continue;
      }
    }
    if (form == 0)
      throw SearchFailure(
          std::string("no starting element of any supported form (") + forms +
          ") for gate '" + gate + "' on qubit " + std::to_string(qubit));
    PauliOperator g_tilde = element.with_phase_exp(0);
    g_tilde.set_letter(qubit, 'I');
    push_chain(chain_for(gate, form), qubit, g_tilde, correction);
    track_gate(gate, qubit);
    multiply_target(catalog_matrix(gate, form), {qubit});
  }

  // Diagonal phase correction diag(1, e^{-i k pi/4}) on `qubit`, composed
  // from the fewest catalog diagonal gates.
  void diagonal_correction(int octant, int qubit,
                           std::vector<int> trivial_on = {}) {
    int k = ((octant % 8) + 8) % 8;
    // Relative |1> phases: Z -> -1, s -> -i, t -> e^{-i pi/4},
    //                      S -> +i, T -> e^{+i pi/4}.
    switch (k) {
      case 0: return;
      case 1: single_qubit('t', qubit, trivial_on, true); return;
      case 2: single_qubit('s', qubit, trivial_on, true); return;
      case 3:
        single_qubit('s', qubit, trivial_on, true);
        single_qubit('t', qubit, trivial_on, true);
        return;
      case 4: single_qubit('Z', qubit, trivial_on, true); return;
      case 5:
        single_qubit('Z', qubit, trivial_on, true);
        single_qubit('t', qubit, trivial_on, true);
        return;
      case 6: single_qubit('S', qubit, trivial_on, true); return;
      case 7: single_qubit('T', qubit, trivial_on, true); return;
    }
  }

  // The geometric part the C-NOT segments realize before the diagonal
  // correction on the control: |0><0| (x) I + i^{+-1} |1><1| (x) X.
  std::pair<std::vector<int>, Matrix> pre_correction_factor(
      int control, int target, Complex branch1_phase) const {
    Matrix pre = Matrix::Zero(4, 4);
    std::vector<int> qubits;
    if (control < target) {
      pre(0, 0) = pre(1, 1) = 1;
      pre(2, 3) = pre(3, 2) = branch1_phase;
      qubits = {control, target};
    } else {
      pre(0, 0) = pre(2, 2) = 1;
      pre(1, 3) = pre(3, 1) = branch1_phase;
      qubits = {target, control};
    }
    return {qubits, pre};
  }

  // The conditional flip of the controlled-NOT path between two orthogonal
  // axes a (shared junction) and b (the branch-splitting axis):
  //   -I^c (x) a_t (x) G~  ->  -Z^c (x) b_t (x) G~  (or reversed).
  void cnot_flip_segment(int control, int target, const AxisStep& a,
                         const AxisStep& b, const PauliOperator& g_tilde,
                         bool backward) {
    SegmentHamiltonian::Branch b0, b1;
    b0.start = endpoint(a.negated(), target, g_tilde);
    b0.end = endpoint(b.negated(), target, g_tilde);
    b1.start = endpoint(a.negated(), target, g_tilde);
    b1.end = endpoint(b, target, g_tilde);
    if (backward) {
      std::swap(b0.start, b0.end);
      std::swap(b1.start, b1.end);
    }
    push_segment(SegmentHamiltonian::controlled(control, b0, b1, schedule()));
  }

  /**
   * Controlled-NOT built on a target element of the given form.
   *   Z-form:  prefix -Z -> -Y, flip axis Z;    branch-1 phase +i.
   *   Y-form:  prefix -Y -> -Z, flip axis Y;    branch-1 phase -i.
   *   X-form:  prefix -X -> -Z -> X, then two conditional segments through
   *            the (Z, Y) pair; branch-1 phase +i.
   * The diagonal correction on the control is delegated to
   * `correction_on_control(gate_char)` so callers can route it through a
   * bridge when the control has no element of its own.
   */
  Complex cnot_with_form(int control, int target, char form,
                         const std::function<void(char)>& correction_on_control) {
    PauliOperator element = find_starting_element(
        group_, {.qubit = target, .desired = form, .trivial_on = {control}});
    PauliOperator g_tilde = element.with_phase_exp(0);
    g_tilde.set_letter(target, 'I');

    Complex b1_phase;
    char corr_gate;
    if (form == 'Z') {
      correction_on_control('s');
      push_chain({ax('Z', -1), ax('Y', -1)}, target, g_tilde);
      cnot_flip_segment(control, target, ax('Y', +1), ax('Z', +1), g_tilde,
                        false);
      b1_phase = kI;
      corr_gate = 's';
    } else if (form == 'Y') {
      correction_on_control('S');
      push_chain({ax('Y', -1), ax('Z', -1)}, target, g_tilde);
      cnot_flip_segment(control, target, ax('Z', +1), ax('Y', +1), g_tilde,
                        false);
      b1_phase = -kI;
      corr_gate = 'S';
    } else if (form == 'X') {
      correction_on_control('s');
      push_chain({ax('X', -1), ax('Z', -1), ax('X', +1)}, target, g_tilde);
      // I^c X -> -(|0><0| Z + |1><1| Y) -> -I^c X.
      SegmentHamiltonian::Branch b0, b1;
      b0.start = endpoint(ax('X', +1), target, g_tilde);
      b0.end = endpoint(ax('Z', -1), target, g_tilde);
      b1.start = endpoint(ax('X', +1), target, g_tilde);
      b1.end = endpoint(ax('Y', -1), target, g_tilde);
      push_segment(
          SegmentHamiltonian::controlled(control, b0, b1, schedule()));
      SegmentHamiltonian::Branch c0, c1;
      c0.start = endpoint(ax('Z', -1), target, g_tilde);
      c0.end = endpoint(ax('X', -1), target, g_tilde);
      c1.start = endpoint(ax('Y', -1), target, g_tilde);
      c1.end = endpoint(ax('X', -1), target, g_tilde);
      push_segment(
          SegmentHamiltonian::controlled(control, c0, c1, schedule()));
      b1_phase = kI;
      corr_gate = 's';
    } else {
      throw SearchFailure("controlled-NOT needs a Z-, Y-, or X-form element");
    }
    (void)corr_gate;
    auto [pq, pre] = pre_correction_factor(control, target, b1_phase);
    multiply_target(pre, pq);
    group_ = track(group_, CliffordGate::CNOT, {control, target});
    return b1_phase;
  }

  // Forward C-NOT choosing the cheapest available target form; the
  // correction is a plain catalog gate on the control.
  Complex cnot(int control, int target) {
    return cnot_any_form(control, target, [&](char g) {
      single_qubit(g, control, {}, true);
    });
  }

  Complex cnot_any_form(int control, int target,
                        const std::function<void(char)>& correction) {
    int best_weight = std::numeric_limits<int>::max();
    char best_form = 0;
    for (char f : {'Z', 'Y', 'X'}) {
      try {
        PauliOperator e = find_starting_element(
            group_, {.qubit = target, .desired = f, .trivial_on = {control}});
        if (e.weight() < best_weight) {
          best_weight = e.weight();
          best_form = f;
        }
      } catch (const SearchFailure&) {
      }
    }
    if (best_form == 0)
      throw SearchFailure(
          "no Z-, Y-, or X-form element on the C-NOT target (trivial on the "
          "control)");
    return cnot_with_form(control, target, best_form, correction);
  }

  /**
   * Backward run of the Z-form C-NOT path from a tracked element carrying
   * Z on both the control and the target (the spread element left behind by
   * an earlier C-NOT); every Hamiltonian stays within the element's weight.
   */
  void cnot_backward(int control, int target) {
    PauliOperator element = find_starting_element(
        group_, {.qubit = target,
                 .desired = 'Z',
                 .extra_letters = {{control, 'Z'}}});
    PauliOperator g_tilde = element.with_phase_exp(0);
    g_tilde.set_letter(target, 'I');
    g_tilde.set_letter(control, 'I');
    begin_chain();
    cnot_flip_segment(control, target, ax('Y', +1), ax('Z', +1), g_tilde,
                      true);
    push_chain({ax('Y', -1), ax('Z', -1)}, target, g_tilde);
    auto [pq, pre] = pre_correction_factor(control, target, kI);
    multiply_target(pre.adjoint(), pq);
    single_qubit('S', control, {}, true);
    group_ = track(group_, CliffordGate::CNOT, {control, target});
  }

  // ----- identity-start bridge -----

  /**
   * Single-qubit gate on `qubit` whose starting Hamiltonian acts trivially
   * there, bridged through a shared-state element on `bridge_qubit`: the
   * element is first carried to a Z-form on `qubit`, the gate path runs
   * with the bridged factor shared, and the bridge is undone. Net effect:
   * the catalog gate on `qubit` alone.
   */
  void single_qubit_via_identity(char gate, int qubit,
                                 std::vector<int> bridge_candidates) {
    PauliOperator element;
    char bridge_letter = 0;
    int best_weight = std::numeric_limits<int>::max();
    for (int bq : bridge_candidates) {
      for (char f : {'X', 'Z', 'Y'}) {
        try {
          PauliOperator e = find_starting_element(
              group_, {.qubit = bq, .desired = f, .trivial_on = {qubit}});
          if (e.weight() < best_weight) {
            best_weight = e.weight();
            element = e;
            bridge_letter = f;
          }
        } catch (const SearchFailure&) {
        }
      }
    }
    if (bridge_letter == 0)
      throw SearchFailure("no bridge element for the identity-start path");
    int bridge_qubit = -1;
    for (int bq : bridge_candidates)
      if (element.letter(bq) != 'I' && bridge_qubit < 0) bridge_qubit = bq;
    char partner = bridge_letter == 'X' ? 'Z' : 'X';

    PauliOperator bridged = element.with_phase_exp(0);
    bridged.set_letter(bridge_qubit, partner);

    PauliSum outer;
    outer.add(-1.0, element.with_phase_exp(0));
    PauliSum inner;
    {
      PauliOperator p = bridged;
      p.set_letter(qubit, 'Z');
      inner.add(-1.0, p);
    }
    begin_chain();
    push_segment(SegmentHamiltonian::plain(outer, inner, schedule()));
    auto steps = chain_for(gate, 'Z');
    for (size_t k = 0; k + 1 < steps.size(); ++k)
      push_segment(SegmentHamiltonian::plain(
          endpoint(steps[k], qubit, bridged),
          endpoint(steps[k + 1], qubit, bridged), schedule()));
    // Undo the bridge from wherever the gate path ended.
    PauliSum last = endpoint(steps.back(), qubit, bridged);
    push_segment(SegmentHamiltonian::plain(last, outer, schedule()));

    track_gate(gate, qubit);
    multiply_target(catalog_matrix(gate, 'Z'), {qubit});
  }

  // ----- program assembly -----

  PathProgram finish(std::vector<int> target_qubits,
                     std::optional<TargetFactor> pre_correction = {}) {
    program_.group_after = group_;
    program_.pre_correction_target = std::move(pre_correction);
    program_.target = collapse_target(std::move(target_qubits));
    program_.validate();
    return program_;
  }

  PathProgram finish_with_factors(std::vector<TargetFactor> factors) {
    program_.group_after = group_;
    program_.target = std::move(factors);
    program_.validate();
    return program_;
  }

  const TrackedGroup& group() const { return group_; }
  TrackedGroup& group() { return group_; }
  PathProgram& raw_program() { return program_; }

  // Multiplies the accumulated per-gate factors into one matrix on the
  // requested target register, verifying everything else stayed put.
  std::vector<TargetFactor> collapse_target(std::vector<int> target_qubits) {
    if (target_qubits.empty()) return {};
    int m = static_cast<int>(target_qubits.size());
    Eigen::Index dim = Eigen::Index{1} << m;
    Matrix acc = Matrix::Identity(dim, dim);
    for (const auto& factor : target_ops_) {
      std::vector<int> positions;
      for (int q : factor.qubits) {
        auto it = std::find(target_qubits.begin(), target_qubits.end(), q);
        if (it == target_qubits.end())
          throw InvalidArgument(
              "a compiled gate acts outside the declared target register");
        positions.push_back(static_cast<int>(it - target_qubits.begin()));
      }
      acc = dense_embed(factor.op, positions, m) * acc;
    }
    return {TargetFactor{std::move(target_qubits), std::move(acc)}};
  }

 private:
  TrackedGroup group_;
  CompileOptions opt_;
  PathProgram program_;
  std::vector<TargetFactor> target_ops_;
  bool pending_chain_start_ = true;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Default contexts
// ---------------------------------------------------------------------------

/** A single fresh qubit stabilized by Z. */
inline TrackedGroup single_qubit_context() {
  TrackedGroup g;
  g.n = 1;
  g.block_map = {0};
  g.elements = {PauliOperator::parse("Z")};
  return g;
}

/** Control, target, and one shared partner qubit: <Z_c Z_g, Z_t Z_g>. */
inline TrackedGroup cnot_toy_context() {
  TrackedGroup g;
  g.n = 3;
  g.block_map = {0, 0, 0};
  g.elements = {PauliOperator::parse("ZIZ"), PauliOperator::parse("IZZ")};
  return g;
}

/** m fresh qubits, each stabilized by its own Z. */
inline TrackedGroup fresh_qubits_context(int m) {
  TrackedGroup g;
  g.n = m;
  g.block_map.assign(m, 0);
  for (int q = 0; q < m; ++q)
    g.elements.push_back(PauliOperator::single(m, q, 'Z'));
  return g;
}

/** The group of a prepared m-qubit cat state: Z_i Z_{i+1} pairs and X...X. */
inline TrackedGroup cat_state_context(int m) {
  TrackedGroup g;
  g.n = m;
  g.block_map.assign(m, 0);
  for (int i = 0; i + 1 < m; ++i) {
    PauliOperator zz = PauliOperator::identity(m);
    zz.set_letter(i, 'Z');
    zz.set_letter(i + 1, 'Z');
    g.elements.push_back(zz);
  }
  PauliOperator xs(m, 0, 0, 0);
  for (int q = 0; q < m; ++q) xs.set_letter(q, 'X');
  g.elements.push_back(xs);
  return g;
}

// ---------------------------------------------------------------------------
// Catalog compilation
// ---------------------------------------------------------------------------

/** gate in {'X','Z','S','s','H','T','t'} ('s' = S dagger, 't' = T dagger). */
inline PathProgram compile_single_qubit(char gate, const TrackedGroup& ctx,
                                        int qubit, CompileOptions opt = {}) {
  detail::Compiler c(ctx, opt);
  c.single_qubit(gate, qubit);
  PathProgram p = c.finish({qubit});
  p.description = std::string("single-qubit ") + gate;
  return p;
}

inline PathProgram compile_cnot(const TrackedGroup& ctx, int control,
                                int target, CompileOptions opt = {},
                                bool backward = false) {
  detail::Compiler c(ctx, opt);
  Complex phase = backward ? -kI : c.cnot(control, target);
  if (backward) c.cnot_backward(control, target);
  auto [tq, pre] = c.pre_correction_factor(control, target, phase);
  PathProgram p = c.finish(tq, TargetFactor{tq, pre});
  p.description = backward ? "cnot (backward run)" : "cnot";
  return p;
}

inline PathProgram compile_cnot_xform(const TrackedGroup& ctx, int control,
                                      int target, CompileOptions opt = {}) {
  detail::Compiler c(ctx, opt);
  Complex phase = c.cnot_with_form(control, target, 'X', [&](char g) {
    c.single_qubit(g, control, {target}, true);
  });
  auto [tq, pre] = c.pre_correction_factor(control, target, phase);
  PathProgram p = c.finish(tq, TargetFactor{tq, pre});
  p.description = "cnot (x-form)";
  return p;
}

/**
 * Conditional single-qubit Clifford on `qubit`, conditioned on the control
 * being |1>: every path segment is wrapped so the |0> branch pins the
 * original element while the |1> branch walks the path, with the branch
 * levels normalized to stay degenerate. The residual catalog phase is
 * corrected with diagonal gates on the control.
 */
inline PathProgram compile_conditional(char gate, const TrackedGroup& ctx,
                                       int control, int qubit,
                                       CompileOptions opt = {}) {
  if (gate == 'T' || gate == 't')
    throw InvalidArgument("conditional gates must be Clifford");
  detail::Compiler c(ctx, opt);

  PauliOperator element;
  PauliOperator branch0_element;
  int start_sign = -1, sign0 = -1;
  char form = 0;
  // A prior conditional operation may have left a projector-split element
  // whose |1> branch supplies the starting Hamiltonian.
  for (const auto& ce : ctx.conditional_elements) {
    if (ce.control != control) continue;
    char letter = ce.branch1.letter(qubit);
    if (letter == 'Z' || letter == 'X' || letter == 'Y') {
      try {
        (void)detail::chain_for(gate, letter);
      } catch (const SearchFailure&) {
        continue;
      }
      element = ce.branch1.with_phase_exp(0);
      start_sign = ce.branch1.phase_exp() == 2 ? +1 : -1;
      branch0_element = ce.branch0.with_phase_exp(0);
      sign0 = ce.branch0.phase_exp() == 2 ? +1 : -1;
      form = letter;
      break;
    }
  }
  if (form == 0) {
    std::string forms = detail::supported_forms(gate);
    for (char f : forms) {
      try {
        element = find_starting_element(
            c.group(),
            {.qubit = qubit, .desired = f, .trivial_on = {control}});
        form = f;
        break;
      } catch (const SearchFailure&) {
      }
    }
    if (form == 0)
      throw SearchFailure("no conditional starting element of any form");
    branch0_element = element;
  }

  PauliOperator g_tilde = element.with_phase_exp(0);
  g_tilde.set_letter(qubit, 'I');
  PauliSum pinned;
  pinned.add(sign0, branch0_element.with_phase_exp(0));

  auto steps = detail::chain_for(gate, form);
  if (start_sign > 0)
    for (auto& s : steps) s = s.negated();
  c.begin_chain();
  for (size_t k = 0; k + 1 < steps.size(); ++k) {
    SegmentHamiltonian::Branch b0, b1;
    b0.start = pinned;
    b0.end = pinned;
    b1.start = c.endpoint(steps[k], qubit, g_tilde);
    b1.end = c.endpoint(steps[k + 1], qubit, g_tilde);
    c.push_segment(SegmentHamiltonian::controlled(control, b0, b1,
                                                  c.schedule(), true));
  }

  CliffordGate cg = gate == 'X'   ? CliffordGate::X
                    : gate == 'Z' ? CliffordGate::Z
                    : gate == 'S' ? CliffordGate::S
                    : gate == 's' ? CliffordGate::Sdg
                                  : CliffordGate::H;
  c.group() = track_conditional(c.group(), cg, {qubit}, control);

  // The |1> branch realized e^{i phi} O; cancel phi with diagonal gates on
  // the control.
  c.diagonal_correction(detail::catalog_phase_octant(gate, form), control,
                        {qubit});

  std::vector<int> tq = control < qubit ? std::vector<int>{control, qubit}
                                        : std::vector<int>{qubit, control};
  Matrix o_ideal = detail::plain_matrix(gate);
  Matrix ideal = Matrix::Zero(4, 4);
  if (control < qubit) {
    ideal.block(0, 0, 2, 2) = Matrix::Identity(2, 2);
    ideal.block(2, 2, 2, 2) = o_ideal;
  } else {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        ideal(a * 2, b * 2) = a == b ? 1.0 : 0.0;
        ideal(a * 2 + 1, b * 2 + 1) = o_ideal(a, b);
      }
  }
  PathProgram p = c.finish_with_factors({TargetFactor{tq, ideal}});
  p.description = std::string("conditional ") + gate;
  return p;
}

/**
 * Prepares the m-qubit GHZ-type shared state from |0...0>: each qubit is
 * rotated to |+> along -Z -> -X, then qubit j > 0 is locked to qubit 0 via
 * -I_0 X_j -> -Z_0 Z_j.
 */
inline PathProgram compile_cat_prep(int m, CompileOptions opt = {}) {
  if (m < 2) throw InvalidArgument("shared state needs at least 2 qubits");
  detail::Compiler c(fresh_qubits_context(m), opt);
  for (int q = 0; q < m; ++q) {
    PauliOperator g_tilde = PauliOperator::identity(m);
    c.push_chain({detail::ax('Z', -1), detail::ax('X', -1)}, q, g_tilde);
    // V^{0+} = H Z as a tableau action.
    c.group() = track(c.group(), CliffordGate::Z, {q});
    c.group() = track(c.group(), CliffordGate::H, {q});
    Matrix v(2, 2);
    v << 1, -1, 1, 1;
    c.multiply_target(v / std::sqrt(2.0), {q});
  }
  for (int j = 1; j < m; ++j) {
    PauliSum start, end;
    start.add(-1.0, PauliOperator::single(m, j, 'X'));
    PauliOperator zz = PauliOperator::identity(m);
    zz.set_letter(0, 'Z');
    zz.set_letter(j, 'Z');
    end.add(-1.0, zz);
    c.begin_chain();
    c.push_segment(SegmentHamiltonian::plain(start, end, c.schedule()));
    // exp(i pi/4 Z_0 Y_j): X_j -> Z_0 Z_j, Z_j -> -Z_0 X_j, X_0 -> -Y_0 Y_j.
    std::map<int, QubitImages> images;
    PauliOperator yy = PauliOperator::identity(m);
    yy.set_letter(0, 'Y');
    yy.set_letter(j, 'Y');
    images[0] = {yy.with_phase_exp(2), PauliOperator::single(m, 0, 'Z')};
    PauliOperator zx = PauliOperator::identity(m);
    zx.set_letter(0, 'Z');
    zx.set_letter(j, 'X');
    images[j] = {zz.with_phase_exp(0), zx.with_phase_exp(2)};
    for (auto& e : c.group().elements) e = conjugate_via_images(e, images);
    Matrix u = Matrix::Zero(4, 4);
    Matrix a(2, 2);
    a << 1, 1, -1, 1;  // exp(i pi Y / 4)
    a /= std::sqrt(2.0);
    u.block(0, 0, 2, 2) = a;
    u.block(2, 2, 2, 2) = a.adjoint();
    c.multiply_target(u, {0, j});
  }
  std::vector<int> all;
  for (int q = 0; q < m; ++q) all.push_back(q);
  PathProgram p = c.finish(all);
  p.description = "shared-state preparation";
  return p;
}

/**
 * Parity readout primitive: C-NOTs from two shared-state qubits onto one
 * ancilla prepared in |0>. The second C-NOT reuses the same interaction
 * even though the ancilla state is then unknown. Context: `m` shared-state
 * qubits (indices 0..m-1) plus the ancilla as qubit m.
 */
inline PathProgram compile_cat_parity(int m, int qubit_i, int qubit_j,
                                      CompileOptions opt = {}) {
  TrackedGroup ctx = cat_state_context(m).tensor(fresh_qubits_context(1));
  int ancilla = m;
  detail::Compiler c(ctx, opt);
  c.cnot(qubit_i, ancilla);
  c.cnot(qubit_j, ancilla);
  std::vector<int> tq = {qubit_i, qubit_j, ancilla};
  std::sort(tq.begin(), tq.end());
  PathProgram p = c.finish(tq);
  p.description = "parity readout";
  return p;
}

// ---------------------------------------------------------------------------
// The three-qubit non-Clifford block
// ---------------------------------------------------------------------------

/** Dense 8x8 Toffoli, controls on qubits 0 and 1, target on qubit 2. */
inline Matrix toffoli_matrix() {
  Matrix t = Matrix::Identity(8, 8);
  t(6, 6) = t(7, 7) = 0;
  t(6, 7) = t(7, 6) = 1;
  return t;
}

/**
 * The flipped-control gate word realizing the Toffoli from one- and
 * two-qubit gates (every C-NOT points at qubit 0 or 1 so its control sits
 * on qubit 2 or 1), in chronological order.
 */
struct WordOp {
  char gate;  // 'H','S','T','t','C'
  int a;      // qubit (or control for 'C')
  int b;      // target for 'C'
};

inline std::vector<WordOp> toffoli_word() {
  // Chronological order (rightmost factor of the operator product first).
  return {
      {'T', 0, -1}, {'H', 0, -1}, {'S', 1, -1}, {'H', 1, -1}, {'C', 1, 0},
      {'H', 1, -1}, {'t', 1, -1}, {'H', 1, -1}, {'C', 1, 0},  {'H', 1, -1},
      {'t', 1, -1}, {'H', 1, -1}, {'H', 2, -1}, {'T', 2, -1}, {'H', 2, -1},
      {'C', 2, 0},  {'H', 2, -1}, {'t', 2, -1}, {'H', 2, -1}, {'C', 2, 1},
      {'H', 2, -1}, {'T', 2, -1}, {'H', 2, -1}, {'C', 2, 0},  {'H', 0, -1},
      {'H', 2, -1}, {'t', 2, -1}, {'H', 2, -1}, {'C', 2, 1},  {'H', 1, -1},
  };
}

/** Dense product of the word; equals the Toffoli up to a global phase. */
inline Matrix toffoli_word_matrix() {
  Matrix acc = Matrix::Identity(8, 8);
  Matrix t_gate(2, 2), tdg(2, 2);
  t_gate << 1, 0, 0, std::polar(1.0, M_PI / 4);
  tdg << 1, 0, 0, std::polar(1.0, -M_PI / 4);
  for (const auto& op : toffoli_word()) {
    Matrix u;
    std::vector<int> qubits;
    switch (op.gate) {
      case 'H': u = clifford_matrix(CliffordGate::H); qubits = {op.a}; break;
      case 'S': u = clifford_matrix(CliffordGate::S); qubits = {op.a}; break;
      case 'T': u = t_gate; qubits = {op.a}; break;
      case 't': u = tdg; qubits = {op.a}; break;
      case 'C': {
        Matrix cn = clifford_matrix(CliffordGate::CNOT);
        if (op.a < op.b) {
          u = cn;
          qubits = {op.a, op.b};
        } else {
          u = Matrix::Zero(4, 4);
          for (int r = 0; r < 4; ++r)
            for (int c2 = 0; c2 < 4; ++c2) {
              int rr = ((r & 1) << 1) | (r >> 1);
              int cc = ((c2 & 1) << 1) | (c2 >> 1);
              u(rr, cc) = cn(r, c2);
            }
          qubits = {op.b, op.a};
        }
        break;
      }
      default: throw InvalidArgument("bad word op");
    }
    acc = dense_embed(u, qubits, 3) * acc;
  }
  return acc;
}

/** Checks the flip identity and the gate word against the dense Toffoli. */
inline bool toffoli_identity_check(double* max_deviation = nullptr) {
  // (H (x) H) C_{0,1} (H (x) H) = C_{1,0}.
  Matrix h = clifford_matrix(CliffordGate::H);
  Matrix hh = kron(h, h);
  Matrix c01 = clifford_matrix(CliffordGate::CNOT);
  Matrix c10 = Matrix::Zero(4, 4);
  c10(0, 0) = c10(2, 2) = 1;
  c10(1, 3) = c10(3, 1) = 1;
  double dev1 = (hh * c01 * hh - c10).cwiseAbs().maxCoeff();

  Matrix word = toffoli_word_matrix();
  double dev2 = phase_aligned_distance(toffoli_matrix(), word);

  Matrix sq = toffoli_matrix() * toffoli_matrix();
  double dev3 = (sq - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff();

  double dev = std::max({dev1, dev2, dev3});
  if (max_deviation) *max_deviation = dev;
  return dev < 1e-12;
}

/**
 * Context for the shared-state-conditioned Toffoli: qubit 0 is the shared
 * ("cat") qubit with partner 1; qubits 2 and 4 are the data qubits with
 * weight-2 partner elements on 3 and 5. The tracked working set is the
 * Z-type shared pair plus one partner element per data qubit; the physical
 * shared-state stabilizer also contains X(x)X, but the pi/8 gates on qubit
 * 0 would carry it outside the Pauli group, so it is not tracked.
 */
inline TrackedGroup toffoli_context() {
  TrackedGroup g;
  g.n = 6;
  g.block_map = {0, 0, 1, 1, 2, 2};
  g.elements = {PauliOperator::parse("ZZIIII"),
                PauliOperator::parse("IIZZII"),
                PauliOperator::parse("IIIIXX")};
  return g;
}

/**
 * Compiles the transversal Toffoli (controls: shared qubit 0 and data qubit
 * 2; target: data qubit 4) from the gate word, using weight <= 3
 * Hamiltonians throughout. The word's C-NOTs are rearranged so every one
 * touches the shared qubit: data-targeting C-NOTs are flipped with the
 * Hadamard identity, and the data-to-data C-NOT is routed through the
 * shared qubit as C_{a,b} = C_{a,0} C_{0,b} C_{a,0} C_{0,b}. Diagonal
 * corrections land either on the shared qubit (whose pi/8 gate precedes
 * everything) or on a data qubit after its last pi/8 gate, and are bridged
 * through whichever other element is available, so the tracked working set
 * stays inside the Pauli group for every element the compilation consumes.
 */
inline PathProgram compile_toffoli_on_cat(CompileOptions opt = {}) {
  detail::Compiler c(toffoli_context(), opt);
  auto phys = [](int wq) { return wq == 0 ? 0 : (wq == 1 ? 2 : 4); };

  // Bridge candidates: everything except the qubit being operated on.
  auto bridges_for = [](int q) {
    std::vector<int> out;
    for (int cand : {0, 2, 4})
      if (cand != q) out.push_back(cand);
    return out;
  };
  auto correction_on = [&](int control) {
    return [&c, control, &bridges_for](char g) {
      c.single_qubit_via_identity(g, control, bridges_for(control));
    };
  };

  auto flipped_cnot = [&](int control, int target) {
    // C_{control,target} = (H (x) H) C_{target,control} (H (x) H).
    auto h_on = [&](int q) {
      if (q == 0)
        c.single_qubit('H', 0);
      else
        c.single_qubit_via_identity('H', q, bridges_for(q));
    };
    h_on(control);
    h_on(target);
    c.cnot_any_form(target, control, correction_on(target));
    h_on(control);
    h_on(target);
  };

  for (const auto& op : toffoli_word()) {
    if (op.gate == 'C') {
      int control = phys(op.a);
      int target = phys(op.b);
      if (target == 0) {
        // Data-control onto the shared qubit: flip so the shared qubit
        // controls and the data qubit is the target.
        flipped_cnot(control, 0);
      } else {
        // Data-to-data: route through the shared qubit.
        c.cnot_any_form(0, target, correction_on(0));
        flipped_cnot(control, 0);
        c.cnot_any_form(0, target, correction_on(0));
        flipped_cnot(control, 0);
      }
    } else if (op.a == 0) {
      c.single_qubit(op.gate, 0);
    } else {
      c.single_qubit_via_identity(op.gate, phys(op.a),
                                  bridges_for(phys(op.a)));
    }
  }
  PathProgram p = c.finish({0, 2, 4});
  p.description = "toffoli conditioned on the shared state";
  Matrix toff = toffoli_matrix();
  if (phase_aligned_distance(p.target.front().op, toff) > 1e-9)
    throw AccuracyError("gate word did not multiply to the Toffoli");
  p.target.front().op = toff;
  return p;
}

// ---------------------------------------------------------------------------
// Encoded-level programs on the 3x3 subsystem code
// ---------------------------------------------------------------------------

/**
 * Bitwise encoded Pauli: 'Z' walks the first column, 'X' the first row,
 * each via the weight-2 row/column elements.
 */
inline PathProgram compile_encoded_pauli(char gate, const CodeSpec& code,
                                         CompileOptions opt = {}) {
  if (gate != 'Z' && gate != 'X')
    throw InvalidArgument("encoded program supports X or Z");
  detail::Compiler c(TrackedGroup::from_code(code), opt);
  std::vector<int> qubits;
  for (int k = 0; k < 3; ++k)
    qubits.push_back(gate == 'Z' ? code.qubit_at(k, 0) : code.qubit_at(0, k));
  for (int q : qubits) c.single_qubit(gate, q);
  PathProgram p = c.finish(qubits);
  p.description = std::string("encoded ") + gate;
  return p;
}

/**
 * Transversal C-NOT between two code blocks (target block qubits 0..8,
 * control block qubits 9..17). The first C-NOT of each row runs forward
 * from the fresh weight-2 element; later columns run the path backward
 * from the tracked weight-3 element, keeping every Hamiltonian at weight
 * <= 3.
 */
inline PathProgram compile_transversal_cnot(const CodeSpec& code,
                                            CompileOptions opt = {}) {
  TrackedGroup both = TrackedGroup::from_code(code, 0).tensor(
      TrackedGroup::from_code(code, 1));
  detail::Compiler c(both, opt);
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) {
      int target = code.qubit_at(row, col);
      int control = 9 + code.qubit_at(row, col);
      if (col == 0)
        c.cnot(control, target);
      else
        c.cnot_backward(control, target);
    }
  }
  PathProgram p = c.finish_with_factors({});
  Matrix cn_swapped = Matrix::Zero(4, 4);
  cn_swapped(0, 0) = cn_swapped(2, 2) = 1;
  cn_swapped(1, 3) = cn_swapped(3, 1) = 1;  // control = second listed qubit
  for (int q = 0; q < 9; ++q)
    p.target.push_back(TargetFactor{{q, 9 + q}, cn_swapped});
  p.description = "transversal cnot";
  return p;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

struct VerifyOptions {
  int samples = 512;          // transport sampling per segment
  bool finite_time = false;   // integrate instead of transporting
  double T_over_Td = 50.0;    // segment time in dynamical-gate units
  int steps = 4096;           // integration steps per segment
  bool skip_corrections = false;  // evaluate the pre-correction part only
};

/** Product of per-segment geometric parts on the program register. */
inline Matrix program_geometric_part(const PathProgram& program,
                                     const VerifyOptions& opt = {}) {
  check_dense_capacity(program.n);
  Eigen::Index dim = Eigen::Index{1} << program.n;
  Matrix acc = Matrix::Identity(dim, dim);
  for (size_t k = 0; k < program.segments.size(); ++k) {
    if (opt.skip_corrections) {
      bool is_corr = false;
      for (int idx : program.correction_segments)
        if (idx == static_cast<int>(k)) is_corr = true;
      if (is_corr) continue;
    }
    SegmentHamiltonian seg = program.segments[k];
    if (opt.finite_time) {
      seg.schedule = Schedule(seg.schedule.kind(), opt.T_over_Td * M_PI / 2.0,
                              seg.schedule.bump_reparam());
      EvolutionResult result = evolve_segment(seg, opt.steps);
      acc = dense_embed(geometric_part(result), seg.support(), program.n) *
            acc;
    } else {
      SegmentOperator op = exact_adiabatic_transport(seg, opt.samples);
      acc = dense_embed(op.op, op.support, program.n) * acc;
    }
  }
  return acc;
}

struct FidelityReport {
  double fidelity = 0.0;
  // Max entrywise deviation from the declared pre-correction form (no
  // global-phase slack; the form's phases are physical).
  double pre_correction_distance = std::numeric_limits<double>::quiet_NaN();
  double unitarity_defect = 0.0;
  double diabatic_error = 0.0;
};

inline Matrix expand_target(const PathProgram& program) {
  Eigen::Index dim = Eigen::Index{1} << program.n;
  Matrix t = Matrix::Identity(dim, dim);
  for (const auto& factor : program.target)
    t = dense_embed(factor.op, factor.qubits, program.n) * t;
  return t;
}

inline FidelityReport verify(const PathProgram& program,
                             VerifyOptions opt = {}) {
  FidelityReport report;
  Matrix geo = program_geometric_part(program, opt);
  report.unitarity_defect = unitarity_defect(geo);
  report.fidelity = phase_fidelity(expand_target(program), geo);
  if (program.pre_correction_target) {
    VerifyOptions pre_opt = opt;
    pre_opt.skip_corrections = true;
    Matrix pre_geo = program_geometric_part(program, pre_opt);
    Matrix pre = dense_embed(program.pre_correction_target->op,
                             program.pre_correction_target->qubits,
                             program.n);
    report.pre_correction_distance = (pre - pre_geo).cwiseAbs().maxCoeff();
  }
  if (opt.finite_time) {
    double worst = 0.0;
    for (const auto& seg_in : program.segments) {
      SegmentHamiltonian seg = seg_in;
      seg.schedule = Schedule(seg.schedule.kind(), opt.T_over_Td * M_PI / 2.0,
                              seg.schedule.bump_reparam());
      EvolutionResult result = evolve_segment(seg, opt.steps);
      worst = std::max(worst, result.diabatic_error);
    }
    report.diabatic_error = worst;
  }
  return report;
}

}  // namespace holonome
