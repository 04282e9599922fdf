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

#include "holonome/evolution.hpp"

namespace holonome {

/**
 * A sampled path of orthonormal frames of one tracked eigenspace. Each frame
 * is a D x d matrix with orthonormal columns; `single_valued` marks closed
 * loops whose final frame equals the initial one.
 */
struct EigenFramePath {
  std::vector<double> times;
  std::vector<Matrix> frames;
  bool single_valued = false;

  void validate() const {
    if (frames.size() < 2)
      throw InvalidArgument("a frame path needs at least two samples");
    if (times.size() != frames.size())
      throw InvalidArgument("times and frames must align");
    for (const auto& f : frames) {
      Matrix g = f.adjoint() * f;
      if ((g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() >
          1e-12)
        throw InvalidArgument("frames must be orthonormal to 1e-12");
    }
    if (single_valued &&
        (frames.front() - frames.back()).cwiseAbs().maxCoeff() > 1e-9)
      throw InvalidArgument("single-valued path must close exactly");
  }
};

/**
 * Discrete parallel transport along the frame path: per step the transported
 * frame is projected onto the next subspace and re-unitarized through the
 * polar factor of the overlap. Returns the d x d transport matrix expressed
 * in the initial frame. For closed single-valued paths the result is the
 * loop holonomy and is invariant under interior gauge changes.
 */
inline Matrix transport(const EigenFramePath& path) {
  path.validate();
  Matrix moving = path.frames.front();
  for (size_t k = 1; k < path.frames.size(); ++k) {
    Matrix overlap = path.frames[k].adjoint() * moving;
    Eigen::JacobiSVD<Matrix> svd(overlap,
                                 Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues().minCoeff() < 1e-6)
      throw OrthogonalSubspaceError(
          "adjacent frames are (nearly) orthogonal; refine the sampling");
    moving = path.frames[k] * (svd.matrixU() * svd.matrixV().adjoint());
  }
  return path.frames.back().adjoint() * moving;
}

/**
 * Gauge fixing for open paths: the frame of the final subspace most parallel
 * to `initial`, i.e. final * polar_unitary(final^dag initial). Undefined
 * (throws) when the subspaces are orthogonal in some direction.
 */
inline Matrix most_parallel_frame(const Matrix& initial, const Matrix& final_) {
  Matrix overlap = final_.adjoint() * initial;
  Eigen::JacobiSVD<Matrix> svd(overlap,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() < 1e-8)
    throw OrthogonalSubspaceError(
        "final subspace is orthogonal to the initial one; no gauge-invariant "
        "open-path transformation exists");
  return final_ * (svd.matrixU() * svd.matrixV().adjoint());
}

/**
 * Per-state transport phases of one segment: for each frame column, the sum
 * of log phases of the step overlaps <chi_{k+1}|chi_k>. This accumulates
 * -int <chi|d/ds|chi> ds, the quantity whose exponential multiplies the
 * transported state; the imaginary part is normalized to (-pi, pi].
 */
inline std::vector<Complex> berry_phase_segment(const EigenFramePath& path) {
  path.validate();
  int d = static_cast<int>(path.frames.front().cols());
  std::vector<Complex> acc(d, Complex(0, 0));
  for (size_t k = 1; k < path.frames.size(); ++k) {
    for (int j = 0; j < d; ++j) {
      Complex ov = path.frames[k].col(j).dot(path.frames[k - 1].col(j));
      if (std::abs(ov) < 1e-9)
        throw OrthogonalSubspaceError("frame column jumped between samples");
      acc[j] += std::log(ov / std::abs(ov));
    }
  }
  for (auto& a : acc) {
    double im = std::remainder(a.imag(), 2 * M_PI);
    if (im <= -M_PI + 1e-15) im += 2 * M_PI;
    a = Complex(0.0, im);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Closed-form frames for the four-segment phase-flip loop
//   -Z -> -X -> Z -> Y -> -Z
// in the two-level reduction, for both interpolations. Level 0 follows
// |0> -> |f+^0> -> |1> -> |f-^(pi/2)> -> |0>, level 1 the orthogonal chain,
// with the junction phases fixed so the loop is single-valued. The gauge
// functions are the simplest differentiable choices (linear in s).
// ---------------------------------------------------------------------------

/** Eigenvector for the linear interpolation; segment in 0..3, level in 0..1. */
inline Vector z_loop_linear_frame(int segment, int level, double s) {
  if (segment < 0 || segment > 3 || level < 0 || level > 1 || s < -1e-12 ||
      s > 1 + 1e-12)
    throw InvalidArgument("segment in 0..3, level in 0..1, s in [0,1]");
  double c = 1.0 - s;
  double e = std::sqrt(c * c + s * s);
  double n1 = std::sqrt((c + e) * (c + e) + s * s);
  double n2 = std::sqrt(c * c + (s + e) * (s + e));
  Vector v(2);
  switch (segment) {
    case 0:  // H = (1-s) Z + s X
      if (level == 0) {
        v << (c + e) / n1, s / n1;
      } else {
        v << -s / n1, (c + e) / n1;
        v *= std::polar(1.0, M_PI * s);
      }
      return v;
    case 1:  // H = (1-s) X - s Z
      if (level == 0) {
        v << c / n2, (s + e) / n2;
      } else {
        v << (s + e) / n2, -c / n2;
      }
      return v;
    case 2:  // H = -(1-s) Z - s Y
      if (level == 0) {
        v << s / n1, -kI * (c + e) / n1;
        v *= std::polar(1.0, M_PI / 2.0 * (1.0 - s));
      } else {
        v << (c + e) / n1, kI * s / n1;
      }
      return v;
    case 3:  // H = -(1-s) Y + s Z
      if (level == 0) {
        v << (s + e) / n2, -kI * c / n2;
      } else {
        v << c / n2, kI * (s + e) / n2;
        v *= std::polar(1.0, -M_PI / 2.0 * s);
      }
      return v;
  }
  throw InvalidArgument("unreachable");
}

/** Eigenvector for the unitary (trigonometric) interpolation. */
inline Vector z_loop_trig_frame(int segment, int level, double s) {
  if (segment < 0 || segment > 3 || level < 0 || level > 1 || s < -1e-12 ||
      s > 1 + 1e-12)
    throw InvalidArgument("segment in 0..3, level in 0..1, s in [0,1]");
  double quarter = M_PI / 4.0;
  Vector v(2);
  if (segment < 2) {
    // Rotation about Y from Z through X; angle pi/4 per segment.
    double ang = quarter * (segment + s);
    if (level == 0) {
      v << std::cos(ang), std::sin(ang);
    } else {
      v << -std::sin(ang), std::cos(ang);
      if (segment == 0)
        v *= std::polar(1.0, M_PI * s);  // reach |f-^0> with + sign
      else
        v *= -1.0;
    }
    return v;
  }
  // Rotation about X from -Z through -Y; chi0 continues from |1>.
  double ang = quarter * (segment - 2 + s);
  if (level == 0) {
    v << kI * std::sin(ang), std::cos(ang);
    if (segment == 2)
      v *= std::polar(1.0, -M_PI / 2.0 * s);
    else
      v *= std::polar(1.0, -M_PI / 2.0);
  } else {
    v << std::cos(ang), kI * std::sin(ang);
    if (segment == 3) v *= std::polar(1.0, -M_PI / 2.0 * s);
  }
  return v;
}

namespace detail {

// The chi pair alone spans all of C^2, where subspace transport is trivial;
// the physical object is the ground space of -H(s) (x) Z on two qubits,
// spanned by chi0 (x) |0~> and chi1 (x) |1~>. Frames are emitted there.
inline Matrix z_loop_ground_frame(Vector (*frame_fn)(int, int, double),
                                  int segment, double s) {
  Matrix f = Matrix::Zero(4, 2);
  Vector chi0 = frame_fn(segment, 0, s);
  Vector chi1 = frame_fn(segment, 1, s);
  f(0, 0) = chi0(0);  // |0>|0~>
  f(2, 0) = chi0(1);  // |1>|0~>
  f(1, 1) = chi1(0);  // |0>|1~>
  f(3, 1) = chi1(1);  // |1>|1~>
  return f;
}

}  // namespace detail

/**
 * The full single-valued frame path of the phase-flip loop, `samples`
 * points per segment. Columns track (chi0 (x) |0~>, chi1 (x) |1~>), the
 * ground space of the two-qubit Hamiltonian with the shared factor Z.
 */
inline EigenFramePath z_loop_frame_path(ScheduleKind interp, int samples) {
  if (samples < 2) throw InvalidArgument("need at least 2 samples");
  auto frame_fn = interp == ScheduleKind::linear ? z_loop_linear_frame
                                                 : z_loop_trig_frame;
  EigenFramePath path;
  path.single_valued = true;
  for (int seg = 0; seg < 4; ++seg) {
    int first = seg == 0 ? 0 : 1;  // junction sample shared with previous
    for (int k = first; k <= samples; ++k) {
      double s = static_cast<double>(k) / samples;
      path.times.push_back(seg + s);
      path.frames.push_back(detail::z_loop_ground_frame(frame_fn, seg, s));
    }
  }
  return path;
}

/** One segment's chunk of the loop path (for per-segment phases). */
inline EigenFramePath z_loop_segment_path(ScheduleKind interp, int segment,
                                          int samples) {
  auto frame_fn = interp == ScheduleKind::linear ? z_loop_linear_frame
                                                 : z_loop_trig_frame;
  EigenFramePath path;
  for (int k = 0; k <= samples; ++k) {
    double s = static_cast<double>(k) / samples;
    path.times.push_back(s);
    path.frames.push_back(detail::z_loop_ground_frame(frame_fn, segment, s));
  }
  return path;
}

/**
 * Builds the frame path of the eigenspace that starts as `initial_frame`
 * (columns spanning a subspace of the register spanned by `register_qubits`,
 * lying inside an eigenspace of the first segment's Hamiltonian at t=0),
 * following a chain of segments whose supports must lie inside the register.
 * Frames are gauge-fixed by continuity, so the path closes only up to the
 * holonomy; transport() of the result is what matters. While the Hamiltonian
 * does not touch part of the register, the tracked eigenspace is its
 * support-eigenspace tensored with the untouched factor.
 */
inline EigenFramePath frames_from_segments(
    const std::vector<SegmentHamiltonian>& segments,
    const std::vector<int>& register_qubits, const Matrix& initial_frame,
    int samples_per_segment) {
  if (segments.empty()) throw InvalidArgument("no segments");
  int m = static_cast<int>(register_qubits.size());
  Eigen::Index dim = Eigen::Index{1} << m;
  if (initial_frame.rows() != dim)
    throw InvalidArgument("initial frame does not match the register");

  EigenFramePath path;
  Matrix current = initial_frame;
  double t_acc = 0.0;
  for (size_t iseg = 0; iseg < segments.size(); ++iseg) {
    const auto& seg = segments[iseg];
    // Positions of the segment's support inside the register.
    std::vector<int> positions;
    for (int q : seg.support()) {
      auto it = std::find(register_qubits.begin(), register_qubits.end(), q);
      if (it == register_qubits.end())
        throw InvalidArgument("segment acts outside the frame register");
      positions.push_back(
          static_cast<int>(it - register_qubits.begin()));
    }
    double T = seg.schedule.total_time();
    for (int k = iseg == 0 ? 0 : 1; k <= samples_per_segment; ++k) {
      double s = static_cast<double>(k) / samples_per_segment;
      double t =
          seg.direction == SegmentDirection::backward ? (1 - s) * T : s * T;
      Matrix h = dense_embed(seg.dense_on_support(t), positions, m);
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      // Pick the half-spectrum block with the larger overlap with the
      // running frame (handles sign flips between abutting segments).
      Matrix lo = es.eigenvectors().leftCols(dim / 2);
      Matrix hi = es.eigenvectors().rightCols(dim / 2);
      double wlo = (lo.adjoint() * current).squaredNorm();
      double whi = (hi.adjoint() * current).squaredNorm();
      Matrix block = wlo >= whi ? lo : hi;
      // Columns of the block aligned with the running frame.
      Matrix overlap = block.adjoint() * current;
      Eigen::JacobiSVD<Matrix> svd(
          overlap, Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (svd.singularValues().minCoeff() < 1e-6)
        throw OrthogonalSubspaceError(
            "tracked eigenspace changed discontinuously; refine sampling");
      current = block * (svd.matrixU() * svd.matrixV().adjoint());
      path.times.push_back(t_acc + s);
      path.frames.push_back(current);
    }
    t_acc += 1.0;
  }
  // The interior gauge is the transported one, which absorbs the holonomy
  // into the final frame. When the loop closes (final subspace == initial),
  // snap the last frame back to the initial one so transport() reports the
  // holonomy in the initial frame.
  const Matrix& f0 = path.frames.front();
  const Matrix& fn = path.frames.back();
  if ((f0 * f0.adjoint() - fn * fn.adjoint()).cwiseAbs().maxCoeff() < 1e-8) {
    path.frames.back() = f0;
    path.single_valued = true;
  }
  return path;
}

}  // namespace holonome
