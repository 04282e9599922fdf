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

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "holonome/linalg.hpp"

namespace holonome {

enum class ScheduleKind { linear, trigonometric, smooth_bump };

inline const char* name(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::linear: return "linear";
    case ScheduleKind::trigonometric: return "trig";
    case ScheduleKind::smooth_bump: return "bump";
  }
  return "?";
}

namespace detail {

// Bump weight exp(-1/sin(pi t / T)); zero at both endpoints with all
// derivatives vanishing.
inline double bump_weight(double t, double T) {
  double s = std::sin(M_PI * t / T);
  if (s <= 1e-300) return 0.0;
  return std::exp(-1.0 / s);
}

// Cumulative integral of the bump weight, cached on a uniform grid with
// 7-point Gauss-Legendre inside each cell. The integrand is smooth, so the
// per-cell rule converges far below the 1e-12 the schedule invariants need.
class BumpTable {
 public:
  explicit BumpTable(double T, int cells = 4096) : T_(T), cells_(cells) {
    cumulative_.resize(cells_ + 1, 0.0);
    double h = T_ / cells_;
    for (int c = 0; c < cells_; ++c)
      cumulative_[c + 1] =
          cumulative_[c] + integrate(c * h, (c + 1) * h);
  }

  double total() const { return cumulative_.back(); }

  double integral_to(double t) const {
    double h = T_ / cells_;
    int cell = std::min(static_cast<int>(t / h), cells_ - 1);
    if (cell < 0) cell = 0;
    return cumulative_[cell] + integrate(cell * h, t);
  }

 private:
  double integrate(double a, double b) const {
    if (b <= a) return 0.0;
    // 7-point Gauss-Legendre nodes/weights on [-1, 1].
    static constexpr std::array<double, 7> xs = {
        -0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
        0.0,
        0.4058451513773972, 0.7415311855993945, 0.9491079123427585};
    static constexpr std::array<double, 7> ws = {
        0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
        0.4179591836734694,
        0.3818300505051189, 0.2797053914892767, 0.1294849661688697};
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), acc = 0.0;
    for (int i = 0; i < 7; ++i)
      acc += ws[i] * bump_weight(mid + half * xs[i], T_);
    return acc * half;
  }

  double T_;
  int cells_;
  std::vector<double> cumulative_;
};

}  // namespace detail

/**
 * One path segment's time profile: an interpolation pair (f, g) with
 * f(0) = 1, g(0) = 0, f(T) = 0, g(T) = 1 scaled over [0, T], optionally
 * composed with the smooth-bump reparametrization tau(t) whose derivatives
 * all vanish at the endpoints. The smooth_bump kind by itself plays the role
 * of a pure reparametrization tau (the linear and trigonometric kinds have
 * tau(t) = t).
 */
class Schedule {
 public:
  explicit Schedule(ScheduleKind kind, double total_time = 1.0,
                    bool bump_reparam = false)
      : kind_(kind), T_(total_time), bump_reparam_(bump_reparam) {
    if (total_time <= 0) throw InvalidArgument("schedule time must be > 0");
    if (kind_ == ScheduleKind::smooth_bump || bump_reparam_)
      bump_ = std::make_shared<detail::BumpTable>(T_);
  }

  ScheduleKind kind() const { return kind_; }
  double total_time() const { return T_; }
  bool bump_reparam() const { return bump_reparam_; }

  /** tau(0) = 0, tau(T) = T; smooth bump for the bump kinds, else t. */
  double tau(double t) const {
    check_range(t);
    if (!bump_) return t;
    return T_ * bump_->integral_to(t) / bump_->total();
  }

  struct FG {
    double f, g;
  };

  /** Interpolation pair at time t (after any reparametrization). */
  FG fg(double t) const {
    check_range(t);
    double u = bump_reparam_ ? tau(t) : t;
    switch (kind_) {
      case ScheduleKind::linear:
        return {1.0 - u / T_, u / T_};
      case ScheduleKind::trigonometric:
        return {std::cos(M_PI * u / (2 * T_)), std::sin(M_PI * u / (2 * T_))};
      case ScheduleKind::smooth_bump:
        throw InvalidArgument(
            "the bump schedule defines a reparametrization, not an "
            "interpolation pair");
    }
    throw InvalidArgument("unknown schedule kind");
  }

 private:
  void check_range(double t) const {
    if (t < -1e-12 || t > T_ * (1 + 1e-12))
      throw InvalidArgument("schedule evaluated outside [0, T]");
  }

  ScheduleKind kind_;
  double T_;
  bool bump_reparam_;
  std::shared_ptr<const detail::BumpTable> bump_;
};

/** Adiabatic figures of merit for a two-level interpolation. */
struct AdiabaticMetrics {
  double eps_max = 0.0;  // max_t |<phi1| dH/dt |phi0>|
  double gap_min = 0.0;  // min_t 2E(t)
  double ratio = 0.0;    // eps_max / gap_min^2
  double delta = std::numeric_limits<double>::quiet_NaN();  // 1 - p, when run
};

/**
 * Scans H(t) = f(t) Z + g(t) (cos(theta) X + sin(theta) Y) on a refining
 * time grid for the transition matrix element and the minimum gap.
 */
inline AdiabaticMetrics adiabatic_metrics(const Schedule& schedule,
                                          double theta, int grid = 4096) {
  if (schedule.kind() == ScheduleKind::smooth_bump)
    throw InvalidArgument("adiabatic metrics need an interpolation pair");
  double T = schedule.total_time();
  Matrix z = Matrix::Zero(2, 2), htheta = Matrix::Zero(2, 2);
  z << 1, 0, 0, -1;
  htheta << 0, std::polar(1.0, -theta), std::polar(1.0, theta), 0;

  auto eval = [&](double t) -> std::pair<double, double> {
    auto [f, g] = schedule.fg(t);
    double dt = T / grid / 16.0;
    double t0 = std::max(0.0, t - dt), t1 = std::min(T, t + dt);
    auto [f0, g0] = schedule.fg(t0);
    auto [f1, g1] = schedule.fg(t1);
    double fp = (f1 - f0) / (t1 - t0), gp = (g1 - g0) / (t1 - t0);
    Matrix h = f * z + g * htheta;
    Matrix dh = fp * z + gp * htheta;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    double eps = std::abs(
        (es.eigenvectors().col(1).adjoint() * dh * es.eigenvectors().col(0))(
            0, 0));
    double gap = es.eigenvalues()(1) - es.eigenvalues()(0);
    return {eps, gap};
  };

  AdiabaticMetrics m;
  m.gap_min = std::numeric_limits<double>::infinity();
  double t_at_max = 0.0, t_at_min = 0.0;
  for (int i = 0; i <= grid; ++i) {
    double t = T * i / grid;
    auto [eps, gap] = eval(t);
    if (eps > m.eps_max) {
      m.eps_max = eps;
      t_at_max = t;
    }
    if (gap < m.gap_min) {
      m.gap_min = gap;
      t_at_min = t;
    }
  }
  // One level of local refinement around the extrema.
  double h = T / grid;
  for (int i = -16; i <= 16; ++i) {
    double t = std::clamp(t_at_max + i * h / 16.0, 0.0, T);
    m.eps_max = std::max(m.eps_max, eval(t).first);
    t = std::clamp(t_at_min + i * h / 16.0, 0.0, T);
    m.gap_min = std::min(m.gap_min, eval(t).second);
  }
  m.ratio = m.eps_max / (m.gap_min * m.gap_min);
  return m;
}

/** Closed-form and averaged diabatic error for the constant-rate sweep. */
struct LinearTauError {
  double delta_exact;     // from the solvable two-level problem
  double delta_averaged;  // eps^2 / 2, the averaged-oscillation estimate
};

/**
 * Probability deficit 1 - p for the constant-gap rotation driven at constant
 * rate, ratio_eps = T_d / T_h. Exact solution of the two-level problem:
 *
 *   p = 1/(1+eps^2) + (eps^2/(1+eps^2)) cos^2((pi/(2 eps)) sqrt(1+eps^2)).
 */
inline LinearTauError diabatic_error_linear_tau(double ratio_eps) {
  if (ratio_eps <= 0) throw InvalidArgument("ratio must be positive");
  double e2 = ratio_eps * ratio_eps;
  double arg = (M_PI / (2.0 * ratio_eps)) * std::sqrt(1.0 + e2);
  double s = std::sin(arg);
  return {e2 * s * s / (1.0 + e2), e2 / 2.0};
}

/**
 * Integrates the two-level Schrodinger equation for the constant-gap
 * rotation H(t) = cos(pi tau/T) Z + sin(pi tau/T) Y over [0, T] with
 * T = T_over_Td * pi/2, starting from the ground state of Z, and returns
 * 1 - |<ground(T)|psi(T)>|^2. The reparametrization tau comes from the
 * schedule kind: identity for linear/trig, the smooth bump otherwise.
 * Steps use the exact 2x2 rotation at the midpoint; the step count doubles
 * until the result is stable.
 */
inline double diabatic_error_numeric(ScheduleKind kind, double T_over_Td,
                                     double tol = 1e-9) {
  if (T_over_Td <= 0) throw InvalidArgument("ratio must be positive");
  const double T = T_over_Td * M_PI / 2.0;
  Schedule sched(kind == ScheduleKind::smooth_bump ? ScheduleKind::smooth_bump
                                                   : ScheduleKind::linear,
                 T);

  auto run = [&](long steps) {
    double h = T / steps;
    // State in (a, b) components; start in |1>, the ground state of Z.
    Complex a = 0.0, b = 1.0;
    for (long k = 0; k < steps; ++k) {
      double tmid = (k + 0.5) * h;
      double phi = M_PI * sched.tau(tmid) / T;
      // H = cos(phi) Z + sin(phi) Y; exp(-i h H) in closed form.
      double c = std::cos(h), s = std::sin(h);
      double nz = std::cos(phi), ny = std::sin(phi);
      // exp(-i h (ny Y + nz Z)) = c I - i s (ny Y + nz Z)
      Complex a2 = (c - kI * s * nz) * a + (-s * ny) * b;
      Complex b2 = (s * ny) * a + (c + kI * s * nz) * b;
      a = a2;
      b = b2;
    }
    // Final ground state is |0> (H(T) = -Z).
    return 1.0 - std::norm(a);
  };

  // Roundoff in the accumulated product limits resolvable differences to a
  // few 1e-12; below that the doubling test would chase noise.
  double effective_tol = std::max(tol, 4e-12);
  long steps = 1L << 12;
  double prev = run(steps);
  for (int iter = 0; iter < 12; ++iter) {
    steps *= 2;
    double cur = run(steps);
    if (std::abs(cur - prev) < effective_tol) return std::max(cur, 0.0);
    prev = cur;
  }
  throw AccuracyError("diabatic-error integration did not stabilize");
}

}  // namespace holonome
