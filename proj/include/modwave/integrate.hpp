#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "modwave/common.hpp"

namespace modwave {

/// Runge-Kutta coefficients. Stage equations are implicit whenever the a
/// matrix has entries on or above the diagonal.
struct ButcherTableau {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;

  int stages() const { return static_cast<int>(b.size()); }

  void validate() const {
    if (a.rows() != a.cols() || a.rows() != b.size() || b.size() != c.size())
      throw DomainError("ButcherTableau: inconsistent dimensions");
    if (std::abs(b.sum() - 1.0) > 1e-14)
      throw DomainError("ButcherTableau: weights do not sum to 1");
    for (Eigen::Index i = 0; i < c.size(); ++i)
      if (std::abs(a.row(i).sum() - c[i]) > 1e-14)
        throw DomainError("ButcherTableau: node " + std::to_string(i) +
                          " violates stage consistency");
  }
};

/// Three-stage Gauss-Legendre tableau, order 6. Symplectic: propagators of
/// linear Hamiltonian systems computed with it conserve the symplectic form
/// up to the stage-equation solve tolerance.
inline const ButcherTableau& gl6() {
  static const ButcherTableau tab = [] {
    const double r = std::sqrt(15.0);
    ButcherTableau t;
    t.a.resize(3, 3);
    t.a << 5.0 / 36.0, 2.0 / 9.0 - r / 15.0, 5.0 / 36.0 - r / 30.0,
        5.0 / 36.0 + r / 24.0, 2.0 / 9.0, 5.0 / 36.0 - r / 24.0,
        5.0 / 36.0 + r / 30.0, 2.0 / 9.0 + r / 15.0, 5.0 / 36.0;
    t.b.resize(3);
    t.b << 5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0;
    t.c.resize(3);
    t.c << 0.5 - r / 10.0, 0.5, 0.5 + r / 10.0;
    t.validate();
    return t;
  }();
  return tab;
}

struct StepConfig {
  int steps_per_char_time = 40;
  int fixed_point_max_iters = 10;
  double fixed_point_tol = 1e-12;

  void validate() const {
    if (steps_per_char_time <= 0 || fixed_point_max_iters <= 0 || fixed_point_tol <= 0)
      throw DomainError("StepConfig: all fields must be positive");
  }
};

/// Uniform step count for a span, at cfg.steps_per_char_time steps per
/// characteristic time.
inline int step_count(double span, double char_time, const StepConfig& cfg) {
  cfg.validate();
  if (!(char_time > 0)) throw DomainError("step_count: characteristic time must be positive");
  double n = std::ceil(std::abs(span) / char_time * cfg.steps_per_char_time);
  return std::max(1, static_cast<int>(n));
}

namespace detail {
struct NullObserver {
  template <class State>
  void operator()(int, double, const State&) const {}
};
}  // namespace detail

/// Implicit Runge-Kutta integration of phi' = rhs(t, phi) with fixed steps.
///
/// Stage values k_i = rhs(t + c_i h, phi + h sum_j a_ij k_j) are solved by
/// fixed-point iteration seeded with k_i = rhs(t + c_i h, phi), stopping when
/// the summed stage increment drops below fixed_point_tol * ||phi|| (Frobenius
/// for matrix-valued states; all columns advance jointly). Exceeding the
/// iteration cap without meeting the tolerance throws NumericError carrying
/// the last residual -- the signal that the step is too large.
///
/// The observer is called as observe(step_index, t, phi) with step_index 0 at
/// the initial state and once more after every completed step.
template <class State, class Rhs, class Observer = detail::NullObserver>
State irk_integrate_n(Rhs&& rhs, State phi, double t0, double t1, int nsteps,
                      const ButcherTableau& tab, const StepConfig& cfg,
                      Observer&& observe = Observer{}) {
  cfg.validate();
  if (!(t1 > t0)) {
    if (t1 == t0) return phi;
    throw DomainError("irk_integrate: t1 must be >= t0");
  }
  const int s = tab.stages();
  const double h = (t1 - t0) / nsteps;

  std::vector<State> k(static_cast<std::size_t>(s), phi);
  State y = phi;
  State knew = phi;

  observe(0, t0, phi);
  for (int step = 0; step < nsteps; ++step) {
    const double t = t0 + step * h;
    const double scale = std::max(phi.norm(), 1e-300);

    for (int i = 0; i < s; ++i) rhs(t + tab.c[i] * h, phi, k[static_cast<std::size_t>(i)]);

    double increment = 0.0;
    bool converged = false;
    for (int iter = 0; iter < cfg.fixed_point_max_iters && !converged; ++iter) {
      increment = 0.0;
      for (int i = 0; i < s; ++i) {
        y = phi;
        for (int j = 0; j < s; ++j) y += (h * tab.a(i, j)) * k[static_cast<std::size_t>(j)];
        rhs(t + tab.c[i] * h, y, knew);
        increment += (knew - k[static_cast<std::size_t>(i)]).norm();
        k[static_cast<std::size_t>(i)] = knew;
      }
      converged = increment <= cfg.fixed_point_tol * scale;
    }
    if (!converged)
      throw NumericError(
          "irk_integrate: fixed-point iteration did not reach tolerance after " +
          std::to_string(cfg.fixed_point_max_iters) + " iterations at t=" +
          std::to_string(t) + " (residual " + std::to_string(increment / scale) +
          " relative); reduce the step size or raise the iteration cap");

    for (int i = 0; i < s; ++i) phi += (h * tab.b[i]) * k[static_cast<std::size_t>(i)];
    observe(step + 1, t + h, phi);
  }
  return phi;
}

/// Step count chosen from the characteristic time.
template <class State, class Rhs>
State irk_integrate(Rhs&& rhs, State phi, double t0, double t1, double char_time,
                    const ButcherTableau& tab, const StepConfig& cfg) {
  return irk_integrate_n(std::forward<Rhs>(rhs), std::move(phi), t0, t1,
                         step_count(t1 - t0, char_time, cfg), tab, cfg);
}

/// Classical explicit RK4 with fixed steps. Test oracle: an independent
/// scheme for cross-checking the implicit path; not used by any analysis.
template <class State, class Rhs>
State rk4_reference_integrate(Rhs&& rhs, State phi, double t0, double t1, int nsteps) {
  if (t1 == t0) return phi;
  const double h = (t1 - t0) / nsteps;
  State k1 = phi, k2 = phi, k3 = phi, k4 = phi, y = phi;
  for (int step = 0; step < nsteps; ++step) {
    const double t = t0 + step * h;
    rhs(t, phi, k1);
    y = phi + (h / 2) * k1;
    rhs(t + h / 2, y, k2);
    y = phi + (h / 2) * k2;
    rhs(t + h / 2, y, k3);
    y = phi + h * k3;
    rhs(t + h, y, k4);
    phi += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return phi;
}

/// One symplectic Euler step for phi = [u; p]:
///   u' = u + h M^-1(t+h) p
///   p' = p - h K(t+h) u'
/// mass_inv and stiffness apply M^-1(t) and K(t) to the given block
/// (matrix-free oracles). The induced transition matrix is symplectic for
/// any h, up to roundoff.
template <class State>
using HalfBlock =
    Eigen::Matrix<typename State::Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class State, class MassInv, class Stiffness>
State symplectic_euler_step(State phi, double t, double h, MassInv&& mass_inv,
                            Stiffness&& stiffness) {
  if (phi.rows() % 2 != 0)
    throw DomainError("symplectic_euler_step: state must have even row count");
  const Eigen::Index n = phi.rows() / 2;
  HalfBlock<State> block(n, phi.cols());
  mass_inv(t + h, phi.bottomRows(n), block);
  phi.topRows(n) += h * block;
  stiffness(t + h, phi.topRows(n), block);
  phi.bottomRows(n) -= h * block;
  return phi;
}

template <class State, class MassInv, class Stiffness>
State symplectic_euler_integrate(MassInv&& mass_inv, Stiffness&& stiffness, State phi,
                                 double t0, double t1, int nsteps) {
  if (t1 == t0) return phi;
  const double h = (t1 - t0) / nsteps;
  const Eigen::Index n = phi.rows() / 2;
  HalfBlock<State> block(n, phi.cols());
  for (int step = 0; step < nsteps; ++step) {
    const double t_next = t0 + (step + 1) * h;
    mass_inv(t_next, phi.bottomRows(n), block);
    phi.topRows(n) += h * block;
    stiffness(t_next, phi.topRows(n), block);
    phi.bottomRows(n) -= h * block;
  }
  return phi;
}

}  // namespace modwave
