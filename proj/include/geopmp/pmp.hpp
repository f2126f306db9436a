#pragma once

#include "geopmp/common.hpp"
#include "geopmp/lie.hpp"
#include "geopmp/ocp.hpp"
#include "geopmp/trajectory.hpp"

#include <optional>
#include <vector>

namespace geopmp {

struct PmpConfig
{
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  double rk_step = 1e-3;
  double fd_step = kDefaultFdStep;
  double regularity_rank_tol = 1e-9;
  /// A warm-started Newton solve that moves u by more than
  /// branch_jump_tol * (1 + |u_warm|) is reported as a branch switch.
  double branch_jump_tol = 0.5;

  void validate() const;
};

/// Converged control together with solver diagnostics.
struct FeedbackSolution
{
  Vec u;
  int iterations = 0;  // Newton updates applied
  double residual_norm = 0.0;
};

/// Uniform time grid covering [0, T]: `steps` intervals of width `step`.
/// The requested step is shrunk so that it divides T.
struct TimeGrid
{
  int steps = 0;
  double step = 0.0;
};
TimeGrid make_time_grid(double T, double requested_step);

/// phi_a = dH/du^a, the constraints defining M_1.
Vec consistency_residual(const ControlProblem& prob, const PontryaginPoint& pt,
                         double fd_step = kDefaultFdStep);

/// Smallest singular value of W = d2H/du2 (infinity when r = 0).
double control_hessian_min_singular_value(const ControlProblem& prob, const PontryaginPoint& pt,
                                          const PmpConfig& cfg = {});

/// True iff W has full rank: sigma_min(W) > regularity_rank_tol. Vacuously
/// true without controls.
bool regularity_check(const ControlProblem& prob, const PontryaginPoint& pt,
                      const PmpConfig& cfg = {});

/// Solves phi(x, p, u) = 0 for u by Newton's method started at u_guess.
FeedbackSolution optimal_feedback(const ControlProblem& prob, const Vec& x, const Vec& p,
                                  const Vec& u_guess, const PmpConfig& cfg = {});

std::vector<StateBlock> pmp_layout(int n, int r);
PontryaginPoint pontryagin_point(const Trajectory& traj, std::size_t row);

/**
 * Integrates x_dot = dH/dp, p_dot = -dH/dx with classical RK4, eliminating
 * the control by Newton at every stage (warm-started from the previous
 * stage). Rows store (x, p, u*). Channels: "H" and, when the problem has a
 * symmetry, the momentum map components "J_1".."J_d".
 */
Trajectory integrate_pmp(const ControlProblem& prob, const Vec& x0, const Vec& p0, double T,
                         const PmpConfig& cfg = {}, const std::optional<Vec>& u_guess = {});

/// Trapezoid quadrature of L(x, u) + <p, x_dot - f(x, u)>, with x_dot taken
/// from finite differences of the stored states.
double lagrange_pontryagin_action(const ControlProblem& prob, const Trajectory& traj);

/// J(x, p)_i = <p, (e_i)_P(x)>
CoalgebraElement momentum_map(const ControlProblem& prob, const Vec& x, const Vec& p);

}  // namespace geopmp
