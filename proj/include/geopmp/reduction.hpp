#pragma once

#include "geopmp/common.hpp"
#include "geopmp/dirac.hpp"
#include "geopmp/lie.hpp"
#include "geopmp/ocp.hpp"
#include "geopmp/pmp.hpp"
#include "geopmp/trajectory.hpp"

#include <functional>
#include <string>
#include <vector>

namespace geopmp {

/// Optional exact derivatives of the reduced data; same fallback rules as
/// AnalyticDerivatives.
struct ReducedDerivatives
{
  std::function<Mat(const Vec& z, const Vec& u)> base_dynamics_dz;     // s x s
  std::function<Mat(const Vec& z, const Vec& u)> base_dynamics_du;     // s x r
  std::function<Mat(const Vec& z, const Vec& u)> algebra_dynamics_dz;  // dim x s
  std::function<Mat(const Vec& z, const Vec& u)> algebra_dynamics_du;  // dim x r
  std::function<Vec(const Vec& z, const Vec& u)> lagrangian_dz;
  std::function<Vec(const Vec& z, const Vec& u)> lagrangian_du;
  /// d2h/du2 at (z, pz, mu, u)
  std::function<Mat(const Vec& z, const Vec& pz, const Vec& mu, const Vec& u)> hamiltonian_uu;
};

/// Scalar function on the dual of the algebra monitored along reduced flows.
struct Casimir
{
  std::string name;
  std::function<double(const CoalgebraElement&)> value;
};

/**
 * Reduced optimal control data on T*(P/G) + g~* + U~ in a trivialization:
 * base coordinates z in R^s, reduced Lagrangian l(z, u), dynamics split into
 * a base part Gamma~(z, u) in R^s and a vertical part gamma~(z, u) in g.
 *
 * The optional curvature returns <mu, F_A(v, w)> for base vectors v, w; it
 * must be bilinear and antisymmetric in (v, w). It is absent (zero) when
 * s = 0, i.e. when the state space is the group itself.
 */
class ReducedProblem
{
public:
  using VectorField = std::function<Vec(const Vec& z, const Vec& u)>;
  using ScalarField = std::function<double(const Vec& z, const Vec& u)>;
  using Curvature = std::function<double(const Vec& z, const Vec& mu, const Vec& v, const Vec& w)>;

  ReducedProblem(std::string name, int base_dim, LieAlgebra algebra, int control_dim,
                 ScalarField lagrangian, VectorField base_dynamics, VectorField algebra_dynamics,
                 Curvature curvature = {}, ReducedDerivatives derivatives = {},
                 std::vector<Casimir> casimirs = {});

  const std::string& name() const noexcept { return name_; }
  int base_dim() const noexcept { return s_; }
  int control_dim() const noexcept { return r_; }
  const LieAlgebra& algebra() const noexcept { return algebra_; }
  const ReducedDerivatives& derivatives() const noexcept { return derivatives_; }
  const std::vector<Casimir>& casimirs() const noexcept { return casimirs_; }
  bool has_curvature() const noexcept { return static_cast<bool>(curvature_); }

  double lagrangian(const Vec& z, const Vec& u) const;
  Vec base_dynamics(const Vec& z, const Vec& u) const;
  Vec algebra_dynamics(const Vec& z, const Vec& u) const;
  /// <mu, F_A(v, w)>; zero without curvature.
  double curvature(const Vec& z, const Vec& mu, const Vec& v, const Vec& w) const;
  /// Covector F_A(v, .) paired with mu.
  Vec curvature_covector(const Vec& z, const Vec& mu, const Vec& v) const;

  /// Max |F(v, w) + F(w, v)| over random probes in [-1, 1].
  double curvature_antisymmetry_defect(int samples = 20, std::uint64_t seed = 0) const;

private:
  std::string name_;
  int s_;
  LieAlgebra algebra_;
  int r_;
  ScalarField lagrangian_;
  VectorField base_dynamics_;
  VectorField algebra_dynamics_;
  Curvature curvature_;
  ReducedDerivatives derivatives_;
  std::vector<Casimir> casimirs_;
};

/// Point ((z, pz), mu, u) of the reduced Pontryagin bundle.
struct ReducedState
{
  Vec z;
  Vec pz;
  CoalgebraElement mu;
  Vec u;
};

struct ReducedConfig : PmpConfig
{
  /// mu_dot = coadjoint_sign * ad*_xi mu, with ad* as in coadjoint(). +1
  /// reproduces the Heisenberg Lie-Poisson system; -1 corresponds to writing
  /// the equation with the opposite ad* convention.
  double coadjoint_sign = 1.0;

  void validate() const;
};

/// h(z, pz, mu, u) = <pz, Gamma~(z, u)> + <mu, gamma~(z, u)> - l(z, u)
double reduced_hamiltonian(const ReducedProblem& rp, const ReducedState& st);

struct ReducedPartials
{
  Vec dz;
  Vec dpz;  // Gamma~
  Vec dmu;  // gamma~
  Vec du;
  Mat duu;
};

ReducedPartials reduced_partials(const ReducedProblem& rp, const ReducedState& st,
                                 double fd_step = kDefaultFdStep);

/// Solves dh/du = 0 by Newton from u_guess.
FeedbackSolution eliminate_controls_reduced(const ReducedProblem& rp, const Vec& z, const Vec& pz,
                                            const CoalgebraElement& mu, const Vec& u_guess,
                                            const ReducedConfig& cfg = {});

struct ReducedRhs
{
  Vec zdot;                  // dh/dpz
  Vec pzdot;                 // -dh/dz - F_A(z_dot, .)
  CoalgebraElement mudot;    // coadjoint_sign * ad*_xi mu
  AlgebraElement xi;         // dh/dmu
};

/// Right-hand side of the reduced PMP at a state whose control is already
/// eliminated. Covariant derivatives are coordinate derivatives in the
/// trivialization of the problem.
ReducedRhs reduced_pmp_rhs(const ReducedProblem& rp, const ReducedState& st,
                           const ReducedConfig& cfg = {});

std::vector<StateBlock> reduced_layout(int s, int dim, int r);
ReducedState reduced_state(const Trajectory& traj, std::size_t row);

/**
 * RK4 on (z, pz, mu) with per-stage control elimination. st0.u seeds Newton.
 * Channels: "h" and "casimir_<name>" for every registered Casimir.
 */
Trajectory integrate_reduced(const ReducedProblem& rp, const ReducedState& st0, double T,
                             const ReducedConfig& cfg = {});

/**
 * Quotient map for P = G: the body momentum lambda_i = <p, T_e L_g e_i>,
 * computed through Symmetry::left_invariant_field. Base blocks are empty.
 */
ReducedState project_full_to_reduced(const ControlProblem& prob, const PontryaginPoint& pt);

/// Inverse of the projection at state x: the costate p with body momentum
/// lambda. Throws UnsupportedError outside the P = G case.
Vec costate_from_body_momentum(const ControlProblem& prob, const Vec& x, const Vec& lambda);

/// Relative distance of ((xi, lambda_dot), (0, dh_dmu)) from
/// reduced_dirac_fiber(alg, lambda), scaled by 1 + |point|.
double membership_residual_reduced(const LieAlgebra& alg, const CoalgebraElement& lambda,
                                   const CoalgebraElement& lambda_dot, const AlgebraElement& xi,
                                   const AlgebraElement& dh_dmu);

bool membership_check_reduced(const LieAlgebra& alg, const CoalgebraElement& lambda,
                              const CoalgebraElement& lambda_dot, const AlgebraElement& xi,
                              const AlgebraElement& dh_dmu, double tol);

/**
 * Fiber of the reduced Dirac structure including the base: graph on
 * (dz, dpz, xi, rho) of
 *   <wpz, vz> - <vpz, wz> - <mu, F_A(vz, wz)> + <sigma, xi> - <rho, zeta> + <mu, [xi, zeta]>.
 * For s = 0 it coincides with reduced_dirac_fiber(alg, mu).
 */
LinearDiracStructure reduced_pontryagin_fiber(const ReducedProblem& rp, const Vec& z,
                                              const CoalgebraElement& mu);

/// Per-row relative residual of ((z_dot, pz_dot, xi, mu_dot), dh) against
/// reduced_pontryagin_fiber, with velocities from differentiate_rows.
std::vector<double> reduced_trajectory_membership(const ReducedProblem& rp, const Trajectory& traj,
                                                  double fd_step = kDefaultFdStep);

/// Per-row relative residual of ((x_dot, p_dot, 0), dH) against the graph of
/// the presymplectic form on the Pontryagin fiber, velocities from
/// differentiate_rows.
std::vector<double> pmp_trajectory_membership(const ControlProblem& prob, const Trajectory& traj,
                                              double fd_step = kDefaultFdStep);

}  // namespace geopmp
