#pragma once

#include "geopmp/common.hpp"
#include "geopmp/lie.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace geopmp {

/// Optional exact derivatives of a control problem. Any subset may be given;
/// missing pieces fall back to central finite differences.
struct AnalyticDerivatives
{
  std::function<Mat(const Vec& x, const Vec& u)> dynamics_dx;  // n x n
  std::function<Mat(const Vec& x, const Vec& u)> dynamics_du;  // n x r
  std::function<Vec(const Vec& x, const Vec& u)> lagrangian_dx;
  std::function<Vec(const Vec& x, const Vec& u)> lagrangian_du;
  /// d2H/du2 at (x, p, u), r x r.
  std::function<Mat(const Vec& x, const Vec& p, const Vec& u)> hamiltonian_uu;
};

/**
 * Left action of a Lie group G on the state space, lifted trivially to the
 * controls (u is left unchanged).
 *
 * infinitesimal_action(xi, x) is the generator xi_P(x). finite_action(xi, x)
 * is Phi_g(x) for g = exp(xi) and is needed only for invariance checks.
 * left_invariant_field(xi, x) is T_e L_g xi expressed in the state chart; it
 * exists only when the state space is the group itself and is what
 * translates costates to body momenta.
 */
struct Symmetry
{
  LieAlgebra algebra;
  std::function<Vec(const AlgebraElement& xi, const Vec& x)> infinitesimal_action;
  std::function<Vec(const AlgebraElement& xi, const Vec& x)> finite_action;
  std::function<Vec(const AlgebraElement& xi, const Vec& x)> left_invariant_field;
};

/// Point (x, p, u) of the Pontryagin bundle T*P x_P C.
struct PontryaginPoint
{
  Vec x;
  Vec p;
  Vec u;
};

/**
 * Optimal control problem: minimize the integral of L(x, u) subject to
 * x_dot = f(x, u), with states in R^n and controls in R^r (single chart).
 */
class ControlProblem
{
public:
  using VectorField = std::function<Vec(const Vec& x, const Vec& u)>;
  using ScalarField = std::function<double(const Vec& x, const Vec& u)>;

  ControlProblem(std::string name, int n, int r, VectorField dynamics, ScalarField lagrangian,
                 AnalyticDerivatives derivatives = {}, std::optional<Symmetry> symmetry = {});

  const std::string& name() const noexcept { return name_; }
  int n() const noexcept { return n_; }
  int r() const noexcept { return r_; }

  /// f(x, u); throws EvaluationError on wrong length or non-finite output.
  Vec dynamics(const Vec& x, const Vec& u) const;
  /// L(x, u); throws EvaluationError on non-finite output.
  double lagrangian(const Vec& x, const Vec& u) const;

  const AnalyticDerivatives& derivatives() const noexcept { return derivatives_; }
  const std::optional<Symmetry>& symmetry() const noexcept { return symmetry_; }
  /// Throws ArgumentError if no symmetry is declared.
  const Symmetry& require_symmetry() const;

  void check_conforms(const PontryaginPoint& pt) const;

private:
  std::string name_;
  int n_;
  int r_;
  VectorField dynamics_;
  ScalarField lagrangian_;
  AnalyticDerivatives derivatives_;
  std::optional<Symmetry> symmetry_;
};

/// H_P(x, p, u) = <p, f(x, u)> - L(x, u)
double pontryagin_hamiltonian(const ControlProblem& prob, const PontryaginPoint& pt);

struct HamiltonianPartials
{
  Vec dx;   // dH/dx
  Vec dp;   // dH/dp = f(x, u)
  Vec du;   // dH/du
  Mat duu;  // d2H/du2
};

/// Step used for central differences: fd_step * (1 + |coordinate|).
inline constexpr double kDefaultFdStep = 1e-6;
/// Step for second differences of H when no analytic first derivative exists.
inline constexpr double kSecondDifferenceStep = 1e-4;

HamiltonianPartials hamiltonian_partials(const ControlProblem& prob, const PontryaginPoint& pt,
                                         double fd_step = kDefaultFdStep);

Vec hamiltonian_dx(const ControlProblem& prob, const PontryaginPoint& pt,
                   double fd_step = kDefaultFdStep);
Vec hamiltonian_du(const ControlProblem& prob, const PontryaginPoint& pt,
                   double fd_step = kDefaultFdStep);
Mat hamiltonian_duu(const ControlProblem& prob, const PontryaginPoint& pt,
                    double fd_step = kDefaultFdStep);

struct JacobianCheckReport
{
  double max_relative_error = 0.0;
  bool consistent = true;
};

/// Compares every supplied analytic derivative with central differences at
/// random probe points in [-1, 1]. Relative error uses max(1, |reference|).
JacobianCheckReport check_jacobians(const ControlProblem& prob, int samples = 20,
                                    std::uint64_t seed = 0, double fd_step = kDefaultFdStep,
                                    double rel_tol = 1e-5);

struct InvarianceOptions
{
  double sample_radius = 1.0;
  double tolerance = 1e-8;
  /// Only sample the identity element; deviations are then exactly zero.
  bool identity_only = false;
};

struct InvarianceReport
{
  double lagrangian_deviation = 0.0;  // max |L(Phi_g x, u) - L(x, u)|
  double dynamics_deviation = 0.0;    // max |T Phi_g f(x, u) - f(Phi_g x, u)|
  int samples = 0;
  bool invariant = false;
};

/// Samples g = exp(xi), x, u uniformly in a box and measures how far L and f
/// are from being G-invariant. Requires Symmetry::finite_action.
InvarianceReport check_invariance(const ControlProblem& prob, int samples, std::uint64_t seed,
                                  const InvarianceOptions& options = {});

}  // namespace geopmp
