#include "geopmp/builtin.hpp"

#include <cmath>

namespace geopmp {

namespace {

Vec heisenberg_action(const AlgebraElement& xi, const Vec& x, double sign)
{
  const Vec& g = xi.coeffs;
  return Eigen::Vector3d(g[0], g[1], g[2] + sign * 0.5 * (g[0] * x[1] - g[1] * x[0]));
}

}  // namespace

ControlProblem heisenberg_problem()
{
  auto dynamics = [](const Vec& x, const Vec& u) -> Vec {
    return Eigen::Vector3d(u[0], u[1], 0.5 * (x[0] * u[1] - x[1] * u[0]));
  };
  auto lagrangian = [](const Vec&, const Vec& u) { return 0.5 * u.squaredNorm(); };

  AnalyticDerivatives d;
  d.dynamics_dx = [](const Vec&, const Vec& u) -> Mat {
    Mat j = Mat::Zero(3, 3);
    j(2, 0) = 0.5 * u[1];
    j(2, 1) = -0.5 * u[0];
    return j;
  };
  d.dynamics_du = [](const Vec& x, const Vec&) -> Mat {
    Mat j = Mat::Zero(3, 2);
    j(0, 0) = 1.0;
    j(1, 1) = 1.0;
    j(2, 0) = -0.5 * x[1];
    j(2, 1) = 0.5 * x[0];
    return j;
  };
  d.lagrangian_dx = [](const Vec&, const Vec&) -> Vec { return Vec::Zero(3); };
  d.lagrangian_du = [](const Vec&, const Vec& u) -> Vec { return u; };
  d.hamiltonian_uu = [](const Vec&, const Vec&, const Vec&) -> Mat { return -Mat::Identity(2, 2); };

  Symmetry sym{heisenberg_algebra(), {}, {}, {}};
  sym.infinitesimal_action = [](const AlgebraElement& xi, const Vec& x) {
    return heisenberg_action(xi, x, 1.0);
  };
  sym.finite_action = [](const AlgebraElement& xi, const Vec& x) -> Vec {
    return x + heisenberg_action(xi, x, 1.0);
  };
  sym.left_invariant_field = [](const AlgebraElement& xi, const Vec& x) {
    return heisenberg_action(xi, x, -1.0);
  };
  return ControlProblem("heisenberg", 3, 2, dynamics, lagrangian, d, sym);
}

ReducedProblem heisenberg_reduced_problem()
{
  auto lagrangian = [](const Vec&, const Vec& u) { return 0.5 * u.squaredNorm(); };
  auto base = [](const Vec&, const Vec&) -> Vec { return Vec(0); };
  auto vertical = [](const Vec&, const Vec& u) -> Vec { return Eigen::Vector3d(u[0], u[1], 0.0); };

  ReducedDerivatives d;
  d.base_dynamics_dz = [](const Vec&, const Vec&) -> Mat { return Mat(0, 0); };
  d.base_dynamics_du = [](const Vec&, const Vec&) -> Mat { return Mat(0, 2); };
  d.algebra_dynamics_dz = [](const Vec&, const Vec&) -> Mat { return Mat(3, 0); };
  d.algebra_dynamics_du = [](const Vec&, const Vec&) -> Mat {
    Mat j = Mat::Zero(3, 2);
    j(0, 0) = 1.0;
    j(1, 1) = 1.0;
    return j;
  };
  d.lagrangian_dz = [](const Vec&, const Vec&) -> Vec { return Vec(0); };
  d.lagrangian_du = [](const Vec&, const Vec& u) -> Vec { return u; };
  d.hamiltonian_uu = [](const Vec&, const Vec&, const Vec&, const Vec&) -> Mat {
    return -Mat::Identity(2, 2);
  };

  std::vector<Casimir> casimirs{{"lambda3", [](const CoalgebraElement& mu) { return mu.coeffs[2]; }}};
  return ReducedProblem("heisenberg", 0, heisenberg_algebra(), 2, lagrangian, base, vertical, {}, d,
                        casimirs);
}

Vec heisenberg_costate(const Vec& x, const Vec& lambda)
{
  require_size(x, 3, "Heisenberg state");
  require_size(lambda, 3, "Heisenberg body momentum");
  return Eigen::Vector3d(lambda[0] + 0.5 * x[1] * lambda[2], lambda[1] - 0.5 * x[0] * lambda[2],
                         lambda[2]);
}

Vec heisenberg_lambda(double theta, double k)
{
  return Eigen::Vector3d(std::cos(theta), std::sin(theta), k);
}

std::vector<std::string> builtin_names() { return {"heisenberg"}; }

ControlProblem builtin_problem(const std::string& name)
{
  if (name == "heisenberg") return heisenberg_problem();
  throw ArgumentError("unknown builtin problem '" + name + "'");
}

ReducedProblem builtin_reduced_problem(const std::string& name)
{
  if (name == "heisenberg") return heisenberg_reduced_problem();
  throw ArgumentError("unknown builtin problem '" + name + "'");
}

}  // namespace geopmp
