#pragma once

#include "geopmp/ocp.hpp"
#include "geopmp/reduction.hpp"

#include <string>
#include <vector>

namespace geopmp {

/**
 * Subriemannian geodesics on the Heisenberg group in the chart
 * (x, y, z) = (a, b, c - ab/2):
 *
 *   x_dot = u1, y_dot = u2, z_dot = (x u2 - y u1) / 2,  L = (u1^2 + u2^2) / 2.
 *
 * Analytic derivatives are supplied, W = -I. The symmetry is left
 * multiplication by the group.
 */
ControlProblem heisenberg_problem();

/// The same problem after reduction by the full group: s = 0,
/// h = <lambda, u1 g1 + u2 g2> - (u1^2 + u2^2)/2, Casimir "lambda3".
ReducedProblem heisenberg_reduced_problem();

/// Costate p at chart point x with body momentum lambda.
Vec heisenberg_costate(const Vec& x, const Vec& lambda);

/// (cos theta, sin theta, k)
Vec heisenberg_lambda(double theta, double k);

std::vector<std::string> builtin_names();
/// Throws ArgumentError for unknown names.
ControlProblem builtin_problem(const std::string& name);
ReducedProblem builtin_reduced_problem(const std::string& name);

}  // namespace geopmp
