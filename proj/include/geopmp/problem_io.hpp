#pragma once

#include "geopmp/lie.hpp"
#include "geopmp/ocp.hpp"
#include "geopmp/reduction.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace geopmp {

/**
 * Problem read from a JSON document:
 *
 *   {
 *     "name": "heisenberg",
 *     "n": 3, "r": 2,
 *     "dynamics": ["u1", "u2", "(x1*u2 - x2*u1)/2"],
 *     "lagrangian": "0.5*(u1^2+u2^2)",
 *     "algebra": {"dim": 3, "structure": [[1, 2, 3, 1]],
 *                 "matrix_basis": [[[0,1,0],[0,0,0],[0,0,0]], ...],
 *                 "labels": ["g1", "g2", "g3"]},
 *     "action": {"infinitesimal": [...], "left_invariant": [...], "finite": [...]},
 *     "reduced": {"base_dim": 0, "base_dynamics": [], "algebra_dynamics": ["u1", "u2", "0"],
 *                 "lagrangian": "0.5*(u1^2+u2^2)", "curvature": "...",
 *                 "casimirs": {"lambda3": "mu3"}}
 *   }
 *
 * Variables: x1..xn and u1..ur in dynamics and lagrangian; x1..xn and the
 * algebra coordinates g1..gd in the action lists (vector fields or, for
 * "finite", the image of x under exp(g)); z1..zs and u1..ur in the reduced
 * dynamics; z, mu1..mud, v1..vs, w1..ws in the curvature; mu1..mud in
 * Casimirs. Structure entries [i, j, k, value] are one-based and mean
 * [e_i, e_j] has value in e_k; the antisymmetric partner is implied.
 *
 * "algebra" is required by "action" and "reduced"; everything after
 * "lagrangian" is optional. Derivatives come from finite differences.
 */
struct ProblemDefinition
{
  std::optional<ControlProblem> full;
  std::optional<ReducedProblem> reduced;
};

ProblemDefinition parse_problem(std::istream& is);
ProblemDefinition load_problem(const std::string& path);

/// Algebra from its JSON object {"dim", "structure", "matrix_basis", "labels"}.
LieAlgebra parse_algebra(std::istream& is);

}  // namespace geopmp
