#pragma once

#include "geopmp/common.hpp"
#include "geopmp/lie.hpp"
#include "geopmp/reduction.hpp"
#include "geopmp/trajectory.hpp"

#include <string>
#include <vector>

namespace geopmp {

/**
 * Integrates g_dot = g xi(t) from g0 given xi sampled on a uniform grid of
 * width `step`: g_{k+1} = g_k exp(step * (xi_k + xi_{k+1}) / 2). Every
 * iterate is a product of exponentials, so it stays in the group.
 */
std::vector<GroupElement> reconstruct_group(const LieAlgebra& alg, const GroupElement& g0,
                                            const std::vector<AlgebraElement>& xi, double step);

/// xi = gamma~(z, u) at every row of a reduced trajectory.
std::vector<AlgebraElement> reduced_velocities(const ReducedProblem& rp, const Trajectory& traj);

/// Common spacing of the trajectory times; throws ArgumentError if the grid
/// is not uniform to 1e-9 relative.
double uniform_step(const Trajectory& traj);

/// (a, b, c - ab/2) for g = [[1, a, c], [0, 1, b], [0, 0, 1]].
Vec heisenberg_chart(const GroupElement& g);
/// Inverse of heisenberg_chart.
GroupElement heisenberg_from_chart(const Vec& xyz);

/// Chart trajectory (block "x" of size 3) of a Heisenberg group curve.
Trajectory heisenberg_chart_trajectory(const std::vector<double>& times,
                                       const std::vector<GroupElement>& curve);

/**
 * Reference geodesic from the origin: RK4 on
 *   x_dot = l1, y_dot = l2, z_dot = (x l2 - y l1) / 2
 * driven by l1 = cos(theta + k t), l2 = sin(theta + k t). k = 0 gives the
 * straight line in direction theta.
 */
Trajectory heisenberg_geodesic_oracle(double theta, double k, double T, double step);

/// Closed form of the reference geodesic (k != 0).
Vec heisenberg_geodesic_exact(double theta, double k, double t);

struct PrintedComponent
{
  std::string name;     // "x", "y", "z"
  std::string formula;  // as printed
  double max_deviation = 0.0;
  bool matches = false;
};

struct GeodesicReport
{
  double theta = 0.0;
  double k = 0.0;
  double T = 0.0;
  double step = 0.0;
  double tolerance = 1e-5;
  std::vector<PrintedComponent> printed;
  /// Max | |(x, y) - c| - 1/|k| | with c = (-sin theta, cos theta) / k.
  double radial_deviation = 0.0;
  /// Max deviation of the oracle from heisenberg_geodesic_exact.
  double exact_deviation = 0.0;
  /// Every `matches` flag agrees with max_deviation <= tolerance.
  bool consistent = false;
};

/// Compares the printed closed forms for (x, y, z) with the oracle on [0, T].
/// Throws ArgumentError for k = 0.
GeodesicReport heisenberg_geodesic_report(double theta, double k, double T, double step,
                                          double tolerance = 1e-5);

/// Max | |(x, y) - c| - radius | over the rows of a chart trajectory.
double max_radial_deviation(const Trajectory& chart, const Vec& center, double radius);

}  // namespace geopmp
