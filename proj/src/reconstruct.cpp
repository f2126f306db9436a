#include "geopmp/reconstruct.hpp"

#include <algorithm>
#include <cmath>

namespace geopmp {

std::vector<GroupElement> reconstruct_group(const LieAlgebra& alg, const GroupElement& g0,
                                            const std::vector<AlgebraElement>& xi, double step)
{
  if (!alg.has_matrix_basis()) throw ArgumentError("reconstruct_group: algebra has no matrix basis");
  const auto m = alg.matrix_basis().front().rows();
  if (g0.matrix.rows() != m || g0.matrix.cols() != m) {
    throw ArgumentError("reconstruct_group: g0 does not match the matrix realization");
  }
  if (!(step > 0.0) || !std::isfinite(step)) throw ArgumentError("reconstruct_group: step must be positive");
  if (xi.empty()) throw ArgumentError("reconstruct_group: no velocity samples");
  for (const auto& x : xi) require_size(x.coeffs, alg.dim(), "reconstruct_group velocity");

  std::vector<GroupElement> curve;
  curve.reserve(xi.size());
  curve.push_back(g0);
  for (std::size_t k = 0; k + 1 < xi.size(); ++k) {
    const AlgebraElement increment{0.5 * step * (xi[k].coeffs + xi[k + 1].coeffs)};
    curve.push_back(compose(curve.back(), exp_nilpotent(alg, increment)));
  }
  return curve;
}

std::vector<AlgebraElement> reduced_velocities(const ReducedProblem& rp, const Trajectory& traj)
{
  std::vector<AlgebraElement> xi;
  xi.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const ReducedState st = reduced_state(traj, i);
    xi.push_back(AlgebraElement{rp.algebra_dynamics(st.z, st.u)});
  }
  return xi;
}

double uniform_step(const Trajectory& traj)
{
  const auto& t = traj.times();
  if (t.size() < 2) return 0.0;
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * (1.0 + std::abs(t[i]))) {
      throw ArgumentError("trajectory times are not uniformly spaced");
    }
  }
  return h;
}

Vec heisenberg_chart(const GroupElement& g)
{
  if (g.matrix.rows() != 3 || g.matrix.cols() != 3 || !is_unitriangular(g)) {
    throw ArgumentError("heisenberg_chart: expected a unitriangular 3x3 matrix");
  }
  const double a = g.matrix(0, 1);
  const double b = g.matrix(1, 2);
  const double c = g.matrix(0, 2);
  return Eigen::Vector3d(a, b, c - 0.5 * a * b);
}

GroupElement heisenberg_from_chart(const Vec& xyz)
{
  require_size(xyz, 3, "Heisenberg chart point");
  Mat g = Mat::Identity(3, 3);
  g(0, 1) = xyz[0];
  g(1, 2) = xyz[1];
  g(0, 2) = xyz[2] + 0.5 * xyz[0] * xyz[1];
  return GroupElement{g};
}

Trajectory heisenberg_chart_trajectory(const std::vector<double>& times,
                                       const std::vector<GroupElement>& curve)
{
  if (times.size() != curve.size()) throw ArgumentError("times and group curve differ in length");
  Trajectory out({{"x", 3}});
  for (std::size_t i = 0; i < curve.size(); ++i) out.append(times[i], heisenberg_chart(curve[i]));
  return out;
}

Trajectory heisenberg_geodesic_oracle(double theta, double k, double T, double step)
{
  if (!std::isfinite(theta) || !std::isfinite(k)) throw ArgumentError("oracle: non-finite theta or k");
  const TimeGrid grid = make_time_grid(T, step);
  auto rhs = [&](double t, const Eigen::Vector3d& s) {
    const double l1 = std::cos(theta + k * t);
    const double l2 = std::sin(theta + k * t);
    return Eigen::Vector3d(l1, l2, 0.5 * (s[0] * l2 - s[1] * l1));
  };
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  Trajectory out({{"x", 3}});
  out.append(0.0, s);
  const double h = grid.step;
  for (int i = 0; i < grid.steps; ++i) {
    const double t = i * h;
    const Eigen::Vector3d k1 = rhs(t, s);
    const Eigen::Vector3d k2 = rhs(t + 0.5 * h, s + 0.5 * h * k1);
    const Eigen::Vector3d k3 = rhs(t + 0.5 * h, s + 0.5 * h * k2);
    const Eigen::Vector3d k4 = rhs(t + h, s + h * k3);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.append(i + 1 == grid.steps ? T : (i + 1) * h, s);
  }
  return out;
}

Vec heisenberg_geodesic_exact(double theta, double k, double t)
{
  if (k == 0.0) {
    return Eigen::Vector3d(t * std::cos(theta), t * std::sin(theta), 0.0);
  }
  return Eigen::Vector3d((std::sin(theta + k * t) - std::sin(theta)) / k,
                         (std::cos(theta) - std::cos(theta + k * t)) / k,
                         t / (2.0 * k) - std::sin(k * t) / (2.0 * k * k));
}

double max_radial_deviation(const Trajectory& chart, const Vec& center, double radius)
{
  require_size(center, 2, "circle center");
  double worst = 0.0;
  for (std::size_t i = 0; i < chart.size(); ++i) {
    const Vec x = chart.block(i, "x");
    worst = std::max(worst, std::abs((x.head(2) - center).norm() - radius));
  }
  return worst;
}

GeodesicReport heisenberg_geodesic_report(double theta, double k, double T, double step,
                                          double tolerance)
{
  if (k == 0.0) throw ArgumentError("geodesic report: the printed closed forms need k != 0");
  GeodesicReport rep;
  rep.theta = theta;
  rep.k = k;
  rep.T = T;
  rep.step = step;
  rep.tolerance = tolerance;

  const Trajectory oracle = heisenberg_geodesic_oracle(theta, k, T, step);
  rep.printed = {
      {"x", "x(t) = sin(k t + theta)/k - sin(theta)/k", 0.0, false},
      {"y", "y(t) = cos(k t + theta)/k + cos(theta)/k", 0.0, false},
      {"z", "z(t) = sin(k t)/k^2 + t/k", 0.0, false},
  };
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    const double t = oracle.times()[i];
    const Vec s = oracle.block(i, "x");
    const double printed[3] = {
        std::sin(k * t + theta) / k - std::sin(theta) / k,
        std::cos(k * t + theta) / k + std::cos(theta) / k,
        std::sin(k * t) / (k * k) + t / k,
    };
    for (int c = 0; c < 3; ++c) {
      rep.printed[c].max_deviation = std::max(rep.printed[c].max_deviation, std::abs(printed[c] - s[c]));
    }
    rep.exact_deviation =
        std::max(rep.exact_deviation, (heisenberg_geodesic_exact(theta, k, t) - s).lpNorm<Eigen::Infinity>());
  }
  for (auto& c : rep.printed) c.matches = c.max_deviation <= tolerance;

  const Vec center = Eigen::Vector2d(-std::sin(theta) / k, std::cos(theta) / k);
  rep.radial_deviation = max_radial_deviation(oracle, center, 1.0 / std::abs(k));

  rep.consistent = std::all_of(rep.printed.begin(), rep.printed.end(), [&](const PrintedComponent& c) {
    return std::isfinite(c.max_deviation) && c.matches == (c.max_deviation <= tolerance);
  });
  return rep;
}

}  // namespace geopmp
