#include "geopmp/builtin.hpp"
#include "geopmp/reconstruct.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace geopmp;
using geopmp::testing::vec;

namespace {

std::vector<AlgebraElement> xi_samples(double th, double k, double T, int steps)
{
  std::vector<AlgebraElement> xi;
  for (int i = 0; i <= steps; ++i) {
    const double t = T * i / steps;
    xi.push_back({vec({std::cos(th + k * t), std::sin(th + k * t), 0})});
  }
  return xi;
}

Vec endpoint(double th, double k, double T, int steps)
{
  const auto g = reconstruct_group(heisenberg_algebra(), group_identity(heisenberg_algebra()),
                                   xi_samples(th, k, T, steps), T / steps);
  return heisenberg_chart(g.back());
}

}  // namespace

TEST(Chart, Examples)
{
  const LieAlgebra h = heisenberg_algebra();
  EXPECT_EQ(heisenberg_chart(group_identity(h)), Vec::Zero(3));
  const double a = 0.7, b = -1.3, c = 2.2;
  EXPECT_LE((heisenberg_chart(exp_nilpotent(h, {vec({a, b, c})})) - vec({a, b, c})).norm(), 1e-15);
  EXPECT_EQ(heisenberg_chart(exp_nilpotent(h, {vec({0, 0, 1})})), vec({0, 0, 1}));
  EXPECT_LE((heisenberg_chart(heisenberg_from_chart(vec({a, b, c}))) - vec({a, b, c})).norm(), 1e-15);
  GroupElement bad{Mat::Identity(3, 3)};
  bad.matrix(1, 0) = 0.1;
  EXPECT_THROW(heisenberg_chart(bad), ArgumentError);
  EXPECT_THROW(heisenberg_chart({Mat::Identity(4, 4)}), ArgumentError);
}

TEST(Reconstruct, ZeroVelocity)
{
  const LieAlgebra h = heisenberg_algebra();
  const GroupElement g0 = heisenberg_from_chart(vec({1, 2, 3}));
  const auto g = reconstruct_group(h, g0, std::vector<AlgebraElement>(11, {Vec::Zero(3)}), 0.1);
  ASSERT_EQ(g.size(), 11u);
  for (const auto& gk : g) EXPECT_EQ(gk.matrix, g0.matrix);
}

TEST(Reconstruct, ConstantVelocityIsOneParameterSubgroup)
{
  const LieAlgebra h = heisenberg_algebra();
  const GroupElement g0 = heisenberg_from_chart(vec({0.5, -0.5, 0.25}));
  const AlgebraElement xi{vec({0.3, 1.1, -0.4})};
  const auto g = reconstruct_group(h, g0, std::vector<AlgebraElement>(101, xi), 0.01);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const AlgebraElement txi{xi.coeffs * (0.01 * i)};
    const Mat expected = compose(g0, exp_nilpotent(h, txi)).matrix;
    EXPECT_LE((g[i].matrix - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(is_unitriangular(g[i], 0.0));
  }
}

TEST(Reconstruct, CircleOfRadiusOneOverK)
{
  const double th = 0.0, k = 1.0, T = 2 * M_PI;
  const int steps = 6284;
  const auto xi = xi_samples(th, k, T, steps);
  const auto g = reconstruct_group(heisenberg_algebra(), group_identity(heisenberg_algebra()), xi, T / steps);
  std::vector<double> times;
  for (int i = 0; i <= steps; ++i) times.push_back(T * i / steps);
  const Trajectory chart = heisenberg_chart_trajectory(times, g);
  EXPECT_LE(max_radial_deviation(chart, vec({-std::sin(th) / k, std::cos(th) / k}), 1 / k), 1e-5);
  const Vec end = chart.block(chart.size() - 1, "x");
  EXPECT_LE(std::hypot(end[0], end[1]), 1e-5);
  EXPECT_NEAR(end[2], M_PI, 1e-5);
}

TEST(Reconstruct, SecondOrder)
{
  const double th = 0.4, k = 1.3, T = 2.0;
  const Vec ref = endpoint(th, k, T, 640);
  const double e1 = (endpoint(th, k, T, 40) - ref).norm();
  const double e2 = (endpoint(th, k, T, 80) - ref).norm();
  EXPECT_GE(e1 / e2, 3.5);
}

TEST(Reconstruct, Validation)
{
  const LieAlgebra h = heisenberg_algebra();
  EXPECT_THROW(reconstruct_group(h, group_identity(h), {}, 0.1), ArgumentError);
  EXPECT_THROW(reconstruct_group(h, group_identity(h), std::vector<AlgebraElement>(3, {Vec::Zero(3)}), 0.0),
               ArgumentError);
}

TEST(Reconstruct, FromReducedTrajectory)
{
  const ReducedProblem rp = heisenberg_reduced_problem();
  const Trajectory red =
      integrate_reduced(rp, {Vec(0), Vec(0), {heisenberg_lambda(0.3, 1.7)}, Vec::Zero(2)}, 2 * M_PI / 1.7);
  const double step = uniform_step(red);
  const auto xi = reduced_velocities(rp, red);
  ASSERT_EQ(xi.size(), red.size());
  for (const auto& v : xi) EXPECT_NEAR(v.coeffs.head(2).squaredNorm(), 1.0, 1e-6);
  const auto g = reconstruct_group(rp.algebra(), group_identity(rp.algebra()), xi, step);
  const Trajectory chart = heisenberg_chart_trajectory(red.times(), g);
  EXPECT_LE(max_radial_deviation(chart, vec({-std::sin(0.3) / 1.7, std::cos(0.3) / 1.7}), 1 / 1.7), 1e-5);
}

TEST(UniformStep, RejectsUnevenGrid)
{
  Trajectory tr({{"x", 1}});
  tr.append(0.0, vec({0}));
  tr.append(0.1, vec({0}));
  tr.append(0.3, vec({0}));
  EXPECT_THROW(uniform_step(tr), ArgumentError);
}

TEST(Oracle, MatchesClosedForm)
{
  for (auto [th, k] : {std::pair{0.0, 1.0}, std::pair{0.3, 1.7}, std::pair{2.0, -0.8}}) {
    const double T = 2 * M_PI / std::abs(k);
    const Trajectory o = heisenberg_geodesic_oracle(th, k, T, 1e-3);
    double dev = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i) {
      dev = std::max(dev, (o.block(i, "x") - heisenberg_geodesic_exact(th, k, o.times()[i])).norm());
    }
    EXPECT_LE(dev, 1e-10);
    EXPECT_LE(max_radial_deviation(o, vec({-std::sin(th) / k, std::cos(th) / k}), 1 / std::abs(k)), 1e-5);
    const Vec end = o.block(o.size() - 1, "x");
    EXPECT_LE(std::hypot(end[0], end[1]), 1e-9);
    EXPECT_GT(std::abs(end[2]), 0.1);
  }
}

TEST(Oracle, StraightLine)
{
  const Trajectory o = heisenberg_geodesic_oracle(0.0, 0.0, 2.0, 0.01);
  for (std::size_t i = 0; i < o.size(); ++i) {
    EXPECT_LE((o.block(i, "x") - vec({o.times()[i], 0, 0})).norm(), 1e-12);
  }
  EXPECT_LE((heisenberg_geodesic_exact(0.5, 0.0, 2.0) - vec({2 * std::cos(0.5), 2 * std::sin(0.5), 0})).norm(),
            1e-15);
}

TEST(Report, PrintedFormulas)
{
  const GeodesicReport r = heisenberg_geodesic_report(0.0, 1.0, 2 * M_PI, 1e-3);
  ASSERT_EQ(r.printed.size(), 3u);
  EXPECT_TRUE(r.consistent);
  EXPECT_TRUE(r.printed[0].matches);
  EXPECT_FALSE(r.printed[1].matches);
  EXPECT_FALSE(r.printed[2].matches);
  EXPECT_NEAR(r.printed[1].max_deviation, 2.0, 1e-3);
  EXPECT_NEAR(r.printed[2].max_deviation, M_PI, 1e-2);
  EXPECT_LE(r.radial_deviation, 1e-5);
  EXPECT_LE(r.exact_deviation, 1e-10);
  EXPECT_THROW(heisenberg_geodesic_report(0.0, 0.0, 1.0, 1e-3), ArgumentError);
}
