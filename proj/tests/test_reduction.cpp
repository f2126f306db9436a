#include "geopmp/builtin.hpp"
#include "geopmp/reduction.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace geopmp;
using geopmp::testing::random_vec;
using geopmp::testing::vec;

namespace {

/// s = 1 over an abelian line: l = (u^2 + z^2)/2, Gamma~ = u, gamma~ = u.
ReducedProblem abelian_line(ReducedProblem::Curvature curvature = {})
{
  return ReducedProblem(
      "abelian_line", 1, abelian_algebra(1), 1,
      [](const Vec& z, const Vec& u) { return 0.5 * (u[0] * u[0] + z[0] * z[0]); },
      [](const Vec&, const Vec& u) { return u; }, [](const Vec&, const Vec& u) { return u; },
      std::move(curvature));
}

ReducedState heisenberg_state(const Vec& lambda, const Vec& u) { return {Vec(0), Vec(0), {lambda}, u}; }

}  // namespace

TEST(ReducedProblem, Validation)
{
  const ReducedProblem h = heisenberg_reduced_problem();
  EXPECT_EQ(h.base_dim(), 0);
  EXPECT_EQ(h.control_dim(), 2);
  EXPECT_FALSE(h.has_curvature());
  EXPECT_EQ(h.curvature_antisymmetry_defect(), 0.0);
  const ReducedProblem sym = abelian_line([](const Vec&, const Vec& mu, const Vec& v, const Vec& w) {
    return mu[0] * v[0] * w[0];
  });
  EXPECT_GT(sym.curvature_antisymmetry_defect(), 0.0);
}

TEST(Hamiltonian, HeisenbergExamples)
{
  const ReducedProblem h = heisenberg_reduced_problem();
  const Vec lambda = vec({0.4, -1.1, 2.0}), u = vec({0.3, 0.8});
  EXPECT_NEAR(reduced_hamiltonian(h, heisenberg_state(lambda, u)),
              lambda[0] * u[0] + lambda[1] * u[1] - 0.5 * u.squaredNorm(), 1e-15);
  const FeedbackSolution s = eliminate_controls_reduced(h, Vec(0), Vec(0), {lambda}, Vec::Zero(2));
  EXPECT_NEAR(reduced_hamiltonian(h, heisenberg_state(lambda, s.u)),
              0.5 * (lambda[0] * lambda[0] + lambda[1] * lambda[1]), 1e-15);
}

TEST(Hamiltonian, PureBaseTerm)
{
  const ReducedProblem p("base_only", 2, abelian_algebra(1), 1, [](const Vec&, const Vec&) { return 0.0; },
                         [](const Vec& z, const Vec& u) { return vec({z[1], u[0]}); },
                         [](const Vec&, const Vec&) { return Vec::Zero(1); });
  const ReducedState st{vec({1, 2}), vec({3, 4}), {vec({9})}, vec({5})};
  EXPECT_DOUBLE_EQ(reduced_hamiltonian(p, st), 3 * 2 + 4 * 5);
}

TEST(Elimination, HeisenbergExamples)
{
  const ReducedProblem h = heisenberg_reduced_problem();
  const Vec lambda = vec({0.6, -0.2, 3.0});
  const FeedbackSolution s = eliminate_controls_reduced(h, Vec(0), Vec(0), {lambda}, vec({5, 5}));
  EXPECT_NEAR(s.u[0], 0.6, 1e-15);
  EXPECT_NEAR(s.u[1], -0.2, 1e-15);
  EXPECT_EQ(eliminate_controls_reduced(h, Vec(0), Vec(0), {Vec::Zero(3)}, vec({1, 1})).u, Vec::Zero(2));
  const FeedbackSolution again = eliminate_controls_reduced(h, Vec(0), Vec(0), {lambda}, s.u);
  EXPECT_EQ(again.iterations, 0);
  EXPECT_EQ(again.u, s.u);
}

TEST(Rhs, HeisenbergExamples)
{
  const ReducedProblem h = heisenberg_reduced_problem();
  const double k = 1.7;
  const ReducedRhs r = reduced_pmp_rhs(h, heisenberg_state(vec({1, 0, k}), vec({1, 0})));
  EXPECT_LE((r.xi.coeffs - vec({1, 0, 0})).norm(), 1e-15);
  EXPECT_LE((r.mudot.coeffs - vec({0, k, 0})).norm(), 1e-15);
  EXPECT_EQ(r.zdot.size(), 0);
  EXPECT_EQ(r.pzdot.size(), 0);

  const ReducedRhs eq = reduced_pmp_rhs(h, heisenberg_state(vec({0, 0, k}), vec({0, 0})));
  EXPECT_EQ(eq.xi.coeffs, Vec::Zero(3));
  EXPECT_EQ(eq.mudot.coeffs, Vec::Zero(3));

  ReducedConfig flipped;
  flipped.coadjoint_sign = -1.0;
  const ReducedRhs f = reduced_pmp_rhs(h, heisenberg_state(vec({1, 0, k}), vec({1, 0})), flipped);
  EXPECT_LE((f.mudot.coeffs - vec({0, -k, 0})).norm(), 1e-15);
}

TEST(Rhs, AbelianIsCanonical)
{
  const ReducedProblem p = abelian_line();
  const ReducedState st{vec({0.7}), vec({-0.3}), {vec({0.5})}, vec({0.2})};
  const ReducedRhs r = reduced_pmp_rhs(p, st);
  EXPECT_NEAR(r.zdot[0], 0.2, 1e-9);
  EXPECT_NEAR(r.pzdot[0], 0.7, 1e-8);
  EXPECT_EQ(r.mudot.coeffs, Vec::Zero(1));
  EXPECT_NEAR(r.xi.coeffs[0], 0.2, 1e-9);
}

TEST(Rhs, CurvatureForce)
{
  // s = 2 with <mu, F(v, w)> = mu (v1 w2 - v2 w1): a magnetic term.
  const ReducedProblem p(
      "magnetic", 2, abelian_algebra(1), 2, [](const Vec&, const Vec& u) { return 0.5 * u.squaredNorm(); },
      [](const Vec&, const Vec& u) { return u; }, [](const Vec&, const Vec&) { return Vec::Zero(1); },
      [](const Vec&, const Vec& mu, const Vec& v, const Vec& w) { return mu[0] * (v[0] * w[1] - v[1] * w[0]); });
  EXPECT_LE(p.curvature_antisymmetry_defect(), 1e-12);
  const ReducedState st{vec({0, 0}), vec({1, 0}), {vec({2})}, vec({1, 0})};
  const ReducedRhs r = reduced_pmp_rhs(p, st);
  EXPECT_NEAR(r.zdot[0], 1.0, 1e-9);
  // -F(z_dot, .) = -mu (z1_dot e2* - z2_dot e1*) = (0, -2)
  EXPECT_NEAR(r.pzdot[0], 0.0, 1e-8);
  EXPECT_NEAR(r.pzdot[1], -2.0, 1e-8);
}

TEST(Integrate, HeisenbergClosedForm)
{
  const ReducedProblem h = heisenberg_reduced_problem();
  for (auto [th, k] : {std::pair{0.0, 1.0}, std::pair{0.3, 1.7}, std::pair{-1.2, -0.5}}) {
    const Trajectory tr = integrate_reduced(h, heisenberg_state(heisenberg_lambda(th, k), Vec::Zero(2)), 2 * M_PI);
    double err = 0.0, hdrift = 0.0, cdrift = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const double t = tr.times()[i];
      err = std::max(err, (tr.block(i, "mu") - heisenberg_lambda(th + k * t, k)).cwiseAbs().maxCoeff());
      hdrift = std::max(hdrift, std::abs(tr.channel("h")[i] - 0.5));
      cdrift = std::max(cdrift, std::abs(tr.channel("casimir_lambda3")[i] - k));
    }
    EXPECT_LE(err, 1e-6);
    EXPECT_LE(hdrift, 1e-6);
    EXPECT_LE(cdrift, 1e-9);
  }
}

TEST(Integrate, ZeroHorizon)
{
  const Trajectory tr =
      integrate_reduced(heisenberg_reduced_problem(), heisenberg_state(vec({1, 2, 3}), Vec::Zero(2)), 0.0);
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr.block(0, "mu"), vec({1, 2, 3}));
}

TEST(Projection, IdentityGivesCostate)
{
  const ControlProblem h = heisenberg_problem();
  const Vec p = vec({0.4, -0.9, 1.3});
  const ReducedState st = project_full_to_reduced(h, {Vec::Zero(3), p, vec({1, 2})});
  EXPECT_LE((st.mu.coeffs - p).norm(), 1e-15);
  EXPECT_EQ(st.z.size(), 0);
  EXPECT_EQ(st.u, vec({1, 2}));
}

TEST(Projection, InverseAndBuiltinAgree)
{
  std::mt19937_64 rng(6);
  const ControlProblem h = heisenberg_problem();
  for (int i = 0; i < 20; ++i) {
    const Vec x = random_vec(rng, 3, 3), lambda = random_vec(rng, 3, 3);
    const Vec p = costate_from_body_momentum(h, x, lambda);
    EXPECT_LE((p - heisenberg_costate(x, lambda)).norm(), 1e-12);
    EXPECT_LE((project_full_to_reduced(h, {x, p, Vec::Zero(2)}).mu.coeffs - lambda).norm(), 1e-12);
  }
}

TEST(Projection, LeftTranslationInvariance)
{
  // Moving the start point by a group element while keeping the body momentum fixed.
  std::mt19937_64 rng(7);
  const ControlProblem h = heisenberg_problem();
  const Vec lambda = vec({0.2, 0.9, -0.7});
  const Trajectory a = integrate_pmp(h, Vec::Zero(3), heisenberg_costate(Vec::Zero(3), lambda), 1.0);
  for (int i = 0; i < 5; ++i) {
    const Vec x0 = random_vec(rng, 3, 2);
    const Trajectory b = integrate_pmp(h, x0, heisenberg_costate(x0, lambda), 1.0);
    for (std::size_t j = 0; j < a.size(); j += 100) {
      const Vec la = project_full_to_reduced(h, pontryagin_point(a, j)).mu.coeffs;
      const Vec lb = project_full_to_reduced(h, pontryagin_point(b, j)).mu.coeffs;
      EXPECT_LE((la - lb).norm(), 1e-12);
    }
  }
}

TEST(Projection, CommutesWithIntegration)
{
  const ControlProblem h = heisenberg_problem();
  const Vec lambda0 = heisenberg_lambda(0.3, 1.7);
  const Trajectory full = integrate_pmp(h, Vec::Zero(3), lambda0, 2 * M_PI);
  const Trajectory red =
      integrate_reduced(heisenberg_reduced_problem(), heisenberg_state(lambda0, Vec::Zero(2)), 2 * M_PI);
  ASSERT_EQ(full.size(), red.size());
  double dev = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    dev = std::max(dev, (project_full_to_reduced(h, pontryagin_point(full, i)).mu.coeffs - red.block(i, "mu")).norm());
  }
  EXPECT_LE(dev, 1e-5);
}

TEST(Projection, UnsupportedWithoutLeftInvariantFrame)
{
  Symmetry sym{abelian_algebra(1), {}, {}, {}};
  sym.infinitesimal_action = [](const AlgebraElement& xi, const Vec&) { return vec({xi.coeffs[0], 0}); };
  const ControlProblem p("cylinder", 2, 1, [](const Vec&, const Vec& u) { return vec({u[0], 0}); },
                         [](const Vec&, const Vec& u) { return u[0] * u[0]; }, {}, sym);
  EXPECT_THROW(project_full_to_reduced(p, {vec({0, 0}), vec({1, 1}), vec({0})}), UnsupportedError);
  EXPECT_THROW(costate_from_body_momentum(p, vec({0, 0}), vec({1})), UnsupportedError);
}

TEST(Membership, AlongReducedTrajectory)
{
  const ReducedProblem h = heisenberg_reduced_problem();
  const Trajectory tr = integrate_reduced(h, heisenberg_state(heisenberg_lambda(0.3, 1.7), Vec::Zero(2)), 2 * M_PI);
  ReducedConfig cfg;
  for (std::size_t i = 0; i < tr.size(); i += 7) {
    const ReducedState st = reduced_state(tr, i);
    const ReducedRhs r = reduced_pmp_rhs(h, st, cfg);
    EXPECT_TRUE(membership_check_reduced(h.algebra(), st.mu, r.mudot, r.xi, r.xi, 1e-6));
    CoalgebraElement bent = r.mudot;
    bent.coeffs[1] += 1e-2;
    EXPECT_FALSE(membership_check_reduced(h.algebra(), st.mu, bent, r.xi, r.xi, 1e-6));
  }
  double worst = 0.0;
  for (double v : reduced_trajectory_membership(h, tr)) worst = std::max(worst, v);
  EXPECT_LE(worst, 1e-6);
}

TEST(Membership, AbelianSymplectic)
{
  const LieAlgebra a = abelian_algebra(2);
  const AlgebraElement xi{vec({0.5, -1})};
  EXPECT_TRUE(membership_check_reduced(a, {vec({3, 4})}, {Vec::Zero(2)}, xi, xi, 1e-12));
  EXPECT_FALSE(membership_check_reduced(a, {vec({3, 4})}, {vec({0.1, 0})}, xi, xi, 1e-6));
}

TEST(Membership, FiberIncludingBase)
{
  const ReducedProblem p = abelian_line();
  const LinearDiracStructure d = reduced_pontryagin_fiber(p, vec({0.3}), {vec({1.2})});
  EXPECT_TRUE(is_dirac(d));
  EXPECT_EQ(d.base_dim(), 4);
  const ReducedProblem h = heisenberg_reduced_problem();
  const CoalgebraElement mu{vec({0.1, 0.2, 0.3})};
  EXPECT_TRUE(subspace_equal(reduced_pontryagin_fiber(h, Vec(0), mu), reduced_dirac_fiber(h.algebra(), mu)));
}

TEST(Membership, FullTrajectory)
{
  const Trajectory tr = integrate_pmp(heisenberg_problem(), Vec::Zero(3), vec({1, 0, 1}), 1.0);
  double worst = 0.0;
  for (double v : pmp_trajectory_membership(heisenberg_problem(), tr)) worst = std::max(worst, v);
  EXPECT_LE(worst, 1e-6);
}
