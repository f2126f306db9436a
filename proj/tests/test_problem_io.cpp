#include "geopmp/builtin.hpp"
#include "geopmp/pmp.hpp"
#include "geopmp/problem_io.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace geopmp;
using geopmp::testing::random_vec;
using geopmp::testing::vec;

namespace {

ProblemDefinition parse(const std::string& text)
{
  std::istringstream is(text);
  return parse_problem(is);
}

std::string source(const std::string& rel) { return std::string(GEOPMP_SOURCE_DIR) + "/" + rel; }

}  // namespace

TEST(ProblemFile, HeisenbergMatchesBuiltin)
{
  const ProblemDefinition def = load_problem(source("problems/heisenberg.json"));
  ASSERT_TRUE(def.full.has_value());
  ASSERT_TRUE(def.reduced.has_value());
  const ControlProblem& f = *def.full;
  const ControlProblem b = heisenberg_problem();
  EXPECT_EQ(f.name(), "heisenberg");
  EXPECT_EQ(f.n(), 3);
  EXPECT_EQ(f.r(), 2);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    const Vec x = random_vec(rng, 3, 2), u = random_vec(rng, 2, 2);
    const AlgebraElement xi{random_vec(rng, 3)};
    EXPECT_LE((f.dynamics(x, u) - b.dynamics(x, u)).norm(), 1e-14);
    EXPECT_NEAR(f.lagrangian(x, u), b.lagrangian(x, u), 1e-14);
    const Symmetry& fs = f.require_symmetry();
    const Symmetry& bs = b.require_symmetry();
    EXPECT_LE((fs.infinitesimal_action(xi, x) - bs.infinitesimal_action(xi, x)).norm(), 1e-14);
    EXPECT_LE((fs.left_invariant_field(xi, x) - bs.left_invariant_field(xi, x)).norm(), 1e-14);
    EXPECT_LE((fs.finite_action(xi, x) - bs.finite_action(xi, x)).norm(), 1e-14);
  }
  EXPECT_TRUE(f.require_symmetry().algebra.has_matrix_basis());
  EXPECT_EQ(def.reduced->base_dim(), 0);
  ASSERT_EQ(def.reduced->casimirs().size(), 1u);
  EXPECT_EQ(def.reduced->casimirs()[0].name, "lambda3");
  EXPECT_TRUE(check_invariance(f, 10, 3).invariant);
}

TEST(ProblemFile, FileProblemIntegrates)
{
  const ProblemDefinition def = load_problem(source("problems/heisenberg.json"));
  PmpConfig cfg;
  cfg.newton_tol = 1e-8;
  const Trajectory tr = integrate_pmp(*def.full, Vec::Zero(3), vec({1, 0, 1}), 1.0, cfg);
  const Vec end = tr.block(tr.size() - 1, "x");
  EXPECT_LE((end - vec({std::sin(1.0), 1 - std::cos(1.0), 0.5 - std::sin(1.0) / 2})).norm(), 1e-6);
}

TEST(ProblemFile, MinimalProblem)
{
  const ProblemDefinition def = load_problem(source("problems/planar_rotor.json"));
  ASSERT_TRUE(def.full.has_value());
  EXPECT_FALSE(def.reduced.has_value());
  EXPECT_FALSE(def.full->symmetry().has_value());
  EXPECT_NEAR(def.full->dynamics(vec({M_PI / 2, 3}), vec({2}))[1], 1.0, 1e-15);
}

TEST(ProblemFile, Errors)
{
  EXPECT_THROW(parse("{"), ArgumentError);
  EXPECT_THROW(parse(R"({"n": 1, "r": 1, "dynamics": ["u1"]})"), ArgumentError);
  EXPECT_THROW(parse(R"({"n": 2, "r": 1, "dynamics": ["u1"], "lagrangian": "u1"})"), ArgumentError);
  EXPECT_THROW(parse(R"({"n": 1, "r": 1, "dynamics": ["q1"], "lagrangian": "u1"})"), ArgumentError);
  EXPECT_THROW(parse(R"({"n": 1, "r": 1, "dynamics": ["u1 +"], "lagrangian": "u1"})"), ArgumentError);
  EXPECT_THROW(parse(R"({"n": 1, "r": 1, "dynamics": ["u1"], "lagrangian": "u1",
                         "action": {"infinitesimal": ["g1"]}})"),
               ArgumentError);
  EXPECT_THROW(load_problem(source("problems/missing.json")), ArgumentError);
}

TEST(Algebra, Parse)
{
  std::istringstream is(R"({"dim": 3, "structure": [[1, 2, 3, 1], [2, 3, 1, 1], [3, 1, 2, 1]]})");
  const LieAlgebra a = parse_algebra(is);
  EXPECT_EQ(a.dim(), 3);
  EXPECT_EQ(a.c(0, 1, 2), 1.0);
  EXPECT_EQ(a.c(1, 0, 2), -1.0);
  EXPECT_FALSE(a.has_matrix_basis());
  std::istringstream bad(R"({"dim": 2, "structure": [[1, 3, 1, 1]]})");
  EXPECT_THROW(parse_algebra(bad), ArgumentError);
  std::istringstream jacobi(R"({"dim": 3, "structure": [[1, 2, 1, 1], [2, 3, 2, 1], [1, 3, 1, 1]]})");
  EXPECT_THROW(parse_algebra(jacobi), ArgumentError);
}
