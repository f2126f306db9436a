#include "geopmp/lie.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace geopmp;
using geopmp::testing::random_vec;
using geopmp::testing::vec;

namespace {

/// so(3): [e1, e2] = e3 and cyclic.
LieAlgebra so3()
{
  return LieAlgebra::from_entries(3, {{0, 1, 2, 1.0}, {1, 2, 0, 1.0}, {2, 0, 1, 1.0}});
}

}  // namespace

TEST(Bracket, HeisenbergGeneratorsGiveCenter)
{
  const LieAlgebra h = heisenberg_algebra();
  EXPECT_EQ(bracket(h, h.basis(0), h.basis(1)).coeffs, vec({0, 0, 1}));
  EXPECT_EQ(bracket(h, h.basis(0), h.basis(2)).coeffs, vec({0, 0, 0}));
  EXPECT_EQ(bracket(h, h.basis(1), h.basis(2)).coeffs, vec({0, 0, 0}));
}

TEST(Bracket, SelfBracketVanishes)
{
  std::mt19937_64 rng(1);
  for (const LieAlgebra& a : {heisenberg_algebra(), so3()}) {
    const AlgebraElement xi{random_vec(rng, 3)};
    EXPECT_LT(bracket(a, xi, xi).coeffs.norm(), 1e-15);
  }
}

TEST(Bracket, DimensionMismatchThrows)
{
  const LieAlgebra h = heisenberg_algebra();
  EXPECT_THROW(bracket(h, {vec({1, 0})}, h.basis(0)), ArgumentError);
}

TEST(Bracket, RandomJacobiIdentity)
{
  std::mt19937_64 rng(2);
  const LieAlgebra a = so3();
  for (int i = 0; i < 100; ++i) {
    const AlgebraElement x{random_vec(rng, 3)}, y{random_vec(rng, 3)}, z{random_vec(rng, 3)};
    const Vec jac = bracket(a, x, bracket(a, y, z)).coeffs + bracket(a, y, bracket(a, z, x)).coeffs +
                    bracket(a, z, bracket(a, x, y)).coeffs;
    EXPECT_LT(jac.norm(), 1e-12);
  }
}

TEST(Pairing, DualBasisAndDot)
{
  const LieAlgebra h = heisenberg_algebra();
  EXPECT_EQ(pairing(h.dual_basis(0), h.basis(0)), 1.0);
  EXPECT_EQ(pairing(h.dual_basis(0), h.basis(1)), 0.0);
  EXPECT_EQ(pairing({vec({2, 0, 1})}, {vec({3, 5, -1})}), 5.0);
  EXPECT_THROW(pairing({vec({1, 2})}, {vec({1, 2, 3})}), ArgumentError);
}

TEST(Coadjoint, HeisenbergExamples)
{
  const LieAlgebra h = heisenberg_algebra();
  EXPECT_EQ(coadjoint(h, h.basis(0), h.dual_basis(2)).coeffs, vec({0, 1, 0}));
  EXPECT_EQ(coadjoint(h, {vec({0.3, -2, 4})}, {Vec::Zero(3)}).coeffs, Vec::Zero(3));
  const double x1 = 0.7, x2 = -1.3, l1 = 0.2, l2 = 0.5, l3 = 2.5;
  EXPECT_EQ(coadjoint(h, {vec({x1, x2, 0})}, {vec({l1, l2, l3})}).coeffs,
            vec({-x2 * l3, x1 * l3, 0}));
}

TEST(Coadjoint, DefiningIdentity)
{
  std::mt19937_64 rng(3);
  for (const LieAlgebra& a : {heisenberg_algebra(), so3()}) {
    for (int i = 0; i < 100; ++i) {
      const AlgebraElement xi{random_vec(rng, 3)}, zeta{random_vec(rng, 3)};
      const CoalgebraElement lambda{random_vec(rng, 3)};
      EXPECT_NEAR(pairing(coadjoint(a, xi, lambda), zeta), pairing(lambda, bracket(a, xi, zeta)),
                  1e-12);
    }
  }
}

TEST(StructureMatrix, MatchesPairedBracket)
{
  const LieAlgebra h = heisenberg_algebra();
  const CoalgebraElement lambda{vec({1, 2, 3})};
  const Mat b = h.structure_matrix(lambda);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_DOUBLE_EQ(b(i, j), pairing(lambda, bracket(h, h.basis(i), h.basis(j))));
    }
  }
}

TEST(Validation, RejectsBrokenConstants)
{
  std::vector<double> c(27, 0.0);
  c[(0 * 3 + 1) * 3 + 2] = 1.0;
  EXPECT_THROW(LieAlgebra(3, c), ArgumentError);
  // antisymmetric, Jacobi fails
  EXPECT_THROW(LieAlgebra::from_entries(3, {{0, 1, 0, 1.0}, {1, 2, 1, 1.0}, {0, 2, 0, 1.0}}),
               ArgumentError);
  EXPECT_THROW(LieAlgebra::from_entries(2, {{0, 1, 0, 1.0}, {1, 0, 0, 1.0}}), ArgumentError);
  EXPECT_THROW(LieAlgebra::from_entries(2, {{0, 0, 1, 1.0}}), ArgumentError);
}

TEST(Validation, MatrixBasisMustRealizeConstants)
{
  const LieAlgebra h = heisenberg_algebra();
  std::vector<Mat> swapped = h.matrix_basis();
  std::swap(swapped[0], swapped[1]);
  EXPECT_THROW(LieAlgebra::from_entries(3, {{0, 1, 2, 1.0}}, swapped), ArgumentError);
}

TEST(Validation, HeisenbergAndAbelianAreValid)
{
  EXPECT_EQ(heisenberg_algebra().jacobi_defect(), 0.0);
  const LieAlgebra a = abelian_algebra(4);
  EXPECT_EQ(a.dim(), 4);
  EXPECT_EQ(a.structure_matrix({vec({1, 2, 3, 4})}), Mat::Zero(4, 4));
}

TEST(Exp, HeisenbergClosedForm)
{
  const LieAlgebra h = heisenberg_algebra();
  const double a = 0.7, b = -1.1, c = 2.3;
  const Mat g = exp_nilpotent(h, {vec({a, b, c})}).matrix;
  Mat expected = Mat::Identity(3, 3);
  expected(0, 1) = a;
  expected(1, 2) = b;
  expected(0, 2) = c + a * b / 2;
  EXPECT_LT((g - expected).norm(), 1e-15);
  EXPECT_EQ(exp_nilpotent(h, {Vec::Zero(3)}).matrix, Mat::Identity(3, 3));
  Mat center = Mat::Identity(3, 3);
  center(0, 2) = 1.0;
  EXPECT_EQ(exp_nilpotent(h, h.basis(2)).matrix, center);
}

TEST(Exp, InverseIsExpOfNegative)
{
  std::mt19937_64 rng(4);
  const LieAlgebra h = heisenberg_algebra();
  for (int i = 0; i < 50; ++i) {
    const Vec xi = random_vec(rng, 3, 3.0);
    const Mat prod = compose(exp_nilpotent(h, {xi}), exp_nilpotent(h, {Vec(-xi)})).matrix;
    EXPECT_LT((prod - Mat::Identity(3, 3)).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Exp, NonNilpotentIsUnsupported)
{
  Mat e = Mat::Zero(2, 2);
  e(0, 0) = 1.0;
  const LieAlgebra line(1, {0.0}, {e});
  EXPECT_THROW(exp_nilpotent(line, {vec({1.0})}), UnsupportedError);
  EXPECT_THROW(exp_nilpotent(so3(), {vec({1, 0, 0})}), UnsupportedError);
}

TEST(Group, Unitriangular)
{
  const LieAlgebra h = heisenberg_algebra();
  EXPECT_TRUE(is_unitriangular(exp_nilpotent(h, {vec({1, 2, 3})})));
  Mat bad = Mat::Identity(3, 3);
  bad(2, 0) = 1e-9;
  EXPECT_FALSE(is_unitriangular({bad}));
}
