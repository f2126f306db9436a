#pragma once

#include "geopmp/common.hpp"

#include <string>
#include <vector>

namespace geopmp {

/// Coordinates of an element of the Lie algebra in the basis e_i.
struct AlgebraElement
{
  Vec coeffs;
};

/// Coordinates of an element of the dual of the algebra in the dual basis.
struct CoalgebraElement
{
  Vec coeffs;
};

/// Matrix realization of a group element.
struct GroupElement
{
  Mat matrix;
};

/// One nonzero structure constant, [e_i, e_j] contains value * e_k.
/// Indices are zero-based.
struct StructureEntry
{
  int i;
  int j;
  int k;
  double value;
};

/**
 * Finite-dimensional real Lie algebra given by structure constants
 *
 *   [e_i, e_j] = sum_k c(i, j, k) e_k
 *
 * with an optional faithful matrix realization. The constructor validates
 * antisymmetry, the Jacobi identity and, when a matrix basis is present,
 * that matrix commutators reproduce the structure constants. Instances are
 * immutable.
 */
class LieAlgebra
{
public:
  /// Dense constants, index (i * dim + j) * dim + k.
  LieAlgebra(int dim, std::vector<double> constants, std::vector<Mat> matrix_basis = {},
             std::vector<std::string> labels = {});

  /// Builds the dense table from sparse entries. The antisymmetric partner of
  /// each entry is filled in; giving both with inconsistent values is an error.
  static LieAlgebra from_entries(int dim, const std::vector<StructureEntry>& entries,
                                 std::vector<Mat> matrix_basis = {},
                                 std::vector<std::string> labels = {});

  int dim() const noexcept { return dim_; }
  double c(int i, int j, int k) const { return constants_[(i * dim_ + j) * dim_ + k]; }
  bool has_matrix_basis() const noexcept { return !matrix_basis_.empty(); }
  const std::vector<Mat>& matrix_basis() const noexcept { return matrix_basis_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Largest |Jacobiator| over all basis triples and output components.
  double jacobi_defect() const;

  /// B(lambda)_ij = <lambda, [e_i, e_j]>, the antisymmetric matrix of the
  /// Kirillov-Kostant-Souriau form at lambda.
  Mat structure_matrix(const CoalgebraElement& lambda) const;

  /// sum_i xi_i * matrix_basis[i]
  Mat to_matrix(const AlgebraElement& xi) const;

  AlgebraElement basis(int i) const;
  CoalgebraElement dual_basis(int i) const;

private:
  int dim_;
  std::vector<double> constants_;
  std::vector<Mat> matrix_basis_;
  std::vector<std::string> labels_;
};

/// [xi, zeta] in basis coordinates.
AlgebraElement bracket(const LieAlgebra& alg, const AlgebraElement& xi, const AlgebraElement& zeta);

/// <lambda, xi>
double pairing(const CoalgebraElement& lambda, const AlgebraElement& xi);

/**
 * Coadjoint action of the algebra on its dual.
 *
 * Convention: <ad*_xi lambda, zeta> = <lambda, [xi, zeta]> for every zeta,
 * so component k is sum_{i,j} xi_i c(i, k, j) lambda_j. Texts differ on the
 * sign; with this one the Heisenberg Lie-Poisson system reads
 * lambda_dot = ad*_xi lambda.
 */
CoalgebraElement coadjoint(const LieAlgebra& alg, const AlgebraElement& xi,
                           const CoalgebraElement& lambda);

/// Matrix exponential of a nilpotent algebra element by a terminating power
/// series. Throws UnsupportedError when the series does not terminate within
/// dim + 1 terms.
GroupElement exp_nilpotent(const LieAlgebra& alg, const AlgebraElement& xi);

/// Identity matrix of the realization size.
GroupElement group_identity(const LieAlgebra& alg);

GroupElement compose(const GroupElement& a, const GroupElement& b);

/// Ones on the diagonal, zeros below, within tol.
bool is_unitriangular(const GroupElement& g, double tol = 1e-12);

/// The three-dimensional Heisenberg algebra, [g1, g2] = g3, realized by
/// strictly upper triangular 3x3 matrices.
LieAlgebra heisenberg_algebra();

/// All structure constants zero; matrix realization by translations in
/// (dim + 1) x (dim + 1) affine matrices.
LieAlgebra abelian_algebra(int dim);

}  // namespace geopmp
