#pragma once

#include "geopmp/common.hpp"
#include "geopmp/lie.hpp"

namespace geopmp {

/// Antisymmetric bilinear form on R^d, Omega(v, w) = v^T M w.
class TwoForm
{
public:
  /// Throws ArgumentError unless the matrix is square and antisymmetric to 1e-12.
  explicit TwoForm(Mat matrix);

  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  const Mat& matrix() const noexcept { return matrix_; }
  double operator()(const Vec& v, const Vec& w) const { return v.dot(matrix_ * w); }

private:
  Mat matrix_;
};

/**
 * Linear subspace D of V + V* for V = R^d, stored as an orthonormal basis of
 * column vectors (v-part on top, covector part below).
 *
 * Any subspace can be represented; is_dirac() decides whether it is
 * maximally isotropic for <<(v, a), (w, b)>> = <b, v> + <a, w>. Operations
 * documented to return Dirac structures verify that they do.
 */
class LinearDiracStructure
{
public:
  /// Spanning set in columns (2d rows); dependent columns are dropped.
  LinearDiracStructure(int base_dim, const Mat& spanning);

  int base_dim() const noexcept { return base_dim_; }
  int rank() const noexcept { return static_cast<int>(basis_.cols()); }
  /// Orthonormal basis, 2d x rank.
  const Mat& basis() const noexcept { return basis_; }

  /// Distance of (v, alpha) from the subspace.
  double distance(const Vec& v, const Vec& alpha) const;

private:
  int base_dim_;
  Mat basis_;
};

/// Symmetric pairing <<(v, a), (w, b)>> = <b, v> + <a, w>.
double dirac_pairing(const Vec& v, const Vec& alpha, const Vec& w, const Vec& beta);

/// D_Omega = {(v, Omega(v, .))}; basis (e_i, Omega(e_i, .)).
LinearDiracStructure graph_of_two_form(const TwoForm& omega);

/// Largest |<<b_i, b_j>>| over basis pairs.
double isotropy_defect(const LinearDiracStructure& d);

/// Isotropic (to 1e-10) with dimension equal to the base dimension.
bool is_dirac(const LinearDiracStructure& d);

/// dist((v, alpha), D) <= tol * (1 + |(v, alpha)|)
bool contains(const LinearDiracStructure& d, const Vec& v, const Vec& alpha, double tol);

/// Mutual containment: both spans agree to rank tolerance 1e-10 relative to
/// the largest singular value of the concatenated bases.
bool subspace_equal(const LinearDiracStructure& a, const LinearDiracStructure& b,
                    double rel_tol = 1e-10);

/// Pullback along psi : V -> V' (psi is dim V' x dim V):
/// {(v, psi^T beta) : (psi v, beta) in D'}.
LinearDiracStructure backward(const Mat& psi, const LinearDiracStructure& target);

/// Pushforward along psi : V -> V':
/// {(psi v, alpha) : (v, psi^T alpha) in D}.
LinearDiracStructure forward(const Mat& psi, const LinearDiracStructure& source);

/// Canonical form dx^i ^ dp_i on the 2n-dim fiber of T*P, coordinates (x, p).
TwoForm canonical_cotangent_form(int n);

/// Its pullback to the fiber of the Pontryagin bundle, coordinates (x, p, u):
/// the u-directions lie in the kernel.
TwoForm pontryagin_presymplectic_form(int n, int r);

/// Linear projection (x, p, u) -> (x, p).
Mat pontryagin_projection(int n, int r);

/**
 * The fiber [D_G]_G(lambda) of the reduced Dirac structure on
 * V = g + g*: the graph of
 *
 *   w((xi, rho), (zeta, sigma)) = <sigma, xi> - <rho, zeta> + <lambda, [xi, zeta]>.
 *
 * A pair ((xi, rho), (nu, eta)) belongs iff eta = xi and
 * nu = -rho + ad*_xi lambda.
 */
LinearDiracStructure reduced_dirac_fiber(const LieAlgebra& alg, const CoalgebraElement& lambda);

/// Matrix of the form above on g + g* (2 dim x 2 dim).
Mat reduced_fiber_form(const LieAlgebra& alg, const CoalgebraElement& lambda);

}  // namespace geopmp
