#include "geopmp/dirac.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace geopmp {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kIsotropyTol = 1e-10;

/// Orthonormal basis of the column span of m.
Mat column_span(const Mat& m)
{
  if (m.cols() == 0 || m.rows() == 0) return Mat(m.rows(), 0);
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cutoff = kRankTol * std::max(s.size() ? s[0] : 0.0, 1e-300);
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > cutoff && s[rank] > 1e-14) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Orthonormal basis of the kernel of m.
Mat null_space(const Mat& m)
{
  const Eigen::Index cols = m.cols();
  if (m.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cutoff = kRankTol * std::max(s.size() ? s[0] : 0.0, 1e-300);
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > cutoff && s[rank] > 1e-14) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

Eigen::Index numerical_rank(const Mat& m, double rel_tol)
{
  if (m.cols() == 0 || m.rows() == 0) return 0;
  Eigen::BDCSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  const double cutoff = rel_tol * s[0];
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > cutoff && s[rank] > 1e-14) ++rank;
  return rank;
}

void check_dirac_preserved(const LinearDiracStructure& in, const LinearDiracStructure& out,
                           const char* op)
{
  if (is_dirac(in) && !is_dirac(out)) {
    throw Error(std::string(op) + ": image of a Dirac structure failed the Dirac test");
  }
}

}  // namespace

TwoForm::TwoForm(Mat matrix) : matrix_(std::move(matrix))
{
  if (matrix_.rows() != matrix_.cols()) throw ArgumentError("TwoForm: matrix must be square");
  if (!matrix_.allFinite()) throw ArgumentError("TwoForm: non-finite entries");
  if (matrix_.size() > 0 && (matrix_ + matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ArgumentError("TwoForm: matrix is not antisymmetric");
  }
}

LinearDiracStructure::LinearDiracStructure(int base_dim, const Mat& spanning)
  : base_dim_(base_dim)
{
  if (base_dim < 0) throw ArgumentError("LinearDiracStructure: negative base dimension");
  if (spanning.rows() != 2 * base_dim) {
    throw ArgumentError("LinearDiracStructure: spanning vectors must have length 2 * base_dim");
  }
  if (!spanning.allFinite()) throw ArgumentError("LinearDiracStructure: non-finite basis");
  basis_ = column_span(spanning);
}

double LinearDiracStructure::distance(const Vec& v, const Vec& alpha) const
{
  require_size(v, base_dim_, "Dirac membership vector part");
  require_size(alpha, base_dim_, "Dirac membership covector part");
  Vec w(2 * base_dim_);
  w << v, alpha;
  if (basis_.cols() == 0) return w.norm();
  return (w - basis_ * (basis_.transpose() * w)).norm();
}

double dirac_pairing(const Vec& v, const Vec& alpha, const Vec& w, const Vec& beta)
{
  return beta.dot(v) + alpha.dot(w);
}

LinearDiracStructure graph_of_two_form(const TwoForm& omega)
{
  const int d = omega.dim();
  Mat span(2 * d, d);
  span.topRows(d) = Mat::Identity(d, d);
  span.bottomRows(d) = omega.matrix().transpose();
  return LinearDiracStructure(d, span);
}

double isotropy_defect(const LinearDiracStructure& d)
{
  const int n = d.base_dim();
  const Mat& b = d.basis();
  if (b.cols() == 0) return 0.0;
  const Mat gram = b.topRows(n).transpose() * b.bottomRows(n);
  return (gram + gram.transpose()).cwiseAbs().maxCoeff();
}

bool is_dirac(const LinearDiracStructure& d)
{
  return d.rank() == d.base_dim() && isotropy_defect(d) <= kIsotropyTol;
}

bool contains(const LinearDiracStructure& d, const Vec& v, const Vec& alpha, double tol)
{
  const double norm = std::sqrt(v.squaredNorm() + alpha.squaredNorm());
  return d.distance(v, alpha) <= tol * (1.0 + norm);
}

bool subspace_equal(const LinearDiracStructure& a, const LinearDiracStructure& b, double rel_tol)
{
  if (a.base_dim() != b.base_dim()) return false;
  if (a.rank() != b.rank()) return false;
  Mat both(a.basis().rows(), a.rank() + b.rank());
  both << a.basis(), b.basis();
  return numerical_rank(both, rel_tol) == a.rank();
}

LinearDiracStructure backward(const Mat& psi, const LinearDiracStructure& target)
{
  const Eigen::Index m = target.base_dim();
  const Eigen::Index d = psi.cols();
  if (psi.rows() != m) throw ArgumentError("backward: map codomain differs from the structure's base");
  const Mat& basis = target.basis();
  const Eigen::Index k = basis.cols();

  // (v, c) with psi v = A' c; then the element is (v, psi^T B' c).
  Mat system(m, d + k);
  system << psi, -basis.topRows(m);
  const Mat ker = null_space(system);
  Mat image(2 * d, ker.cols());
  image.topRows(d) = ker.topRows(d);
  image.bottomRows(d) = psi.transpose() * basis.bottomRows(m) * ker.bottomRows(k);
  LinearDiracStructure out(static_cast<int>(d), image);
  check_dirac_preserved(target, out, "backward");
  return out;
}

LinearDiracStructure forward(const Mat& psi, const LinearDiracStructure& source)
{
  const Eigen::Index d = source.base_dim();
  const Eigen::Index m = psi.rows();
  if (psi.cols() != d) throw ArgumentError("forward: map domain differs from the structure's base");
  const Mat& basis = source.basis();
  const Eigen::Index k = basis.cols();

  // (alpha, c) with psi^T alpha = B c; then the element is (psi A c, alpha).
  Mat system(d, m + k);
  system << psi.transpose(), -basis.bottomRows(d);
  const Mat ker = null_space(system);
  Mat image(2 * m, ker.cols());
  image.topRows(m) = psi * basis.topRows(d) * ker.bottomRows(k);
  image.bottomRows(m) = ker.topRows(m);
  LinearDiracStructure out(static_cast<int>(m), image);
  check_dirac_preserved(source, out, "forward");
  return out;
}

TwoForm canonical_cotangent_form(int n)
{
  return pontryagin_presymplectic_form(n, 0);
}

TwoForm pontryagin_presymplectic_form(int n, int r)
{
  if (n < 0 || r < 0) throw ArgumentError("pontryagin_presymplectic_form: negative dimension");
  Mat m = Mat::Zero(2 * n + r, 2 * n + r);
  for (int i = 0; i < n; ++i) {
    m(i, n + i) = 1.0;
    m(n + i, i) = -1.0;
  }
  return TwoForm(m);
}

Mat pontryagin_projection(int n, int r)
{
  Mat psi = Mat::Zero(2 * n, 2 * n + r);
  psi.leftCols(2 * n) = Mat::Identity(2 * n, 2 * n);
  return psi;
}

Mat reduced_fiber_form(const LieAlgebra& alg, const CoalgebraElement& lambda)
{
  const int d = alg.dim();
  Mat m = Mat::Zero(2 * d, 2 * d);
  m.topLeftCorner(d, d) = alg.structure_matrix(lambda);
  m.topRightCorner(d, d) = Mat::Identity(d, d);
  m.bottomLeftCorner(d, d) = -Mat::Identity(d, d);
  return m;
}

LinearDiracStructure reduced_dirac_fiber(const LieAlgebra& alg, const CoalgebraElement& lambda)
{
  return graph_of_two_form(TwoForm(reduced_fiber_form(alg, lambda)));
}

}  // namespace geopmp
