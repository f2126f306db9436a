#include "geopmp/lie.hpp"

#include <cmath>
#include <sstream>

namespace geopmp {

namespace {

constexpr double kStructureTol = 1e-12;

void check_dim(const LieAlgebra& alg, const Vec& v, const char* what)
{
  require_size(v, alg.dim(), what);
}

}  // namespace

LieAlgebra::LieAlgebra(int dim, std::vector<double> constants, std::vector<Mat> matrix_basis,
                       std::vector<std::string> labels)
  : dim_(dim), constants_(std::move(constants)), matrix_basis_(std::move(matrix_basis)),
    labels_(std::move(labels))
{
  if (dim_ <= 0) throw ArgumentError("LieAlgebra: dim must be positive");
  const auto d = static_cast<std::size_t>(dim_);
  if (constants_.size() != d * d * d) {
    throw ArgumentError("LieAlgebra: structure constant table must have dim^3 entries");
  }
  for (double v : constants_) {
    if (!std::isfinite(v)) throw ArgumentError("LieAlgebra: non-finite structure constant");
  }
  if (labels_.empty()) {
    for (int i = 0; i < dim_; ++i) labels_.push_back("e" + std::to_string(i + 1));
  } else if (labels_.size() != d) {
    throw ArgumentError("LieAlgebra: label count differs from dim");
  }

  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < dim_; ++k) {
        if (std::abs(c(i, j, k) + c(j, i, k)) > kStructureTol) {
          std::ostringstream os;
          os << "LieAlgebra: structure constants not antisymmetric at (" << i << ", " << j
             << ", " << k << ")";
          throw ArgumentError(os.str());
        }
      }
    }
  }
  if (jacobi_defect() > kStructureTol) {
    throw ArgumentError("LieAlgebra: Jacobi identity violated");
  }

  if (!matrix_basis_.empty()) {
    if (matrix_basis_.size() != d) {
      throw ArgumentError("LieAlgebra: matrix basis size differs from dim");
    }
    const auto m = matrix_basis_.front().rows();
    for (const auto& b : matrix_basis_) {
      if (b.rows() != m || b.cols() != m) {
        throw ArgumentError("LieAlgebra: matrix basis elements must be square and equal-sized");
      }
    }
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) {
        Mat expected = Mat::Zero(m, m);
        for (int k = 0; k < dim_; ++k) expected += c(i, j, k) * matrix_basis_[k];
        const Mat comm = matrix_basis_[i] * matrix_basis_[j] - matrix_basis_[j] * matrix_basis_[i];
        if ((comm - expected).cwiseAbs().maxCoeff() > kStructureTol) {
          std::ostringstream os;
          os << "LieAlgebra: matrix commutator of basis " << i << ", " << j
             << " disagrees with structure constants";
          throw ArgumentError(os.str());
        }
      }
    }
  }
}

LieAlgebra LieAlgebra::from_entries(int dim, const std::vector<StructureEntry>& entries,
                                    std::vector<Mat> matrix_basis,
                                    std::vector<std::string> labels)
{
  if (dim <= 0) throw ArgumentError("LieAlgebra: dim must be positive");
  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> table(d * d * d, 0.0);
  std::vector<bool> set(d * d * d, false);
  auto index = [dim](int i, int j, int k) {
    return static_cast<std::size_t>((i * dim + j) * dim + k);
  };
  auto assign = [&](int i, int j, int k, double v) {
    const auto idx = index(i, j, k);
    if (set[idx] && std::abs(table[idx] - v) > kStructureTol) {
      std::ostringstream os;
      os << "LieAlgebra: conflicting structure constants at (" << i << ", " << j << ", " << k
         << ")";
      throw ArgumentError(os.str());
    }
    table[idx] = v;
    set[idx] = true;
  };
  for (const auto& e : entries) {
    if (e.i < 0 || e.j < 0 || e.k < 0 || e.i >= dim || e.j >= dim || e.k >= dim) {
      throw ArgumentError("LieAlgebra: structure entry index out of range");
    }
    if (e.i == e.j && e.value != 0.0) {
      throw ArgumentError("LieAlgebra: [e_i, e_i] must vanish");
    }
    assign(e.i, e.j, e.k, e.value);
    assign(e.j, e.i, e.k, -e.value);
  }
  return LieAlgebra(dim, std::move(table), std::move(matrix_basis), std::move(labels));
}

double LieAlgebra::jacobi_defect() const
{
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < dim_; ++k) {
        for (int l = 0; l < dim_; ++l) {
          double s = 0.0;
          for (int m = 0; m < dim_; ++m) {
            s += c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l);
          }
          worst = std::max(worst, std::abs(s));
        }
      }
    }
  }
  return worst;
}

Mat LieAlgebra::structure_matrix(const CoalgebraElement& lambda) const
{
  check_dim(*this, lambda.coeffs, "structure_matrix");
  Mat b = Mat::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      double s = 0.0;
      for (int k = 0; k < dim_; ++k) s += c(i, j, k) * lambda.coeffs[k];
      b(i, j) = s;
    }
  }
  return b;
}

Mat LieAlgebra::to_matrix(const AlgebraElement& xi) const
{
  if (!has_matrix_basis()) throw UnsupportedError("LieAlgebra: no matrix basis");
  check_dim(*this, xi.coeffs, "to_matrix");
  const auto m = matrix_basis_.front().rows();
  Mat x = Mat::Zero(m, m);
  for (int i = 0; i < dim_; ++i) x += xi.coeffs[i] * matrix_basis_[i];
  return x;
}

AlgebraElement LieAlgebra::basis(int i) const
{
  if (i < 0 || i >= dim_) throw ArgumentError("LieAlgebra::basis: index out of range");
  AlgebraElement e{Vec::Zero(dim_)};
  e.coeffs[i] = 1.0;
  return e;
}

CoalgebraElement LieAlgebra::dual_basis(int i) const
{
  if (i < 0 || i >= dim_) throw ArgumentError("LieAlgebra::dual_basis: index out of range");
  CoalgebraElement e{Vec::Zero(dim_)};
  e.coeffs[i] = 1.0;
  return e;
}

AlgebraElement bracket(const LieAlgebra& alg, const AlgebraElement& xi, const AlgebraElement& zeta)
{
  check_dim(alg, xi.coeffs, "bracket");
  check_dim(alg, zeta.coeffs, "bracket");
  const int d = alg.dim();
  AlgebraElement out{Vec::Zero(d)};
  for (int i = 0; i < d; ++i) {
    if (xi.coeffs[i] == 0.0) continue;
    for (int j = 0; j < d; ++j) {
      const double w = xi.coeffs[i] * zeta.coeffs[j];
      if (w == 0.0) continue;
      for (int k = 0; k < d; ++k) out.coeffs[k] += alg.c(i, j, k) * w;
    }
  }
  return out;
}

double pairing(const CoalgebraElement& lambda, const AlgebraElement& xi)
{
  require_size(xi.coeffs, lambda.coeffs.size(), "pairing");
  return lambda.coeffs.dot(xi.coeffs);
}

CoalgebraElement coadjoint(const LieAlgebra& alg, const AlgebraElement& xi,
                           const CoalgebraElement& lambda)
{
  check_dim(alg, xi.coeffs, "coadjoint");
  check_dim(alg, lambda.coeffs, "coadjoint");
  const int d = alg.dim();
  CoalgebraElement out{Vec::Zero(d)};
  for (int k = 0; k < d; ++k) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) s += xi.coeffs[i] * alg.c(i, k, j) * lambda.coeffs[j];
    }
    out.coeffs[k] = s;
  }
  return out;
}

GroupElement exp_nilpotent(const LieAlgebra& alg, const AlgebraElement& xi)
{
  const Mat x = alg.to_matrix(xi);
  const auto m = x.rows();
  Mat sum = Mat::Identity(m, m);
  Mat term = Mat::Identity(m, m);
  const int cap = alg.dim();
  for (int k = 1; k <= cap; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  term = term * x / static_cast<double>(cap + 1);
  if (term.cwiseAbs().maxCoeff() > 1e-12) {
    throw UnsupportedError("exp_nilpotent: power series does not terminate; algebra element is "
                           "not nilpotent in this realization");
  }
  return GroupElement{sum};
}

GroupElement group_identity(const LieAlgebra& alg)
{
  if (!alg.has_matrix_basis()) throw UnsupportedError("group_identity: no matrix basis");
  const auto m = alg.matrix_basis().front().rows();
  return GroupElement{Mat::Identity(m, m)};
}

GroupElement compose(const GroupElement& a, const GroupElement& b)
{
  if (a.matrix.cols() != b.matrix.rows()) throw ArgumentError("compose: size mismatch");
  return GroupElement{a.matrix * b.matrix};
}

bool is_unitriangular(const GroupElement& g, double tol)
{
  const Mat& m = g.matrix;
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::abs(m(i, i) - 1.0) > tol) return false;
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(m(i, j)) > tol) return false;
    }
  }
  return true;
}

LieAlgebra heisenberg_algebra()
{
  std::vector<Mat> basis(3, Mat::Zero(3, 3));
  basis[0](0, 1) = 1.0;
  basis[1](1, 2) = 1.0;
  basis[2](0, 2) = 1.0;
  return LieAlgebra::from_entries(3, {{0, 1, 2, 1.0}}, std::move(basis), {"g1", "g2", "g3"});
}

LieAlgebra abelian_algebra(int dim)
{
  if (dim <= 0) throw ArgumentError("abelian_algebra: dim must be positive");
  std::vector<Mat> basis;
  for (int i = 0; i < dim; ++i) {
    Mat b = Mat::Zero(dim + 1, dim + 1);
    b(i, dim) = 1.0;
    basis.push_back(std::move(b));
  }
  const auto d = static_cast<std::size_t>(dim);
  return LieAlgebra(dim, std::vector<double>(d * d * d, 0.0), std::move(basis));
}

}  // namespace geopmp
