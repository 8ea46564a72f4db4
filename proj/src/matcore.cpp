#include "cforge/matcore.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace cforge {

bool is_finite(const MatC& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
        return false;
  return true;
}

void require_finite(const MatC& a, const std::string& what) {
  if (!is_finite(a))
    throw ValidationError(what + ": non-finite entries");
}

void require_square(const MatC& a, const std::string& what) {
  if (a.rows() != a.cols())
    throw ValidationError(what + ": matrix is not square");
}

double opnorm(const MatC& a) {
  require_finite(a, "opnorm");
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatC> svd(a);
  return svd.singularValues()(0);
}

MatC commutator(const MatC& x, const MatC& y) { return x * y - y * x; }

MatC mult_commutator(const MatC& u, const MatC& v) {
  return u * v * u.inverse() * v.inverse();
}

int numerical_rank(const MatC& a) {
  require_finite(a, "numerical_rank");
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<MatC> svd(a);
  const auto& sv = svd.singularValues();
  const double thresh = sv(0) * kRankRelThreshold;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++r;
  return r;
}

PolarParts polar(const MatC& s) {
  require_finite(s, "polar");
  require_square(s, "polar");
  const Eigen::Index n = s.rows();
  Eigen::JacobiSVD<MatC> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  PolarParts out;
  out.p = MatC::Zero(n, n);
  out.v = MatC::Zero(n, n);
  if (n == 0 || sv(0) <= kZeroFloor) {
    return out;  // zero input short-circuits to zero outputs
  }
  const double thresh = sv(0) * kRankRelThreshold;
  MatC d = MatC::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) d(i, i) = sv(i);
  out.p = svd.matrixV() * d * svd.matrixV().adjoint();
  // Partial isometry restricted to the numerical range of p.
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sv(i) > thresh)
      out.v += svd.matrixU().col(i) * svd.matrixV().col(i).adjoint();
  }
  return out;
}

MatC func_psd(const MatC& a, const std::function<double(double)>& f,
              double tol) {
  require_finite(a, "func_psd");
  require_square(a, "func_psd");
  const double na = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > tol * std::max(1.0, na) * 10)
    throw ValidationError("func_psd: input not Hermitian within tolerance");
  MatC h = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<MatC> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  MatC out = MatC::Zero(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double lam = ev(i) < 0 ? 0.0 : ev(i);  // clamp tolerance-level negatives
    out += f(lam) * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return out;
}

MatC mexp(const MatC& a) {
  require_finite(a, "mexp");
  require_square(a, "mexp");
  return a.exp();
}

static bool is_normal(const MatC& a, double tol) {
  double na = opnorm(a);
  if (na <= kZeroFloor) return true;
  return opnorm(a * a.adjoint() - a.adjoint() * a) <= tol * na * na * 100;
}

MatC mlog_principal(const MatC& u) {
  require_finite(u, "mlog_principal");
  require_square(u, "mlog_principal");
  Eigen::ComplexEigenSolver<MatC> es(u, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericalError("mlog_principal: eigenvalue computation failed");
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Complex lam = es.eigenvalues()(i);
    const double scale = std::max(1.0, std::abs(lam));
    if (std::abs(lam.imag()) <= 1e-13 * scale && lam.real() <= 1e-13 * scale)
      throw NumericalError(
          "mlog_principal: spectrum on the closed negative real axis");
  }
  if (is_normal(u, kDefaultTol)) {
    // Spectral decomposition via the (diagonal) Schur form.
    Eigen::ComplexSchur<MatC> schur(u);
    MatC t = schur.matrixT();
    MatC logt = MatC::Zero(u.rows(), u.cols());
    for (Eigen::Index i = 0; i < u.rows(); ++i) logt(i, i) = std::log(t(i, i));
    return schur.matrixU() * logt * schur.matrixU().adjoint();
  }
  return u.log();  // inverse scaling-and-squaring
}

MatC support_projection(const MatC& b) {
  require_finite(b, "support_projection");
  require_square(b, "support_projection");
  MatC h = (b + b.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<MatC> es(h);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double emax = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  const double thresh = emax * kRankRelThreshold;
  MatC p = MatC::Zero(b.rows(), b.cols());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > thresh)
      p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  return p;
}

MatC her_compress(const MatC& b, const MatC& h) {
  if (b.rows() != h.rows() || b.cols() != h.cols())
    throw ValidationError("her_compress: dimension mismatch");
  MatC p = support_projection(b);
  return p * h * p;
}

bool in_her(const MatC& b, const MatC& h, double tol) {
  double nh = opnorm(h);
  if (nh <= kZeroFloor) return true;
  return opnorm(h - her_compress(b, h)) <= tol * nh;
}

bool is_hermitian(const MatC& a, double tol) {
  double na = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, na) * 10;
}

bool is_unitary(const MatC& a, double tol) {
  if (a.rows() != a.cols()) return false;
  MatC d = a.adjoint() * a - MatC::Identity(a.rows(), a.cols());
  return opnorm(d) <= tol;
}

int AlgebraShape::base_dim() const {
  int s = 0;
  for (int b : blocks) s += b;
  return s;
}

int AlgebraShape::total_dim() const { return amplification * base_dim(); }

int AlgebraShape::block_offset(int i) const {
  int off = 0;
  for (int j = 0; j < i; ++j) off += blocks[j];
  return off;
}

std::vector<int> AlgebraShape::block_indices(int i) const {
  std::vector<int> idx;
  const int base = base_dim();
  const int off = block_offset(i);
  for (int c = 0; c < amplification; ++c)
    for (int k = 0; k < blocks[i]; ++k) idx.push_back(c * base + off + k);
  return idx;
}

void AlgebraShape::validate() const {
  if (blocks.empty()) throw ValidationError("AlgebraShape: no blocks");
  for (int b : blocks)
    if (b <= 0) throw ValidationError("AlgebraShape: non-positive block size");
  if (amplification <= 0)
    throw ValidationError("AlgebraShape: non-positive amplification");
}

void AlgebraShape::validate_dim(const MatC& a) const {
  validate();
  if (a.rows() != total_dim() || a.cols() != total_dim())
    throw ValidationError("AlgebraShape: matrix dimension does not match shape");
}

MatC amplify(const MatC& b, int n) {
  require_square(b, "amplify");
  if (n <= 0) throw ValidationError("amplify: n must be positive");
  const Eigen::Index m = b.rows();
  MatC out = MatC::Zero(n * m, n * m);
  for (int c = 0; c < n; ++c) out.block(c * m, c * m, m, m) = b;
  return out;
}

MatC block_of(const MatC& h, int m, int k, int j) {
  return h.block(k * m, j * m, m, m);
}

void set_block(MatC& h, int m, int k, int j, const MatC& v) {
  h.block(k * m, j * m, m, m) = v;
}

}  // namespace cforge
