#include "cforge/dhsdet.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace cforge {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kMaxRefineDepth = 14;  // 2^14 sub-segments per segment
const Complex kI{0.0, 1.0};

void require_invertible(const MatC& a, const std::string& what) {
  require_finite(a, what);
  require_square(a, what);
  Eigen::JacobiSVD<MatC> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-12 * sv(0))
    throw ValidationError(what + ": matrix is singular to working precision");
}

MatC matpow(const MatC& a, int n) {
  MatC out = MatC::Identity(a.rows(), a.cols());
  for (int i = 0; i < n; ++i) out = out * a;
  return out;
}

}  // namespace

void PathOfInvertibles::validate(double tol) const {
  if (samples.size() < 2)
    throw ValidationError("PathOfInvertibles: need at least two samples");
  if (std::abs(samples.front().first) > 1e-12 ||
      std::abs(samples.back().first - 1.0) > 1e-12)
    throw ValidationError("PathOfInvertibles: parameter must run from 0 to 1");
  const Eigen::Index n = samples.front().second.rows();
  double prev = -1.0;
  for (const auto& [t, v] : samples) {
    if (t <= prev)
      throw ValidationError("PathOfInvertibles: parameters not increasing");
    prev = t;
    if (v.rows() != n || v.cols() != n)
      throw ValidationError("PathOfInvertibles: inconsistent dimensions");
    require_invertible(v, "PathOfInvertibles");
  }
  if (closed) {
    double scale = std::max(1.0, opnorm(samples.front().second));
    if (opnorm(samples.back().second - samples.front().second) > tol * scale * 100)
      throw ValidationError("PathOfInvertibles: closed path must return to start");
  }
}

DetValue make_det_value(Complex raw, double tol) {
  DetValue out;
  out.raw = raw;
  double frac = raw.real() - std::floor(raw.real());
  if (frac >= 1.0) frac -= 1.0;  // guard the floor rounding edge
  out.lattice_reduced = Complex(frac, raw.imag());
  out.nonreal = std::abs(raw.imag()) > tol * std::max(1.0, std::abs(raw));
  return out;
}

// Tr log of one increment, halving through principal square roots until the
// increment sits inside the principal-log ball.
static Complex segment_trace_log(MatC g, int& depth_used, double& log_norm) {
  const MatC id = MatC::Identity(g.rows(), g.cols());
  int depth = 0;
  try {
    while (opnorm(g - id) >= 1.0 && depth < kMaxRefineDepth) {
      g = mexp(0.5 * mlog_principal(g));  // principal square root
      ++depth;
    }
    if (opnorm(g - id) >= 1.0 + 1e-12 && depth >= kMaxRefineDepth)
      throw NumericalError(
          "path_determinant: refinement cap reached; sample the path finer");
    MatC lg = mlog_principal(g);
    const double scale = std::pow(2.0, depth);
    depth_used = depth;
    log_norm = scale * opnorm(lg);
    return scale * lg.trace();
  } catch (const NumericalError&) {
    throw NumericalError(
        "path_determinant: increment touches the log branch cut; the jump is "
        "too large to subdivide from the samples alone");
  }
}

DetReport path_determinant(const PathOfInvertibles& p, double tol) {
  p.validate(tol);
  DetReport rep;
  Complex total{0.0, 0.0};
  for (size_t k = 0; k + 1 < p.samples.size(); ++k) {
    MatC inc = p.samples[k + 1].second *
               p.samples[k].second.inverse();
    int depth = 0;
    double log_norm = 0.0;
    total += segment_trace_log(std::move(inc), depth, log_norm);
    rep.refinement_depth = std::max(rep.refinement_depth, depth);
    rep.segment_log_norms.push_back(log_norm);
  }
  rep.value = make_det_value(total / (kTwoPi * kI), tol);
  return rep;
}

DetValue exp_product_determinant(const std::vector<MatC>& h_list, double tol) {
  Complex tr_sum{0.0, 0.0};
  for (const auto& h : h_list) {
    require_finite(h, "exp_product_determinant");
    require_square(h, "exp_product_determinant");
    if (!is_hermitian(h, tol))
      throw ValidationError("exp_product_determinant: non-Hermitian entry");
    tr_sum += h.trace();
  }
  return make_det_value(tr_sum / kTwoPi, tol);
}

PathOfInvertibles make_exp_path(const std::vector<MatC>& h_list,
                                int steps_per_leg) {
  if (h_list.empty())
    throw ValidationError("make_exp_path: empty factor list");
  if (steps_per_leg < 1)
    throw ValidationError("make_exp_path: steps_per_leg must be positive");
  const Eigen::Index n = h_list.front().rows();
  const int m = static_cast<int>(h_list.size());
  PathOfInvertibles path;
  MatC base = MatC::Identity(n, n);
  path.samples.push_back({0.0, base});
  for (int k = 0; k < m; ++k) {
    if (h_list[k].rows() != n || h_list[k].cols() != n)
      throw ValidationError("make_exp_path: inconsistent dimensions");
    for (int s = 1; s <= steps_per_leg; ++s) {
      double frac = static_cast<double>(s) / steps_per_leg;
      double t = (k + frac) / m;
      path.samples.push_back({t, MatC(mexp(kI * frac * h_list[k]) * base)});
    }
    base = mexp(kI * h_list[k]) * base;
  }
  path.samples.back().first = 1.0;  // exact endpoint
  return path;
}

std::pair<MatC, SuzukiStats> suzuki_defect(const std::vector<MatC>& a_list,
                                           int N, double tol) {
  if (a_list.empty()) throw ValidationError("suzuki_defect: empty input list");
  if (N < 1) throw ValidationError("suzuki_defect: N must be positive");
  const Eigen::Index n = a_list.front().rows();
  MatC sum = MatC::Zero(n, n);
  for (const auto& a : a_list) {
    require_finite(a, "suzuki_defect");
    if (a.rows() != n || a.cols() != n)
      throw ValidationError("suzuki_defect: inconsistent dimensions");
    if (!is_hermitian(a, tol))
      throw ValidationError("suzuki_defect: non-Hermitian entry");
    sum += a;
  }
  MatC prod = MatC::Identity(n, n);
  for (auto it = a_list.rbegin(); it != a_list.rend(); ++it)
    prod = prod * mexp(-kI / double(N) * (*it));
  prod = prod * mexp(kI / double(N) * sum);
  MatC c;
  try {
    c = -kI * mlog_principal(prod);
  } catch (const NumericalError&) {
    throw NumericalError(
        "suzuki_defect: product left the principal-log domain; increase N");
  }
  double scale = 0.0;
  for (const auto& a : a_list) scale += opnorm(a);
  if (!is_hermitian(c, std::max(tol, 1e-12) * std::max(1.0, scale)))
    throw NumericalError("suzuki_defect: defect is not Hermitian; increase N");
  SuzukiStats stats;
  stats.norm_c = opnorm(c);
  stats.trace_c = c.trace();
  stats.N = N;
  return {std::move(c), stats};
}

RegroupResult regroup_commutators(const std::vector<MatC>& factors, int N,
                                  double tol) {
  if (factors.empty())
    throw ValidationError("regroup_commutators: empty factor list");
  if (N < 1) throw ValidationError("regroup_commutators: N must be positive");
  const Eigen::Index dim = factors.front().rows();
  std::vector<MatC> inv;
  for (const auto& g : factors) {
    require_invertible(g, "regroup_commutators");
    if (g.rows() != dim || g.cols() != dim)
      throw ValidationError("regroup_commutators: inconsistent dimensions");
    inv.push_back(g.inverse());
  }
  const int m = static_cast<int>(factors.size());

  // Letter sequence of (g_1 ... g_m)^N; sorting it by factor index leaves
  // g_1^N ... g_m^N, and each adjacent transposition at prefix P peels off the
  // commutator (P x P^{-1}, P y P^{-1}).
  std::vector<int> word;
  word.reserve(static_cast<size_t>(m) * N);
  for (int r = 0; r < N; ++r)
    for (int j = 0; j < m; ++j) word.push_back(j);

  RegroupResult out;
  bool swapped = true;
  while (swapped) {
    swapped = false;
    MatC prefix = MatC::Identity(dim, dim);
    MatC prefix_inv = MatC::Identity(dim, dim);
    for (size_t pos = 0; pos + 1 < word.size(); ++pos) {
      if (word[pos] > word[pos + 1]) {
        MatC u = prefix * factors[word[pos]] * prefix_inv;
        MatC v = prefix * factors[word[pos + 1]] * prefix_inv;
        out.commutators.push_back({std::move(u), std::move(v)});
        std::swap(word[pos], word[pos + 1]);
        swapped = true;
      }
      prefix_inv = inv[word[pos]] * prefix_inv;
      prefix = prefix * factors[word[pos]];
    }
  }
  out.M = static_cast<int>(out.commutators.size());

  out.tail = MatC::Identity(dim, dim);
  for (int j = 0; j < m; ++j) out.tail = out.tail * matpow(factors[j], N);

  MatC base = MatC::Identity(dim, dim);
  for (const auto& g : factors) base = base * g;
  MatC lhs = matpow(base, N);
  MatC rhs = MatC::Identity(dim, dim);
  for (const auto& [u, v] : out.commutators)
    rhs = rhs * mult_commutator(u, v);
  rhs = rhs * out.tail;
  out.residual = opnorm(lhs - rhs) / std::max(1.0, opnorm(lhs));
  (void)tol;
  return out;
}

KernelResult kernel_membership(const MatC& u, double tol) {
  require_finite(u, "kernel_membership");
  require_square(u, "kernel_membership");
  if (!is_unitary(u, std::max(tol * 100, 1e-8)))
    throw ValidationError("kernel_membership: input is not unitary");
  const Eigen::Index n = u.rows();

  Eigen::ComplexSchur<MatC> schur(u, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw NumericalError("kernel_membership: Schur factorization failed");
  const MatC& w = schur.matrixU();
  std::vector<Complex> d(n);
  Complex det{1.0, 0.0};
  for (Eigen::Index j = 0; j < n; ++j) {
    d[j] = schur.matrixT()(j, j);
    det *= d[j];
  }

  KernelResult out;
  out.delta =
      make_det_value(Complex(std::arg(det) / kTwoPi,
                             -std::log(std::abs(det)) / kTwoPi),
                     tol);
  out.member = std::abs(det - Complex(1.0, 0.0)) <= std::max(tol * 100, 1e-9);
  if (!out.member) return out;

  // Scale one eigenvalue so the partial products close up exactly.
  d[n - 1] /= det;
  std::vector<Complex> mu(n);
  Complex acc{1.0, 0.0};
  for (Eigen::Index j = 0; j < n; ++j) {
    acc *= d[j];
    mu[j] = acc;
  }
  MatC vdiag = MatC::Zero(n, n);
  MatC shift = MatC::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    vdiag(j, j) = mu[j];
    shift((j + 1) % n, j) = 1.0;
  }
  // (V, S) = diag(mu_j / mu_{j-1 mod n}) = diag(d_j) when prod d_j = 1.
  KernelCertificate cert;
  cert.U = w * vdiag * w.adjoint();
  cert.V = w * shift * w.adjoint();
  cert.reconstruction_residual =
      opnorm(u - mult_commutator(cert.U, cert.V)) / std::max(1.0, opnorm(u));
  out.certificate = std::move(cert);
  return out;
}

}  // namespace cforge
