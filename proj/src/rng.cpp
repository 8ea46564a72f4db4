#include "cforge/rng.hpp"

#include <cmath>

#include <Eigen/QR>

namespace cforge {

double Rng::uniform() {
  // 53-bit mantissa draw, independent of distribution-object implementations.
  return (eng_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * 3.141592653589793238462643383279 * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

Complex Rng::cgaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return Complex(re, im) / std::sqrt(2.0);
}

MatC Rng::gmatrix(int rows, int cols) {
  MatC out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = cgaussian();
  return out;
}

MatC gen_trace_zero(Rng& rng, int n) {
  if (n < 1) throw ValidationError("gen_trace_zero: n must be positive");
  MatC g = rng.gmatrix(n, n);
  g -= (g.trace() / double(n)) * MatC::Identity(n, n);
  return g;
}

MatC gen_hermitian(Rng& rng, int n) {
  if (n < 1) throw ValidationError("gen_hermitian: n must be positive");
  MatC g = rng.gmatrix(n, n);
  return (g + g.adjoint()) / 2.0;
}

MatC gen_unitary(Rng& rng, int n) {
  if (n < 1) throw ValidationError("gen_unitary: n must be positive");
  MatC g = rng.gmatrix(n, n);
  Eigen::HouseholderQR<MatC> qr(g);
  MatC q = qr.householderQ();
  MatC r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the diagonal phases so the distribution does not depend on the QR
  // sign conventions.
  for (int j = 0; j < n; ++j) {
    Complex d = r(j, j);
    Complex phase = std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

std::pair<MatC, MatC> gen_square_zero_pair(Rng& rng, int n) {
  if (n < 2) throw ValidationError("gen_square_zero_pair: n must be >= 2");
  MatC u = gen_unitary(rng, n);
  const int k = n / 2;
  // P spans the first k basis directions of u, Q the rest: P Q = 0, so
  // (P g Q)^2 = P g (Q P) g Q = 0.
  MatC p = MatC::Zero(n, n);
  MatC q = MatC::Zero(n, n);
  for (int j = 0; j < k; ++j) p += u.col(j) * u.col(j).adjoint();
  for (int j = k; j < n; ++j) q += u.col(j) * u.col(j).adjoint();
  auto make = [&](const MatC& left, const MatC& right) {
    MatC z = left * rng.gmatrix(n, n) * right;
    const double nz = opnorm(z);
    if (nz > kZeroFloor) z /= nz;
    return z;
  };
  return {make(p, q), make(q, p)};
}

std::vector<MatC> gen_hermitian_list(Rng& rng, int n, int count) {
  std::vector<MatC> out;
  for (int i = 0; i < count; ++i) out.push_back(gen_hermitian(rng, n));
  return out;
}

MatC gen_det_one_unitary(Rng& rng, int n) {
  MatC u = gen_unitary(rng, n);
  Complex det = u.determinant();
  // Divide the phase out evenly across the diagonal directions.
  Complex root = std::exp(Complex(0.0, -std::arg(det) / double(n)));
  u *= root;
  // The n-th root leaves an n-th root of unity ambiguity; fix the remainder
  // on the first column.
  Complex rem = u.determinant();
  u.col(0) /= rem;
  return u;
}

MatC gen_psd_with_ranks(Rng& rng, const AlgebraShape& shape,
                        const std::vector<int>& ranks) {
  shape.validate();
  if (ranks.size() != shape.blocks.size())
    throw ValidationError("gen_psd_with_ranks: rank list length mismatch");
  const int total = shape.total_dim();
  MatC out = MatC::Zero(total, total);
  for (size_t i = 0; i < ranks.size(); ++i) {
    auto idx = shape.block_indices(static_cast<int>(i));
    const int d = static_cast<int>(idx.size());
    if (ranks[i] < 0 || ranks[i] > d)
      throw ValidationError("gen_psd_with_ranks: infeasible rank");
    if (ranks[i] == 0) continue;
    MatC g = rng.gmatrix(d, ranks[i]);
    MatC blockval = g * g.adjoint();
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) out(idx[r], idx[c]) = blockval(r, c);
  }
  return out;
}

}  // namespace cforge
