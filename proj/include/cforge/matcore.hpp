#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cforge {

using Complex = std::complex<double>;
using MatC = Eigen::MatrixXcd;

inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kRankRelThreshold = 1e-10;
inline constexpr double kZeroFloor = 1e-14;

// Thrown on bad input (shape mismatch, violated precondition, non-finite
// entries). CLI maps this to exit 2.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown on numerical non-convergence (quadrature cap, log branch cut).
// CLI maps this to exit 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_finite(const MatC& a);
void require_finite(const MatC& a, const std::string& what);
void require_square(const MatC& a, const std::string& what);

// Largest singular value.
double opnorm(const MatC& a);

// Additive commutator xy - yx.
MatC commutator(const MatC& x, const MatC& y);

// Multiplicative commutator u v u^{-1} v^{-1}.
MatC mult_commutator(const MatC& u, const MatC& v);

// Numerical rank at the relative threshold sigma_max * kRankRelThreshold.
int numerical_rank(const MatC& a);

struct PolarParts {
  MatC v;  // partial isometry, vanishes on ker(p)
  MatC p;  // (s* s)^{1/2}, Hermitian PSD
};

// s = v p with p = |s|; v is supported on the range of p only.
PolarParts polar(const MatC& s);

// Functional calculus for Hermitian PSD input: apply f to the eigenvalues.
// Small negative eigenvalues (within tolerance) are clamped to zero before f.
MatC func_psd(const MatC& a, const std::function<double(double)>& f,
              double tol = kDefaultTol);

MatC mexp(const MatC& a);

// Principal matrix logarithm. Requires the spectrum off the closed negative
// real axis; throws NumericalError otherwise (callers subdivide).
MatC mlog_principal(const MatC& u);

// Support projection of a PSD matrix (spectral projection above the rank
// threshold).
MatC support_projection(const MatC& b);

// P h P with P the support projection of b.
MatC her_compress(const MatC& b, const MatC& h);

// True iff || h - P h P || <= tol * max(1, ||h||).
bool in_her(const MatC& b, const MatC& h, double tol = kDefaultTol);

bool is_hermitian(const MatC& a, double tol = kDefaultTol);
bool is_unitary(const MatC& a, double tol = 1e-8);

// Finite-dimensional C*-algebra shape: direct sum of matrix blocks,
// amplified to M_n(base).
struct AlgebraShape {
  std::vector<int> blocks;
  int amplification = 1;

  int base_dim() const;
  int total_dim() const;
  int block_offset(int i) const;  // offset of block i inside the base

  // Row/column indices (in the total index range) belonging to base block i,
  // across all amplification copies.
  std::vector<int> block_indices(int i) const;

  void validate() const;
  void validate_dim(const MatC& a) const;
};

// Kronecker-style amplification diag(b, ..., b) with n copies.
MatC amplify(const MatC& b, int n);

// Extract the (k, j) block of an element of M_n(M_m).
MatC block_of(const MatC& h, int m, int k, int j);

// Set the (k, j) block.
void set_block(MatC& h, int m, int k, int j, const MatC& v);

}  // namespace cforge
