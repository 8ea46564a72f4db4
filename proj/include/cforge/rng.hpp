#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cforge/matcore.hpp"

namespace cforge {

// Deterministic, platform-independent source of Gaussian matrices:
// std::mt19937_64 feeding a fixed Box-Muller transform (std::normal_distribution
// is implementation-defined and would break byte-level reproducibility).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform();   // [0, 1)
  double gaussian();  // standard normal
  Complex cgaussian();
  std::uint64_t raw() { return eng_(); }

  // iid complex Gaussian entries.
  MatC gmatrix(int rows, int cols);

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Random matrix recentered to exact trace zero.
MatC gen_trace_zero(Rng& rng, int n);

MatC gen_hermitian(Rng& rng, int n);

// Haar-ish unitary: QR of a Gaussian matrix with the R diagonal phases fixed.
MatC gen_unitary(Rng& rng, int n);

// Two square-zero matrices P g Q with random orthogonal projections P, Q of
// the requested ranks (P Q = 0), normalized to contractions.
std::pair<MatC, MatC> gen_square_zero_pair(Rng& rng, int n);

// Sampled path exp(i t h) * ... of unitaries from I to a random endpoint;
// closed loops multiply in an integer winding on the first coordinate.
std::vector<MatC> gen_hermitian_list(Rng& rng, int n, int count);

// Random determinant-one unitary (phase divided out evenly).
MatC gen_det_one_unitary(Rng& rng, int n);

// PSD block-diagonal element over a shape, with the requested per-block ranks.
MatC gen_psd_with_ranks(Rng& rng, const AlgebraShape& shape,
                        const std::vector<int>& ranks);

}  // namespace cforge
