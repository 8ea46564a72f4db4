#pragma once

#include <optional>
#include <vector>

#include "cforge/matcore.hpp"

namespace cforge {

// Extended natural number: a value in {0, 1, 2, ...} or infinity.
struct ExtNat {
  bool infinite = false;
  long long n = 0;

  static ExtNat inf() { return {true, 0}; }
  static ExtNat of(long long v);

  bool is_zero() const { return !infinite && n == 0; }

  friend ExtNat operator+(ExtNat a, ExtNat b);
  // k * x with the absorbing convention 0 * inf = 0.
  friend ExtNat operator*(long long k, ExtNat x);
  friend bool operator==(ExtNat a, ExtNat b);
  friend bool operator<=(ExtNat a, ExtNat b);
};

// Per-block rank vector: the comparison class of a PSD element over a
// multi-block algebra.
struct CuntzVector {
  std::vector<ExtNat> ranks;

  friend CuntzVector operator+(const CuntzVector& a, const CuntzVector& b);
  friend CuntzVector operator*(long long k, const CuntzVector& v);
  friend bool operator==(const CuntzVector& a, const CuntzVector& b);
  // Componentwise order.
  friend bool operator<=(const CuntzVector& a, const CuntzVector& b);

  bool finite() const;
};

// Per-block weights of the standard block traces; entries in [0, inf].
struct TraceWeight {
  std::vector<double> weights;

  void validate() const;  // non-negative, not all zero
};

// Per-block numerical rank of a PSD block-diagonal element.
CuntzVector cuntz_class(const MatC& a, const AlgebraShape& shape);

// Dimension function sum_i w_i * r_i with 0 * inf = 0; may return infinity.
double d_tau(const CuntzVector& v, const TraceWeight& tau);

struct ComparisonVerdict {
  bool premise_holds = false;     // d_tau(a) <= (1 - gamma) d_tau(b), all tau
  bool conclusion_holds = false;  // componentwise rank domination
};

ComparisonVerdict strict_comparison_check(const CuntzVector& a,
                                          const CuntzVector& b, double gamma,
                                          const std::vector<TraceWeight>& traces);

ComparisonVerdict strict_comparison_check(const MatC& a, const MatC& b,
                                          const AlgebraShape& shape,
                                          double gamma,
                                          const std::vector<TraceWeight>& traces);

// Largest delta on the geometric grid ||b|| * 2^{-k} such that
// d_tau((a - eps)_+) <= (1 - gamma/2) d_tau((b - delta)_+) for every listed
// trace. Requires the strict-comparison premise at gamma; nullopt only when
// the grid is exhausted.
std::optional<double> epsilon_delta_witness(
    const MatC& a, const MatC& b, const AlgebraShape& shape, double gamma,
    double eps, const std::vector<TraceWeight>& traces,
    double tol = kDefaultTol);

struct UnperforationViolation {
  CuntzVector x, y;
  long long k = 0;  // (k+1) x <= k y held but x <= y failed
};

std::vector<UnperforationViolation> almost_unperforated_check(
    const std::vector<CuntzVector>& S, long long k_max);

struct DivisibilityViolation {
  long long n = 0;
  CuntzVector x, x_prime;  // no y in S with n y <= x and x' <= (n+1) y
};

// Compact containment x' << x modeled as: x' <= x and x' finite.
std::vector<DivisibilityViolation> almost_divisible_check(
    const std::vector<CuntzVector>& S, long long n_max);

// The single-block semigroup {0, 1, ..., n, inf}.
std::vector<CuntzVector> cu_of_matrix_block(int n);

}  // namespace cforge
