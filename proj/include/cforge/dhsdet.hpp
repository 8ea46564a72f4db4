#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cforge/matcore.hpp"

namespace cforge {

// Sampled path of invertibles on [0,1]: t strictly increasing, t0 = 0,
// t_last = 1, every sample invertible. Closed paths additionally have
// eta(1) = eta(0).
struct PathOfInvertibles {
  std::vector<std::pair<double, MatC>> samples;
  bool closed = false;

  void validate(double tol = kDefaultTol) const;
};

// Winding value with its reduction modulo the trace lattice (Z for the
// standard trace on M_n(C)).
struct DetValue {
  Complex raw{0.0, 0.0};
  Complex lattice_reduced{0.0, 0.0};  // real part reduced into [0, 1)
  bool nonreal = false;               // raw imaginary part above tolerance
};

DetValue make_det_value(Complex raw, double tol = kDefaultTol);

struct DetReport {
  DetValue value;
  int refinement_depth = 0;               // max dyadic subdivisions used
  std::vector<double> segment_log_norms;  // per original segment
};

// (1/2 pi i) * sum_k Tr log(eta(t_{k+1}) eta(t_k)^{-1}) with automatic dyadic
// refinement (principal square roots of increments) when an increment leaves
// the principal-log domain; subdivision cap 2^14 per segment.
DetReport path_determinant(const PathOfInvertibles& p, double tol = kDefaultTol);

// Raw value Tr(sum h_k) / (2 pi) for x = prod exp(i h_k).
DetValue exp_product_determinant(const std::vector<MatC>& h_list,
                                 double tol = kDefaultTol);

// Concatenated exponential path from I to prod_k exp(i h_k), sampled with
// steps_per_leg uniform steps on each leg.
PathOfInvertibles make_exp_path(const std::vector<MatC>& h_list,
                                int steps_per_leg = 8);

struct SuzukiStats {
  double norm_c = 0.0;
  Complex trace_c{0.0, 0.0};
  int N = 0;
};

// Splitting defect c = -i log(e^{-i a_m/N} ... e^{-i a_1/N} e^{i sum a_j / N}),
// so that e^{i sum a_j / N} = e^{i a_1/N} ... e^{i a_m/N} e^{i c}. Hermitian
// and traceless within tolerance; ||c|| = O(1/N^2).
std::pair<MatC, SuzukiStats> suzuki_defect(const std::vector<MatC>& a_list,
                                           int N, double tol = kDefaultTol);

struct RegroupResult {
  // (u_j, v_j) with (g_1 ... g_m)^N = prod_j u_j v_j u_j^{-1} v_j^{-1}
  //                                   * g_1^N g_2^N ... g_m^N.
  std::vector<std::pair<MatC, MatC>> commutators;
  MatC tail;                // g_1^N ... g_m^N
  int M = 0;                // number of commutators, m(m-1)N(N-1)/4
  double residual = 0.0;    // relative reconstruction residual
};

// Sorts the letter sequence of (g_1 ... g_m)^N by factor index with adjacent
// transpositions; each swap at prefix P contributes the multiplicative
// commutator (P x P^{-1}, P y P^{-1}).
RegroupResult regroup_commutators(const std::vector<MatC>& factors, int N,
                                  double tol = kDefaultTol);

struct KernelCertificate {
  MatC U, V;  // unitaries with u = U V U^{-1} V^{-1}
  double reconstruction_residual = 0.0;
};

struct KernelResult {
  bool member = false;
  DetValue delta;  // winding value of det(u)
  std::optional<KernelCertificate> certificate;
};

// Membership of a unitary in the commutator subgroup: member iff det(u) = 1
// within tolerance; certificate from the cyclic-shift / partial-product
// diagonal construction, conjugated back through the Schur basis.
KernelResult kernel_membership(const MatC& u, double tol = kDefaultTol);

}  // namespace cforge
