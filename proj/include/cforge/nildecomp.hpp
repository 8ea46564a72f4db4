#pragma once

#include <array>
#include <vector>

#include "cforge/matcore.hpp"

namespace cforge {

// Four commuting PSD diagonal functions over a sampled grid of [0,1] with
// f1 + f2 + f3 + f4 = 1 exactly and the support orthogonality
// f1 f3 = f1 f4 = f2 f4 = 0.
struct Partition4 {
  std::vector<double> grid;
  double s1 = 1.0 / 3.0;
  double s2 = 2.0 / 3.0;
  std::array<Eigen::VectorXd, 4> f;

  int dim() const { return static_cast<int>(grid.size()); }
  MatC fmat(int i) const;  // i in 1..4
  void validate(double tol = kDefaultTol) const;
};

Partition4 make_partition4(int grid_size, double s1 = 1.0 / 3.0,
                           double s2 = 2.0 / 3.0);

enum class NilKind { DirectNilpotent, From3Split, FromBridge, DelegatedM2M3 };

struct NilTerm {
  MatC value;
  NilKind kind = NilKind::DirectNilpotent;
  std::array<int, 4> provenance{0, 0, 0, 0};  // originating (i,j,k,l)
};

struct NilCommutatorParts {
  MatC u, v;  // z = [u, v]
  MatC w;     // z + z* = [w*, w]
};

// Square-zero z as a commutator, via the polar template u = v_p|z|^{1/2}v_p*,
// v = v_p|z|^{1/2}; w from the 2x2 universal picture so [w*, w] = z + z*.
NilCommutatorParts nilpotent_as_commutator(const MatC& z,
                                           double tol = kDefaultTol);

// [a, b] = (ab + aba - b - ba) + (-aba) + (b) for square-zero contractions.
std::array<MatC, 3> three_nilpotent_split(const MatC& a, const MatC& b,
                                          double tol = kDefaultTol);

struct BridgeSplit {
  // The three commutators whose sum is [f1 a f4, f3 b f2]; all six arguments
  // are square-zero.
  std::array<std::pair<MatC, MatC>, 3> pairs;
  std::vector<NilTerm> nilterms;  // 9 square-zero pieces
};

BridgeSplit bridge_split(const MatC& a, const MatC& b, const Partition4& p,
                         double tol = kDefaultTol);

enum class DelegateStrategy { Report, NilIfPossible };

struct ExpandedTerm {
  std::array<int, 4> idx{0, 0, 0, 0};  // (i, j, k, l), 1-based
  MatC value;                          // [f_i a f_j, f_k b f_l]
  NilKind kind = NilKind::DelegatedM2M3;
  std::vector<NilTerm> pieces;  // square-zero resolution (empty if delegated)
  bool resolved = false;
};

struct ExpandReport {
  std::vector<ExpandedTerm> terms;  // 256 terms in lexicographic order
  int delegated_count = 0;
};

// The 256-term expansion [a,b] = sum [f_i a f_j, f_k b f_l] with per-term
// classification and square-zero resolution.
ExpandReport partition_expand(const MatC& a, const MatC& b, const Partition4& p,
                              DelegateStrategy strategy = DelegateStrategy::Report,
                              double tol = kDefaultTol);

// ||z^2|| <= tol * ||z||^2 check.
bool is_square_zero(const MatC& z, double tol = kDefaultTol);

}  // namespace cforge
