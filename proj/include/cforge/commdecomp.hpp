#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cforge/matcore.hpp"

namespace cforge {

struct BoundCheck {
  std::string name;
  double claimed = 0.0;
  double measured = 0.0;
  bool pass = false;
};

// Verified decomposition h = sum_i [x_i, y_i] + residual.
struct DecompCertificate {
  MatC target;
  std::vector<std::pair<MatC, MatC>> pairs;
  MatC residual;
  std::vector<std::pair<double, double>> factor_norms;
  std::vector<BoundCheck> bound_checks;
  double reconstruction_residual = 0.0;

  bool all_bounds_pass() const;
  double sum_factor_products() const;
};

// Fills in factor norms and the measured reconstruction residual.
DecompCertificate make_certificate(MatC target,
                                   std::vector<std::pair<MatC, MatC>> pairs,
                                   MatC residual,
                                   std::vector<BoundCheck> checks = {});

BoundCheck check_bound(const std::string& name, double claimed, double measured,
                       double tol = kDefaultTol);

// s = q r with ||q|| = ||r|| = ||s||^{1/2} (q = v|s|^{1/2}, r = |s|^{1/2}).
std::pair<MatC, MatC> split_norm_factor(const MatC& s);

// Given d_1, ..., d_n in M_m with sum 0, builds bidiagonal X, Y in M_n(M_m)
// whose commutator has main diagonal (d_1, ..., d_n) and
// ||X|| ||Y|| <= 4 n max_i ||d_i||.
std::pair<MatC, MatC> diagonal_commutator(const std::vector<MatC>& d,
                                          double tol = kDefaultTol);

struct RosenblumProblem {
  MatC d_left;
  MatC d_right;
  MatC rhs;
  double lambda_left = 0.0;
  double lambda_right = 0.0;
  double radius = 1.5;
  int start_nodes = 64;
  int node_cap = 4096;
};

struct RosenblumResult {
  MatC b;
  double max_resolvent_left = 0.0;
  double max_resolvent_right = 0.0;
  int nodes = 0;
};

// Contour-integral solve of d_left b - b d_right = rhs over the circle of the
// given radius around lambda_left. Periodic trapezoid with node doubling.
RosenblumResult rosenblum_solve(const RosenblumProblem& p,
                                double tol = kDefaultTol);

struct ZeroDiagResult {
  MatC X;
  MatC Y;
  double max_entry_norm = 0.0;     // max off-diagonal ||b_{k,j}||
  double max_resolvent = 0.0;      // max resolvent norm seen at any node
  std::vector<BoundCheck> checks;  // lemma-level bounds
};

// h in M_n(M_m) with diagonal blocks h_{jj} = [x_j, y_j]; returns X, Y with
// [X, Y] = h, X = diag(x_j/||x_j|| + 3(j-1)), off-diagonal Y entries from the
// Rosenblum solver.
ZeroDiagResult zero_diagonal_commutator(
    const MatC& h, int m,
    const std::vector<std::pair<MatC, MatC>>& diag_witnesses,
    double tol = kDefaultTol);

using BaseDecomposer =
    std::function<std::vector<std::pair<MatC, MatC>>(const MatC& s)>;

// Trace-zero h in M_n(M_m) as an exact sum of two commutators. Default base:
// scalars (m = 1), where the only trace-zero element is 0 (empty sum); for
// m > 1 the block-diagonal sum is decomposed recursively.
DecompCertificate two_commutator(const MatC& h, int m = 1,
                                 double tol = kDefaultTol,
                                 const BaseDecomposer& base = {});

// Averaging along the main diagonal: certificate for h (x) 1_n in M_n(A) to a
// certificate for h in A with (pairs * n^2) pairs.
DecompCertificate matrix_average_reduce(const DecompCertificate& cert, int n);

// Witness for Blackadar's relation a <~ b^{(+) n}: x with x* x = a (embedded
// top-left in M_n) and x x* in her(b (x) 1_n). Empty iff rank(a) > n rank(b).
std::optional<MatC> blackadar_witness(const MatC& a, const MatC& b, int n);

struct PeelResult {
  std::vector<std::pair<MatC, MatC>> pairs;  // (z_j, w_j), n of them
  MatC h_tail;                               // in her(b)
  std::vector<BoundCheck> checks;
};

// h in her(a) peeled through a <~ b^{(+) n}: h = sum [z_j, w_j] + h_tail with
// ||z_j|| ||w_j|| <= ||h|| and ||h_tail|| <= n ||h||.
PeelResult hereditary_peel(const MatC& a, const MatC& b, int n, const MatC& h,
                           double tol = kDefaultTol,
                           const std::optional<MatC>& witness = std::nullopt);

struct FackTower {
  std::vector<MatC> blocks;     // e_1, ..., e_K, pairwise orthogonal PSD
  int L = 1;                    // replication constant
  std::vector<MatC> witnesses;  // witness for e_j <~ e_{j+1}^{(+) L}
  int ambient_dim = 0;

  void validate(double tol = kDefaultTol) const;
};

// Tower of orthogonal corner projections with rank schedule ranks[j] and
// rank(e_j) <= L rank(e_{j+1}).
FackTower build_fack_tower(int ambient_dim, const std::vector<int>& ranks,
                           int L);

// Approximate decomposer applied inside her(e_j): must leave a residual of
// norm <= lambda ||h|| with factor norms <= C^{1/2} ||h||^{1/2}.
using StageDecomposer =
    std::function<DecompCertificate(const MatC& h, const MatC& e)>;

struct FackOptions {
  double lambda = 0.5;
  double C = 0.0;  // stage factor-norm constant; 0 = skip the factor check
  int M = 2;       // pairs per decomposer call
  double tol = kDefaultTol;
};

struct FackResult {
  DecompCertificate cert;  // grouped pairs + final residual
  std::vector<double> stage_residuals;  // ||h_n'|| per stage
  int group_count = 0;                  // 3L + L1 M
  int L1 = 0;
};

// Truncated Fack engine: peel-and-decompose through the tower, then group
// stage factors over orthogonal blocks (odd/even parity for the bridging
// terms).
FackResult fack_engine(const MatC& h, const FackTower& tower,
                       const StageDecomposer& stage, const FackOptions& opt);

// Lossy wrapper around the exact two-commutator pipeline: stage residual is
// exactly lambda * ||h||, factor norms balanced to sqrt scale.
StageDecomposer make_matrix_stage_decomposer(double lambda,
                                             double tol = kDefaultTol);

}  // namespace cforge
