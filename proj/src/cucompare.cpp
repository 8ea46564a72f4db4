#include "cforge/cucompare.hpp"

#include <cmath>
#include <limits>

namespace cforge {

ExtNat ExtNat::of(long long v) {
  if (v < 0) throw ValidationError("ExtNat: negative value");
  return {false, v};
}

ExtNat operator+(ExtNat a, ExtNat b) {
  if (a.infinite || b.infinite) return ExtNat::inf();
  return ExtNat::of(a.n + b.n);
}

ExtNat operator*(long long k, ExtNat x) {
  if (k < 0) throw ValidationError("ExtNat: negative multiplier");
  if (k == 0 || x.is_zero()) return ExtNat::of(0);
  if (x.infinite) return ExtNat::inf();
  return ExtNat::of(k * x.n);
}

bool operator==(ExtNat a, ExtNat b) {
  if (a.infinite != b.infinite) return false;
  return a.infinite || a.n == b.n;
}

bool operator<=(ExtNat a, ExtNat b) {
  if (b.infinite) return true;
  if (a.infinite) return false;
  return a.n <= b.n;
}

static void require_same_length(size_t a, size_t b, const char* what) {
  if (a != b) throw ValidationError(std::string(what) + ": length mismatch");
}

CuntzVector operator+(const CuntzVector& a, const CuntzVector& b) {
  require_same_length(a.ranks.size(), b.ranks.size(), "CuntzVector+");
  CuntzVector out;
  for (size_t i = 0; i < a.ranks.size(); ++i)
    out.ranks.push_back(a.ranks[i] + b.ranks[i]);
  return out;
}

CuntzVector operator*(long long k, const CuntzVector& v) {
  CuntzVector out;
  for (const auto& r : v.ranks) out.ranks.push_back(k * r);
  return out;
}

bool operator==(const CuntzVector& a, const CuntzVector& b) {
  if (a.ranks.size() != b.ranks.size()) return false;
  for (size_t i = 0; i < a.ranks.size(); ++i)
    if (!(a.ranks[i] == b.ranks[i])) return false;
  return true;
}

bool operator<=(const CuntzVector& a, const CuntzVector& b) {
  require_same_length(a.ranks.size(), b.ranks.size(), "CuntzVector<=");
  for (size_t i = 0; i < a.ranks.size(); ++i)
    if (!(a.ranks[i] <= b.ranks[i])) return false;
  return true;
}

bool CuntzVector::finite() const {
  for (const auto& r : ranks)
    if (r.infinite) return false;
  return true;
}

void TraceWeight::validate() const {
  bool any = false;
  for (double w : weights) {
    if (w < 0.0 || std::isnan(w))
      throw ValidationError("TraceWeight: weights must be in [0, inf]");
    if (w > 0.0) any = true;
  }
  if (!any) throw ValidationError("TraceWeight: all weights are zero");
}

CuntzVector cuntz_class(const MatC& a, const AlgebraShape& shape) {
  shape.validate_dim(a);
  require_finite(a, "cuntz_class");
  if (!is_hermitian(a, kDefaultTol))
    throw ValidationError("cuntz_class: input is not Hermitian");
  CuntzVector out;
  for (size_t i = 0; i < shape.blocks.size(); ++i) {
    auto idx = shape.block_indices(static_cast<int>(i));
    MatC sub(idx.size(), idx.size());
    for (size_t r = 0; r < idx.size(); ++r)
      for (size_t c = 0; c < idx.size(); ++c) sub(r, c) = a(idx[r], idx[c]);
    out.ranks.push_back(ExtNat::of(numerical_rank(sub)));
  }
  return out;
}

double d_tau(const CuntzVector& v, const TraceWeight& tau) {
  require_same_length(v.ranks.size(), tau.weights.size(), "d_tau");
  tau.validate();
  const double inf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (size_t i = 0; i < v.ranks.size(); ++i) {
    const double w = tau.weights[i];
    const ExtNat& r = v.ranks[i];
    if (w == 0.0 || r.is_zero()) continue;  // 0 * inf = 0
    if (std::isinf(w) || r.infinite) return inf;
    total += w * static_cast<double>(r.n);
  }
  return total;
}

ComparisonVerdict strict_comparison_check(
    const CuntzVector& a, const CuntzVector& b, double gamma,
    const std::vector<TraceWeight>& traces) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ValidationError("strict_comparison_check: gamma must be in (0,1)");
  ComparisonVerdict v;
  v.premise_holds = true;
  for (const auto& tau : traces) {
    const double da = d_tau(a, tau);
    const double db = d_tau(b, tau);
    // inf <= (1-gamma) inf holds; otherwise ordinary arithmetic.
    const bool ok = std::isinf(db) ? true : da <= (1.0 - gamma) * db;
    if (!ok) {
      v.premise_holds = false;
      break;
    }
  }
  v.conclusion_holds = a <= b;
  return v;
}

ComparisonVerdict strict_comparison_check(
    const MatC& a, const MatC& b, const AlgebraShape& shape, double gamma,
    const std::vector<TraceWeight>& traces) {
  return strict_comparison_check(cuntz_class(a, shape), cuntz_class(b, shape),
                                 gamma, traces);
}

std::optional<double> epsilon_delta_witness(
    const MatC& a, const MatC& b, const AlgebraShape& shape, double gamma,
    double eps, const std::vector<TraceWeight>& traces, double tol) {
  if (eps <= 0.0) throw ValidationError("epsilon_delta_witness: eps <= 0");
  auto verdict = strict_comparison_check(a, b, shape, gamma, traces);
  if (!verdict.premise_holds)
    throw ValidationError(
        "epsilon_delta_witness: strict-comparison premise fails at gamma");
  auto cutdown = [&](const MatC& h, double t) {
    return func_psd(
        h, [t](double x) { return x > t ? x - t : 0.0; }, tol);
  };
  CuntzVector ca = cuntz_class(cutdown(a, eps), shape);
  const double nb = opnorm(b);
  if (nb <= kZeroFloor) {
    // b = 0 forces a = 0 through the premise; any delta works.
    return 1.0;
  }
  for (int k = 0; k <= 60; ++k) {
    const double delta = nb * std::pow(2.0, -k);
    CuntzVector cb = cuntz_class(cutdown(b, delta), shape);
    bool ok = true;
    for (const auto& tau : traces) {
      const double da = d_tau(ca, tau);
      const double db = d_tau(cb, tau);
      if (!(std::isinf(db) || da <= (1.0 - gamma / 2.0) * db)) {
        ok = false;
        break;
      }
    }
    if (ok) return delta;
  }
  return std::nullopt;
}

std::vector<UnperforationViolation> almost_unperforated_check(
    const std::vector<CuntzVector>& S, long long k_max) {
  std::vector<UnperforationViolation> out;
  for (const auto& x : S)
    for (const auto& y : S)
      for (long long k = 1; k <= k_max; ++k)
        if ((k + 1) * x <= k * y && !(x <= y))
          out.push_back({x, y, k});
  return out;
}

std::vector<DivisibilityViolation> almost_divisible_check(
    const std::vector<CuntzVector>& S, long long n_max) {
  std::vector<DivisibilityViolation> out;
  for (long long n = 1; n <= n_max; ++n)
    for (const auto& x : S)
      for (const auto& xp : S) {
        if (!(xp <= x) || !xp.finite()) continue;  // xp << x
        bool found = false;
        for (const auto& y : S)
          if (n * y <= x && xp <= (n + 1) * y) {
            found = true;
            break;
          }
        if (!found) out.push_back({n, x, xp});
      }
  return out;
}

std::vector<CuntzVector> cu_of_matrix_block(int n) {
  if (n < 1) throw ValidationError("cu_of_matrix_block: n must be positive");
  std::vector<CuntzVector> out;
  for (int k = 0; k <= n; ++k) out.push_back({{ExtNat::of(k)}});
  out.push_back({{ExtNat::inf()}});
  return out;
}

}  // namespace cforge
