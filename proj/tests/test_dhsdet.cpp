#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cforge/dhsdet.hpp"
#include "cforge/rng.hpp"
#include "oracles.hpp"

using namespace cforge;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;
const Complex kI{0.0, 1.0};

PathOfInvertibles sampled_path(const std::function<MatC(double)>& eta,
                               int steps, bool closed) {
  PathOfInvertibles p;
  p.closed = closed;
  for (int k = 0; k <= steps; ++k) {
    double t = static_cast<double>(k) / steps;
    p.samples.push_back({t, eta(t)});
  }
  return p;
}

}  // namespace

TEST_CASE("path determinant basics") {
  SUBCASE("constant path is zero") {
    auto p = sampled_path([](double) { return MatC::Identity(2, 2); }, 4, true);
    DetReport r = path_determinant(p);
    CHECK(std::abs(r.value.raw) < 1e-12);
  }
  SUBCASE("scalar winding loop counts one") {
    auto p = sampled_path(
        [](double t) {
          MatC m = MatC::Identity(2, 2);
          m(0, 0) = std::exp(kI * (kTau * t));
          return m;
        },
        8, true);
    DetReport r = path_determinant(p);
    CHECK(std::abs(r.value.raw - Complex(1, 0)) < 1e-9);
    CHECK(std::abs(r.value.lattice_reduced) < 1e-9);
  }
  SUBCASE("exponential path gives Tr(h)/2pi") {
    Rng rng(201);
    MatC h = gen_hermitian(rng, 3);
    auto p = sampled_path([&](double t) { return mexp(kI * t * h); }, 16, false);
    DetReport r = path_determinant(p);
    CHECK(std::abs(r.value.raw - h.trace() / kTau) < 1e-9);
  }
  SUBCASE("coarse sampling triggers dyadic refinement") {
    MatC h = MatC::Zero(2, 2);
    h(0, 0) = 2.8;  // single step of size 2.8 > 1 forces halving
    auto p = sampled_path([&](double t) { return mexp(kI * t * h); }, 1, false);
    DetReport r = path_determinant(p);
    CHECK(r.refinement_depth >= 1);
    CHECK(std::abs(r.value.raw - Complex(2.8 / kTau, 0)) < 1e-9);
  }
  SUBCASE("branch-point jump is rejected") {
    PathOfInvertibles p;
    p.samples.push_back({0.0, MatC::Identity(2, 2)});
    p.samples.push_back({1.0, MatC(-MatC::Identity(2, 2))});
    CHECK_THROWS_AS(path_determinant(p), NumericalError);
  }
}

TEST_CASE("homomorphism and path independence") {
  Rng rng(211);
  MatC h1 = gen_hermitian(rng, 3);
  MatC h2 = gen_hermitian(rng, 3);
  auto leg1 = sampled_path([&](double t) { return mexp(kI * t * h1); }, 16,
                           false);
  MatC mid = mexp(kI * h1);
  auto leg2 = sampled_path(
      [&](double t) { return MatC(mexp(kI * t * h2) * mid); }, 16, false);
  // Concatenation: reuse leg1 then append leg2 with shifted parameters.
  PathOfInvertibles both;
  for (auto [t, v] : leg1.samples) both.samples.push_back({t / 2, v});
  for (size_t i = 1; i < leg2.samples.size(); ++i)
    both.samples.push_back(
        {0.5 + leg2.samples[i].first / 2, leg2.samples[i].second});
  Complex sum = path_determinant(leg1).value.raw +
                path_determinant(leg2).value.raw;
  CHECK(std::abs(path_determinant(both).value.raw - sum) < 1e-9);

  // Two different paths from I to the same endpoint agree modulo Z.
  MatC wind = MatC::Identity(3, 3);
  auto detour = sampled_path(
      [&](double t) {
        MatC m = mexp(kI * t * h1);
        m.col(0) *= std::exp(kI * (kTau * t));  // extra integer winding
        return m;
      },
      32, false);
  double diff = (path_determinant(detour).value.raw -
                 path_determinant(leg1).value.raw)
                    .real();
  CHECK(std::abs(diff - std::round(diff)) < 1e-9);
}

TEST_CASE("near-identity additivity of Tr log") {
  Rng rng(221);
  std::vector<MatC> us;
  MatC prod = MatC::Identity(3, 3);
  Complex sum{0, 0};
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    MatC u = mexp(kI * 0.05 * gen_hermitian(rng, 3));
    total += opnorm(MatC(u - MatC::Identity(3, 3)));
    prod = prod * u;
    sum += mlog_principal(u).trace();
  }
  REQUIRE(total < 0.25);
  CHECK(std::abs(mlog_principal(prod).trace() - sum) < 1e-9);
}

TEST_CASE("exp_product_determinant matches the path integrator") {
  SUBCASE("empty product") {
    CHECK(std::abs(exp_product_determinant({}).raw) == 0.0);
  }
  SUBCASE("single diag(2pi, 0)") {
    MatC h = MatC::Zero(2, 2);
    h(0, 0) = kTau;
    DetValue v = exp_product_determinant({h});
    CHECK(std::abs(v.raw - Complex(1, 0)) < 1e-12);
    CHECK(std::abs(v.lattice_reduced) < 1e-12);
  }
  SUBCASE("two random Hermitians, mod-Z agreement") {
    Rng rng(231);
    std::vector<MatC> hs = {gen_hermitian(rng, 3), gen_hermitian(rng, 3)};
    DetValue rule = exp_product_determinant(hs);
    DetReport path = path_determinant(make_exp_path(hs, 16));
    double diff = (rule.raw - path.value.raw).real();
    CHECK(std::abs(diff - std::round(diff)) < 1e-9);
    CHECK(std::abs(rule.raw.imag() - path.value.raw.imag()) < 1e-9);
  }
  SUBCASE("non-Hermitian rejected") {
    MatC j = MatC::Zero(2, 2);
    j(0, 1) = 1.0;
    CHECK_THROWS_AS(exp_product_determinant({j}), ValidationError);
  }
}

TEST_CASE("suzuki defect") {
  SUBCASE("commuting inputs collapse") {
    MatC a = MatC::Zero(2, 2), b = MatC::Zero(2, 2);
    a(0, 0) = 1.0;
    b(0, 0) = -0.5;
    b(1, 1) = 2.0;
    auto [c, stats] = suzuki_defect({a, b}, 4);
    CHECK(stats.norm_c < 1e-12);
  }
  SUBCASE("quadratic decay and traceless defect") {
    Rng rng(241);
    std::vector<MatC> as = {gen_hermitian(rng, 2), gen_hermitian(rng, 2)};
    double scale = opnorm(as[0]) + opnorm(as[1]);
    for (int N : {16, 32, 64}) {
      auto [c1, s1] = suzuki_defect(as, N);
      auto [c2, s2] = suzuki_defect(as, 2 * N);
      CHECK(std::abs(s1.trace_c) < 1e-10 * scale);
      const double ratio = s1.norm_c / s2.norm_c;
      CHECK(ratio > 3.5);
      CHECK(ratio < 4.5);
    }
  }
  SUBCASE("reconstruction identity") {
    Rng rng(251);
    std::vector<MatC> as = {gen_hermitian(rng, 3), gen_hermitian(rng, 3)};
    const int N = 16;
    auto [c, stats] = suzuki_defect(as, N);
    MatC sum = as[0] + as[1];
    MatC lhs = mexp(kI / double(N) * sum);
    MatC rhs = mexp(kI / double(N) * as[0]) * mexp(kI / double(N) * as[1]) *
               mexp(kI * c);
    CHECK(opnorm(MatC(lhs - rhs)) < 1e-12);
  }
}

TEST_CASE("regroup_commutators") {
  SUBCASE("commuting factors give identity commutators") {
    MatC a = MatC::Identity(2, 2) * Complex(2.0, 0.0);
    MatC b = MatC::Identity(2, 2) * Complex(0.0, 1.0);
    RegroupResult r = regroup_commutators({a, b}, 3);
    for (const auto& [u, v] : r.commutators)
      CHECK(opnorm(MatC(mult_commutator(u, v) - MatC::Identity(2, 2))) < 1e-12);
    CHECK(r.residual < 1e-12);
  }
  SUBCASE("random unitaries, combinatorial count") {
    Rng rng(261);
    for (auto [m, N] : {std::pair{2, 2}, std::pair{3, 3}, std::pair{4, 8}}) {
      std::vector<MatC> gs;
      for (int j = 0; j < m; ++j) gs.push_back(gen_unitary(rng, 3));
      RegroupResult r = regroup_commutators(gs, N);
      CHECK(r.M == m * (m - 1) * N * (N - 1) / 4);
      CHECK(r.residual < 1e-10);
    }
  }
  SUBCASE("singular factor rejected") {
    CHECK_THROWS_AS(regroup_commutators({MatC(MatC::Zero(2, 2))}, 2),
                    ValidationError);
  }
}

TEST_CASE("kernel membership") {
  SUBCASE("identity is a trivial member") {
    KernelResult r = kernel_membership(MatC(MatC::Identity(3, 3)));
    CHECK(r.member);
    REQUIRE(r.certificate.has_value());
    CHECK(r.certificate->reconstruction_residual < 1e-12);
  }
  SUBCASE("opposite phases commute back") {
    MatC u = MatC::Zero(2, 2);
    u(0, 0) = std::exp(kI * 0.7);
    u(1, 1) = std::exp(-kI * 0.7);
    KernelResult r = kernel_membership(u);
    REQUIRE(r.member);
    REQUIRE(r.certificate.has_value());
    CHECK(is_unitary(r.certificate->U, 1e-10));
    CHECK(is_unitary(r.certificate->V, 1e-10));
    CHECK(opnorm(MatC(mult_commutator(r.certificate->U, r.certificate->V) -
                      u)) < 1e-10);
  }
  SUBCASE("det != 1 is rejected with the winding value") {
    MatC u = MatC::Identity(2, 2);
    u(0, 0) = std::exp(kI * (M_PI / 3.0));
    KernelResult r = kernel_membership(u);
    CHECK_FALSE(r.member);
    CHECK_FALSE(r.certificate.has_value());
    CHECK(r.delta.lattice_reduced.real() == doctest::Approx(1.0 / 6.0));
  }
  SUBCASE("random determinant-one unitaries factor as one commutator") {
    Rng rng(271);
    for (int n = 2; n <= 6; ++n) {
      MatC u = gen_det_one_unitary(rng, n);
      KernelResult r = kernel_membership(u);
      REQUIRE(r.member);
      CHECK(r.certificate->reconstruction_residual < 1e-10);
    }
  }
  SUBCASE("non-unitary rejected") {
    CHECK_THROWS_AS(kernel_membership(MatC(2.0 * MatC::Identity(2, 2))),
                    ValidationError);
  }
}
