#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cforge/matcore.hpp"
#include "cforge/rng.hpp"

using namespace cforge;

namespace {
MatC e_unit(int n, int i, int j) {
  MatC m = MatC::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}
}  // namespace

TEST_CASE("opnorm equals the largest singular value") {
  MatC m(2, 2);
  m << Complex(3, 0), Complex(0, 0), Complex(0, 0), Complex(-4, 0);
  CHECK(opnorm(m) == doctest::Approx(4.0));
  CHECK(opnorm(MatC::Zero(3, 3)) == 0.0);
  Rng rng(11);
  MatC g = rng.gmatrix(5, 5);
  CHECK(opnorm(MatC(2.5 * g)) == doctest::Approx(2.5 * opnorm(g)));
}

TEST_CASE("commutators") {
  MatC a = e_unit(2, 0, 1), b = e_unit(2, 1, 0);
  MatC c = commutator(a, b);
  CHECK(c(0, 0) == Complex(1, 0));
  CHECK(c(1, 1) == Complex(-1, 0));
  CHECK(std::abs(c.trace()) < 1e-15);
}

TEST_CASE("polar decomposition reconstructs and restricts the isometry") {
  Rng rng(3);
  MatC s = rng.gmatrix(4, 4);
  PolarParts vp = polar(s);
  CHECK(opnorm(MatC(vp.v * vp.p - s)) < 1e-12 * opnorm(s));
  CHECK(is_hermitian(vp.p, 1e-12));
  // v* v is the support projection of p.
  MatC vv = vp.v.adjoint() * vp.v;
  CHECK(opnorm(MatC(vv * vp.p - vp.p)) < 1e-10 * opnorm(s));

  // Rank-deficient input: the isometry vanishes off the support.
  MatC low = s.col(0) * s.row(0);
  PolarParts lp = polar(low);
  CHECK(opnorm(MatC(lp.v * lp.p - low)) < 1e-10 * opnorm(low));
  CHECK(numerical_rank(lp.v) == 1);
}

TEST_CASE("func_psd applies f on the spectrum") {
  MatC a(2, 2);
  a << Complex(2, 0), Complex(1, 0), Complex(1, 0), Complex(2, 0);
  MatC r = func_psd(a, [](double t) { return t * t; });
  CHECK(opnorm(MatC(r - a * a)) < 1e-12);
  MatC s = func_psd(a, [](double t) { return std::sqrt(t); });
  CHECK(opnorm(MatC(s * s - a)) < 1e-12);
  CHECK_THROWS_AS(func_psd(e_unit(2, 0, 1), [](double t) { return t; }),
                  ValidationError);
}

TEST_CASE("exp and principal log invert each other") {
  Rng rng(7);
  MatC h = gen_hermitian(rng, 3);
  MatC u = mexp(Complex(0, 1) * h);
  CHECK(is_unitary(u, 1e-10));
  MatC lg = mlog_principal(u);
  CHECK(opnorm(MatC(mexp(lg) - u)) < 1e-10);

  // Spectrum on the closed negative real axis is rejected.
  MatC neg = -MatC::Identity(2, 2);
  CHECK_THROWS_AS(mlog_principal(neg), NumericalError);
  CHECK_THROWS_AS(mlog_principal(MatC(MatC::Zero(2, 2))), NumericalError);
}

TEST_CASE("support projection and hereditary compression") {
  MatC b = MatC::Zero(3, 3);
  b(0, 0) = 2.0;
  b(1, 1) = 1.0;
  MatC p = support_projection(b);
  CHECK(opnorm(MatC(p - (e_unit(3, 0, 0) + e_unit(3, 1, 1)))) < 1e-12);
  Rng rng(5);
  MatC h = gen_hermitian(rng, 3);
  MatC c = her_compress(b, h);
  CHECK(c(2, 2) == Complex(0, 0));
  CHECK(in_her(b, c));
  CHECK_FALSE(in_her(b, e_unit(3, 2, 2)));
}

TEST_CASE("algebra shape bookkeeping") {
  AlgebraShape s{{2, 3}, 2};
  CHECK(s.base_dim() == 5);
  CHECK(s.total_dim() == 10);
  CHECK(s.block_offset(1) == 2);
  auto idx = s.block_indices(1);
  REQUIRE(idx.size() == 6);
  CHECK(idx[0] == 2);
  CHECK(idx[3] == 7);  // second amplification copy
  CHECK_THROWS_AS((AlgebraShape{{0}, 1}.validate()), ValidationError);
}

TEST_CASE("amplify and block addressing") {
  MatC b(2, 2);
  b << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(4, 0);
  MatC a = amplify(b, 3);
  CHECK(a.rows() == 6);
  CHECK(opnorm(MatC(block_of(a, 2, 1, 1) - b)) == 0.0);
  CHECK(opnorm(block_of(a, 2, 0, 1)) == 0.0);
  MatC h = MatC::Zero(6, 6);
  set_block(h, 2, 2, 0, b);
  CHECK(opnorm(MatC(block_of(h, 2, 2, 0) - b)) == 0.0);
}

TEST_CASE("validation rejects bad input") {
  MatC bad(1, 1);
  bad(0, 0) = Complex(std::nan(""), 0);
  CHECK_THROWS_AS(opnorm(bad), ValidationError);
  CHECK_THROWS_AS(require_square(MatC::Zero(2, 3), "t"), ValidationError);
}
