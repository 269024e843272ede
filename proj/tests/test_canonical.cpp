#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "abscompat/canonical.hpp"
#include "abscompat/compat.hpp"
#include "abscompat/fuzzgen.hpp"
#include "oracle.hpp"

using namespace abscompat;
using oracle::real2;

namespace {

const double kR = 1.0 / std::sqrt(2.0);
const Complex kI(0.0, 1.0);

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ParseError;
}

StrictProjectionParams proj_params(double a0, Complex w) {
  StrictProjectionParams q;
  q.a0 = RealVector::Constant(1, a0);
  q.w = ComplexVector::Constant(1, w);
  return q;
}

Effect scalar(double x) { return Effect::from(Matrix::Constant(1, 1, x)); }

}  // namespace

TEST(Embed, Examples) {
  EXPECT_LE(max_abs(embed(M2OverDiag::uniform(1, Matrix2::Identity())) - identity(2)), 0.0);
  Matrix expected = Matrix::Zero(4, 4);
  expected(1, 1) = expected(3, 3) = 1.0;
  EXPECT_LE(max_abs(embed(pivot_p0(2)) - expected), 0.0);
}

TEST(Embed, ExtractInverts) {
  M2OverDiag x(3);
  for (Index k = 0; k < 3; ++k) {
    Matrix2 b;
    b << Complex(k, 1), Complex(2, k), Complex(-1, 0.5), Complex(0.25, k);
    x.set_site(k, b);
  }
  const Matrix m = embed(x);
  // Site k lives on coordinates (2k, 2k+1).
  EXPECT_EQ(m(2, 3), x.d12(1));
  EXPECT_EQ(m(4, 4), x.d11(2));
  EXPECT_EQ(m(0, 2), Complex(0.0));
  const M2OverDiag y = extract(m);
  for (Index k = 0; k < 3; ++k) EXPECT_EQ(y.site(k), x.site(k));
  EXPECT_EQ(kind_of([] { extract(Matrix::Identity(3, 3)); }), ErrorKind::OddDimension);
  EXPECT_EQ(kind_of([] { extract(Matrix::Ones(4, 4)); }), ErrorKind::DomainError);
}

TEST(ConstructFromCommuting, HalfHalf) {
  const EffectPair t = construct_from_commuting(scalar(0.5), scalar(0.5));
  EXPECT_LE(max_abs(t.a.matrix() - real2(0.25, 0.25, 0.25, 0.75)), 1e-15);
  EXPECT_LE(max_abs(t.b.matrix() - real2(0.25, -0.25, -0.25, 0.75)), 1e-15);
  EXPECT_LE(oracle::compat_residual(t.a.matrix(), t.b.matrix()), 1e-14);
}

TEST(ConstructFromCommuting, DoubledEigenvalue) {
  const EffectPair t = construct_from_commuting(scalar(0.6), scalar(0.3));
  const Eigen::VectorXd ev = oracle::eigenvalues(oracle::abs(t.a.matrix() - t.b.matrix()));
  EXPECT_NEAR(ev(0), 0.45, 1e-14);
  EXPECT_NEAR(ev(1), 0.45, 1e-14);
  EXPECT_LE(oracle::compat_residual(t.a.matrix(), t.b.matrix()), 1e-14);
}

TEST(ConstructFromCommuting, Preconditions) {
  EXPECT_EQ(kind_of([] { construct_from_commuting(scalar(0.9), scalar(0.9)); }), ErrorKind::SumExceedsOne);
  EXPECT_EQ(kind_of([] { construct_from_commuting(scalar(1.0), scalar(0.0)); }), ErrorKind::NotStrict);
  const Effect a = Effect::from(real2(0.3, 0, 0, 0.6));
  const Effect b = Effect::from(real2(0.4, 0.1, 0.1, 0.4));
  EXPECT_EQ(kind_of([&] { construct_from_commuting(a, b); }), ErrorKind::NotCommuting);
}

TEST(ConstructFromCommuting, JordanBlockIdentity) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 4);
    const CommutingPair c = random_commuting_strict_pair(n, seed, 0.05);
    const EffectPair t = construct_from_commuting(c.a, c.b);
    Matrix expected = Matrix::Zero(2 * n, 2 * n);
    expected.bottomRightCorner(n, n) = identity(n) - c.a.matrix() * c.a.matrix() - c.b.matrix() * c.b.matrix();
    EXPECT_LE(oracle::op_norm(oracle::jordan(t.a.matrix(), t.b.matrix()) - expected), 1e-10);
    EXPECT_LE(oracle::compat_residual(t.a.matrix(), t.b.matrix()), 1e-10);
  }
}

TEST(ConstructCanonical, SingleSiteExample) {
  const EffectPair t = construct_canonical(RealVector::Constant(1, 0.5), proj_params(kR, 1.0));
  EXPECT_LE(max_abs(t.a.matrix() - real2(0.25, 0.25, 0.25, 0.75)), 1e-15);
  EXPECT_LE(max_abs(t.b.matrix() - real2(0.25, -0.25, -0.25, 0.75)), 1e-15);
}

TEST(ConstructCanonical, DoubledEigenvaluePerSite) {
  const StrictProjectionParams q = random_strict_projection_params(3, 4, 0.05);
  RealVector x0(3);
  x0 << 0.2, 0.5, 0.8;
  const EffectPair t = construct_canonical(x0, q);
  Eigen::VectorXd ev = oracle::eigenvalues(oracle::abs(t.a.matrix() - t.b.matrix()));
  for (Index k = 0; k < 3; ++k) {
    EXPECT_NEAR(ev(2 * k), x0(k), 1e-13);
    EXPECT_NEAR(ev(2 * k + 1), x0(k), 1e-13);
  }
  EXPECT_EQ(kind_of([&] { construct_canonical(RealVector::Constant(3, 1.0), q); }), ErrorKind::NotStrictParams);
}

TEST(StrictUnitary, Example) {
  StrictUnitaryParams q;
  q.a0 = RealVector::Constant(1, kR);
  q.w1 = q.w2 = q.w3 = ComplexVector::Constant(1, 1.0);
  const Matrix u = embed(strict_unitary_from_params(q));
  EXPECT_LE(max_abs(u - kR * real2(1, 1, 1, -1)), 1e-15);
  EXPECT_TRUE(is_strict_unitary(strict_unitary_from_params(q)));
  q.a0(0) = 0.0;
  EXPECT_EQ(kind_of([&] { strict_unitary_from_params(q); }), ErrorKind::NotStrictParams);
}

TEST(StrictUnitary, Validator) {
  EXPECT_FALSE(is_strict_unitary(M2OverDiag::uniform(2, Matrix2::Identity())));
  Matrix2 h;
  h << kR, -kR, kR, kR;
  EXPECT_TRUE(is_strict_unitary(M2OverDiag::uniform(1, h)));
  Matrix2 swap;
  swap << 0, 1, 1, 0;
  EXPECT_FALSE(is_strict_unitary(M2OverDiag::uniform(1, swap)));
  Matrix2 notu;
  notu << 1, 1, 1, 1;
  EXPECT_EQ(kind_of([&] { is_strict_unitary(M2OverDiag::uniform(1, notu)); }), ErrorKind::NotUnitary);
}

TEST(StrictUnitary, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const StrictUnitaryParams q = random_strict_unitary_params(3, seed, 0.05);
    const M2OverDiag u = strict_unitary_from_params(q);
    const Matrix um = embed(u);
    EXPECT_LE(oracle::op_norm(um.adjoint() * um - identity(6)), 1e-12);
    EXPECT_TRUE(is_strict_unitary(u));
    const StrictUnitaryParams back = strict_unitary_params(u);
    EXPECT_LE((back.a0 - q.a0).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((back.w1 - q.w1).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((back.w2 - q.w2).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((back.w3 - q.w3).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(StrictProjection, Examples) {
  EXPECT_LE(max_abs(embed(strict_projection_from_params(proj_params(kR, 1.0))) - real2(0.5, 0.5, 0.5, 0.5)), 1e-15);
  Matrix expected(2, 2);
  expected << 0.5, 0.5 * kI, -0.5 * kI, 0.5;
  const Matrix p = embed(strict_projection_from_params(proj_params(kR, kI)));
  EXPECT_LE(max_abs(p - expected), 1e-15);
  EXPECT_LE(max_abs(p * p - p), 1e-15);
  EXPECT_EQ(kind_of([] { strict_projection_from_params(proj_params(0.0, 1.0)); }), ErrorKind::NotStrictParams);
  EXPECT_EQ(kind_of([] { strict_projection_from_params(proj_params(1.0, 1.0)); }), ErrorKind::NotStrictParams);
}

TEST(StrictProjection, Validator) {
  EXPECT_FALSE(is_strict_projection(pivot_p0(2)));
  EXPECT_TRUE(is_strict_projection(extract(real2(0.5, 0.5, 0.5, 0.5))));
  EXPECT_TRUE(is_strict_projection(extract(real2(0.5, -0.5, -0.5, 0.5))));
  EXPECT_EQ(kind_of([] { is_strict_projection(extract(real2(0.5, 0, 0, 0.5))); }), ErrorKind::NotProjection);
}

TEST(ProjectionPairFromUnitary, Example) {
  const ProjectionPair pp = projection_pair_from_unitary(extract(kR * real2(1, 1, 1, -1)));
  EXPECT_LE(max_abs(embed(pp.p) - real2(0.5, 0.5, 0.5, 0.5)), 1e-15);
  EXPECT_LE(max_abs(embed(pp.p_prime) - real2(0.5, -0.5, -0.5, 0.5)), 1e-15);
  EXPECT_EQ(kind_of([] { projection_pair_from_unitary(extract(real2(0, 1, 1, 0))); }), ErrorKind::NotStrictUnitary);
}

TEST(ProjectionPairFromUnitary, TracePerSiteIsOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ProjectionPair pp = projection_pair_from_unitary(strict_unitary_from_params(random_strict_unitary_params(3, seed, 0.05)));
    for (Index k = 0; k < 3; ++k) {
      EXPECT_NEAR(pp.p.site(k).trace().real(), 1.0, 1e-14);
      EXPECT_NEAR(pp.p_prime.site(k).trace().real(), 1.0, 1e-14);
    }
    const Matrix p = embed(pp.p);
    EXPECT_LE(max_abs(p * p - p), 1e-14);
    EXPECT_LE(max_abs(p * embed(pp.p_prime)), 1e-14);
  }
}

TEST(ConjugateToPivot, Examples) {
  const Matrix u = embed(conjugate_to_pivot(extract(real2(0.5, 0.5, 0.5, 0.5))));
  EXPECT_LE(max_abs(u - kR * real2(1, -1, 1, 1)), 1e-15);
  const M2OverDiag p = strict_projection_from_params(proj_params(0.3, kI));
  const Matrix v = embed(conjugate_to_pivot(p));
  EXPECT_NEAR(std::abs(v(0, 1) - (-kI * 0.3)), 0.0, 1e-15);
  EXPECT_LE(max_abs(v.adjoint() * embed(pivot_p0(1)) * v - embed(p)), 1e-15);
  EXPECT_EQ(kind_of([] { conjugate_to_pivot(pivot_p0(1)); }), ErrorKind::NotStrictProjection);
}

TEST(SimultaneousDiagonalize, CommutingFamily) {
  const Matrix u = haar_unitary(5, 9).matrix();
  RealVector d1(5), d2(5);
  d1 << 0.1, 0.1, 0.5, 0.5, 0.9;
  d2 << 0.3, 0.7, 0.2, 0.2, 0.4;
  const Matrix a = u * d1.cast<Complex>().asDiagonal() * u.adjoint();
  const Matrix b = u * d2.cast<Complex>().asDiagonal() * u.adjoint();
  const Matrix v = simultaneous_diagonalize({a, b});
  EXPECT_LE(oracle::op_norm(v.adjoint() * v - identity(5)), 1e-12);
  for (const Matrix& m : {a, b}) {
    Matrix t = v.adjoint() * m * v;
    t.diagonal().setZero();
    EXPECT_LE(max_abs(t), 1e-10);
  }
}

TEST(Canonicalize, TwoByTwoFixture) {
  const Effect a = Effect::from(real2(0.25, 0.25, 0.25, 0.75));
  const Effect b = Effect::from(real2(0.25, -0.25, -0.25, 0.75));
  const CanonicalForm cf = canonicalize(a, b);
  ASSERT_EQ(cf.sites(), 1);
  EXPECT_NEAR(cf.x0(0), 0.5, 1e-12);
  EXPECT_NEAR(cf.p.a0(0), kR, 1e-12);
  EXPECT_LE(std::abs(cf.p.w(0) - Complex(1.0)), 1e-12);
  EXPECT_LE(max_abs(cf.u0.matrix() - identity(2)), 1e-12);
  EXPECT_LE(reconstruction_residual(cf, a, b).max(), 1e-7);
}

TEST(Canonicalize, RoundTripRecoversX0) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Index n = 2 << (seed % 3);
    const GeneratedPair g = random_abscompat_pair(n, seed, 0.05);
    const CanonicalForm cf = canonicalize(g.a, g.b);
    const EffectPair r = reconstruct(cf);
    EXPECT_LE(oracle::op_norm(r.a.matrix() - g.a.matrix()), 1e-7);
    EXPECT_LE(oracle::op_norm(r.b.matrix() - g.b.matrix()), 1e-7);
    RealVector want = g.x0;
    std::sort(want.begin(), want.end());
    EXPECT_LE((cf.x0 - want).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_TRUE(std::is_sorted(cf.x0.begin(), cf.x0.end()));
    EXPECT_LE(oracle::op_norm(cf.u0.matrix().adjoint() * cf.u0.matrix() - identity(n)), 1e-10);
  }
}

TEST(Canonicalize, Errors) {
  const Effect h = Effect::from(0.5 * identity(2));
  const Effect a = Effect::from(real2(0.3, 0.1, 0.1, 0.6));
  EXPECT_EQ(kind_of([&] { canonicalize(a, a); }), ErrorKind::NotAbsolutelyCompatible);
  EXPECT_EQ(kind_of([&] { canonicalize(h, Effect::from(real2(1, 0, 0, 0))); }), ErrorKind::NotStrict);
  const Effect s = Effect::from(Matrix::Constant(1, 1, 0.5));
  EXPECT_EQ(kind_of([&] { canonicalize(s, s); }), ErrorKind::NotAbsolutelyCompatible);
}

TEST(ExchangedForm, FixtureAndRandom) {
  const Effect a = Effect::from(real2(0.25, 0.25, 0.25, 0.75));
  const Effect b = Effect::from(real2(0.25, -0.25, -0.25, 0.75));
  EXPECT_LE(reconstruction_residual(exchanged_form(canonicalize(a, b)), a, b).max(), 1e-7);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const GeneratedPair g = random_abscompat_pair(4, seed, 0.05);
    const CanonicalForm cf = canonicalize(g.a, g.b);
    const EffectPair x = reconstruct(cf);
    const EffectPair y = reconstruct(exchanged_form(cf));
    EXPECT_LE(oracle::op_norm(x.a.matrix() - y.a.matrix()), 1e-10);
    EXPECT_LE(oracle::op_norm(x.b.matrix() - y.b.matrix()), 1e-10);
  }
}
