#include <gtest/gtest.h>

#include "abscompat/compat.hpp"
#include "abscompat/fuzzgen.hpp"
#include "oracle.hpp"

using namespace abscompat;
using oracle::real2;

namespace {

Effect eff(double a, double b, double c, double d) { return Effect::from(real2(a, b, c, d)); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ParseError;
}

}  // namespace

TEST(AbsCompat, ProjectionWithItself) {
  const Projection p = random_projection(4, 2, 3);
  const CompatReport r = is_abs_compatible(p, p);
  EXPECT_TRUE(r.compatible);
  EXPECT_LE(r.residual, 1e-12);
}

TEST(AbsCompat, HalfIdentityHasResidualOne) {
  const Effect h = eff(0.5, 0, 0, 0.5);
  const CompatReport r = is_abs_compatible(h, h);
  EXPECT_FALSE(r.compatible);
  EXPECT_NEAR(r.residual, 1.0, 1e-14);
}

TEST(AbsCompat, TwoByTwoFixture) {
  const Effect a = eff(0.25, 0.25, 0.25, 0.75);
  const Effect b = eff(0.25, -0.25, -0.25, 0.75);
  const CompatReport r = is_abs_compatible(a, b);
  EXPECT_TRUE(r.compatible);
  EXPECT_LE(r.residual, 1e-12);
}

TEST(AbsCompat, MatchesOracleOnRandomInputs) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Effect a = random_strict_effect(4, seed, 0.05);
    const Effect b = random_strict_effect(4, seed + 1000, 0.05);
    EXPECT_NEAR(is_abs_compatible(a, b).residual, oracle::compat_residual(a.matrix(), b.matrix()), 1e-10);
  }
}

TEST(AbsCompat, BitwiseSymmetric) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GeneratedPair g = random_abscompat_pair(6, seed, 0.05);
    EXPECT_EQ(is_abs_compatible(g.a, g.b).residual, is_abs_compatible(g.b, g.a).residual);
    const Effect c = random_strict_effect(6, seed, 0.05);
    EXPECT_EQ(is_abs_compatible(g.a, c).residual, is_abs_compatible(c, g.a).residual);
  }
}

TEST(AbsCompat, DimensionMismatch) {
  EXPECT_EQ(kind_of([] { is_abs_compatible(Effect::from(identity(2)), Effect::from(identity(3))); }),
            ErrorKind::DimensionMismatch);
}

TEST(Orthogonal, Examples) {
  EXPECT_TRUE(is_orthogonal(eff(1, 0, 0, 0), eff(0, 0, 0, 1)));
  const Effect a = eff(0.3, 0.1, 0.1, 0.4);
  EXPECT_FALSE(is_orthogonal(a, a));
}

TEST(Orthogonal, ImpliesSubunitalAndCompatible) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CommutingPair c = random_orthogonal_pair(5, seed, 0.05);
    EXPECT_TRUE(is_orthogonal(c.a, c.b));
    EXPECT_LE(oracle::eigenvalues(c.a.matrix() + c.b.matrix()).maxCoeff(), 1.0 + 1e-12);
    EXPECT_LE(oracle::compat_residual(c.a.matrix(), c.b.matrix()), 1e-8);
  }
}

TEST(ProjectionEquiv, Examples) {
  const Projection p = Projection::from(real2(1, 0, 0, 0));
  const EquivalencePair d = projection_compat_equiv(p, eff(0.3, 0, 0, 0.8));
  EXPECT_TRUE(d.lhs);
  EXPECT_TRUE(d.rhs);
  const EquivalencePair nd = projection_compat_equiv(p, eff(0.5, 0.5, 0.5, 0.5));
  EXPECT_FALSE(nd.lhs);
  EXPECT_FALSE(nd.rhs);
  const EquivalencePair z = projection_compat_equiv(Projection::from(Matrix::Zero(2, 2)), eff(0.5, 0.5, 0.5, 0.5));
  EXPECT_TRUE(z.lhs);
  EXPECT_TRUE(z.rhs);
}

TEST(FiveBlock, DiagonalExample) {
  const FiveBlockDecomposition d = five_block_decompose(eff(1, 0, 0, 0.3), eff(0.7, 0, 0, 1));
  EXPECT_LE(max_abs(d[BlockId::P1].projection.matrix() - real2(1, 0, 0, 0)), 1e-12);
  EXPECT_LE(max_abs(d[BlockId::P2].projection.matrix() - real2(0, 0, 0, 1)), 1e-12);
  EXPECT_EQ(d[BlockId::S].projection.rank(), 0);
  EXPECT_EQ(d[BlockId::N1].projection.rank(), 0);
  EXPECT_EQ(d[BlockId::N2].projection.rank(), 0);
}

TEST(FiveBlock, IdentityAndZeroGoesToP1) {
  const FiveBlockDecomposition d = five_block_decompose(eff(1, 0, 0, 1), eff(0, 0, 0, 0));
  EXPECT_EQ(d[BlockId::P1].projection.rank(), 2);
  for (BlockId id : {BlockId::P2, BlockId::S, BlockId::N1, BlockId::N2}) EXPECT_EQ(d[id].projection.rank(), 0);
}

TEST(FiveBlock, StrictPairIsAllS) {
  const FiveBlockDecomposition d = five_block_decompose(eff(0.25, 0.25, 0.25, 0.75), eff(0.25, -0.25, -0.25, 0.75));
  EXPECT_EQ(d[BlockId::S].projection.rank(), 2);
}

TEST(FiveBlock, RandomFixturesMatchExpectedRanks) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const FiveBlockFixture f = random_five_block_pair(seed, 0.05);
    const FiveBlockDecomposition d = five_block_decompose(f.a, f.b);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(d.blocks[k].basis.cols(), f.ranks[k]) << "seed " << seed;
    EXPECT_LE(d.off_block_mass(f.a.matrix()), 1e-8);
    EXPECT_LE(d.off_block_mass(f.b.matrix()), 1e-8);
    const Block& s = d[BlockId::S];
    if (s.basis.cols() > 0) {
      EXPECT_TRUE(is_strict(s.a).strict);
      EXPECT_TRUE(is_strict(s.b).strict);
      EXPECT_LE(oracle::compat_residual(s.a, s.b), 1e-8);
    }
  }
}

TEST(FiveBlock, RejectsIncompatible) {
  EXPECT_EQ(kind_of([] { five_block_decompose(eff(0.5, 0, 0, 0.5), eff(0.5, 0, 0, 0.5)); }),
            ErrorKind::NotAbsolutelyCompatible);
}
