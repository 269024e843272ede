#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/QR>

#include "abscompat/compat.hpp"
#include "abscompat/fuzzgen.hpp"

namespace abscompat {
namespace {

void check_margin(double delta) {
  if (!(delta > 0.0 && delta < 0.5)) {
    std::ostringstream os;
    os << "margin " << delta << " is not in (0, 1/2)";
    throw Error(ErrorKind::BadMargin, os.str());
  }
}

void check_positive(Index n) {
  if (n < 1) throw Error(ErrorKind::DimensionMismatch, "dimension must be positive");
}

}  // namespace

double SplitMix64::gaussian() noexcept {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex SplitMix64::complex_gaussian() noexcept {
  const double re = gaussian();
  const double im = gaussian();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

Complex SplitMix64::phase() noexcept { return std::polar(1.0, 2.0 * std::numbers::pi * uniform()); }

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) noexcept {
  return base ^ (trial * SplitMix64::kGamma);
}

Unitary haar_unitary(Index n, std::uint64_t seed) {
  check_positive(n);
  SplitMix64 rng(seed);
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = rng.complex_gaussian();
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * identity(n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return Unitary::unchecked(std::move(q));
}

Effect random_strict_effect(Index n, std::uint64_t seed, double delta) {
  check_margin(delta);
  check_positive(n);
  SplitMix64 rng(seed);
  RealVector spectrum(n);
  for (Index i = 0; i < n; ++i) spectrum(i) = rng.uniform(delta, 1.0 - delta);
  const Matrix u = haar_unitary(n, rng()).matrix();
  Effect out = Effect::unchecked(u * spectrum.asDiagonal() * u.adjoint());
  if (!is_strict(out.matrix()).strict) throw Error(ErrorKind::PostconditionFailure, "generated effect not strict");
  return out;
}

Projection random_projection(Index n, Index rank, std::uint64_t seed) {
  check_positive(n);
  if (rank < 0 || rank > n) throw Error(ErrorKind::DimensionMismatch, "rank out of range");
  const Matrix u = haar_unitary(n, seed).matrix();
  const Matrix basis = u.leftCols(rank);
  return Projection::unchecked(basis * basis.adjoint());
}

CommutingPair random_commuting_strict_pair(Index n, std::uint64_t seed, double delta) {
  check_margin(delta);
  check_positive(n);
  SplitMix64 rng(seed);
  const double hi = std::sqrt(1.0 - delta - delta * delta);
  RealVector alpha(n), beta(n);
  for (Index i = 0; i < n; ++i) {
    double x, y;
    do {
      x = rng.uniform(delta, hi);
      y = rng.uniform(delta, hi);
    } while (x * x + y * y > 1.0 - delta || x * x + y * y < delta);
    alpha(i) = x;
    beta(i) = y;
  }
  const Matrix u = haar_unitary(n, rng()).matrix();
  return CommutingPair{Effect::unchecked(u * alpha.asDiagonal() * u.adjoint()),
                       Effect::unchecked(u * beta.asDiagonal() * u.adjoint())};
}

StrictProjectionParams random_strict_projection_params(Index sites, std::uint64_t seed, double delta) {
  check_margin(delta);
  SplitMix64 rng(seed);
  StrictProjectionParams p{RealVector(sites), ComplexVector(sites)};
  for (Index k = 0; k < sites; ++k) {
    p.a0(k) = rng.uniform(delta, 1.0 - delta);
    p.w(k) = rng.phase();
  }
  return p;
}

StrictUnitaryParams random_strict_unitary_params(Index sites, std::uint64_t seed, double delta) {
  check_margin(delta);
  SplitMix64 rng(seed);
  StrictUnitaryParams q{RealVector(sites), ComplexVector(sites), ComplexVector(sites), ComplexVector(sites)};
  for (Index k = 0; k < sites; ++k) {
    q.a0(k) = rng.uniform(delta, 1.0 - delta);
    q.w1(k) = rng.phase();
    q.w2(k) = rng.phase();
    q.w3(k) = rng.phase();
  }
  return q;
}

GeneratedPair random_abscompat_pair(Index n, std::uint64_t seed, double delta) {
  check_margin(delta);
  if (n < 2 || n % 2 != 0) {
    std::ostringstream os;
    os << "dimension " << n << " is not a positive even number";
    throw Error(ErrorKind::OddDimension, os.str());
  }
  const Index m = n / 2;
  SplitMix64 rng(seed);
  RealVector x0(m);
  for (Index k = 0; k < m; ++k) x0(k) = rng.uniform(delta, 1.0 - delta);
  const StrictProjectionParams p = random_strict_projection_params(m, rng(), delta);
  const Unitary u = haar_unitary(n, rng());

  const EffectPair base = construct_canonical(x0, p);
  const Matrix& U = u.matrix();
  GeneratedPair out{Effect::unchecked(U * base.a.matrix() * U.adjoint()),
                    Effect::unchecked(U * base.b.matrix() * U.adjoint()), x0, p, u};
  if (!is_abs_compatible(out.a, out.b).compatible)
    throw Error(ErrorKind::PostconditionFailure, "generated pair is not absolutely compatible");
  return out;
}

BlochPoint random_boundary_point(SplitMix64& rng) {
  Eigen::Vector3d v;
  do {
    v = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
  } while (v.norm() < 1e-12);
  return BlochPoint::of(kBallCenter.vec() + kBallRadius * v.normalized());
}

PairSpecM2 random_pair_spec_m2(std::uint64_t seed, double delta) {
  check_margin(delta);
  SplitMix64 rng(seed);
  const BlochPoint p = random_boundary_point(rng);
  BlochPoint q;
  do {
    q = random_boundary_point(rng);
  } while (distance(p, q) < delta || distance(p, antipode(q)) < delta);
  const double lambda = rng.uniform(delta, 1.0 - delta);
  return PairSpecM2{Projection::unchecked(bloch_inverse(p).matrix()), Projection::unchecked(bloch_inverse(q).matrix()),
                    lambda};
}

}  // namespace abscompat

namespace abscompat {

CommutingPair random_orthogonal_pair(Index n, std::uint64_t seed, double delta) {
  check_margin(delta);
  check_positive(n);
  SplitMix64 rng(seed);
  const Index split = static_cast<Index>(rng() % static_cast<std::uint64_t>(n + 1));
  RealVector alpha = RealVector::Zero(n), beta = RealVector::Zero(n);
  for (Index i = 0; i < split; ++i) alpha(i) = rng.uniform(delta, 1.0);
  for (Index i = split; i < n; ++i) beta(i) = rng.uniform(delta, 1.0);
  const Matrix u = haar_unitary(n, rng()).matrix();
  return CommutingPair{Effect::unchecked(u * alpha.asDiagonal() * u.adjoint()),
                       Effect::unchecked(u * beta.asDiagonal() * u.adjoint())};
}

CommutingPair random_subunital_strict_pair(Index n, std::uint64_t seed, double delta) {
  check_margin(delta);
  check_positive(n);
  SplitMix64 rng(seed);
  RealVector alpha(n), beta(n);
  for (Index i = 0; i < n; ++i) {
    double x, y;
    do {
      x = rng.uniform(delta, 1.0 - delta);
      y = rng.uniform(delta, 1.0 - delta);
    } while (x + y > 1.0);
    alpha(i) = x;
    beta(i) = y;
  }
  const Matrix u = haar_unitary(n, rng()).matrix();
  return CommutingPair{Effect::unchecked(u * alpha.asDiagonal() * u.adjoint()),
                       Effect::unchecked(u * beta.asDiagonal() * u.adjoint())};
}

FiveBlockFixture random_five_block_pair(std::uint64_t seed, double delta) {
  check_margin(delta);
  SplitMix64 rng(seed);
  // Counts of (1, beta), (alpha, 1), (0, beta), (alpha, 0) scalars and strict M2 pairs.
  std::array<Index, 5> counts{};
  Index n = 0;
  for (Index& c : counts) {
    c = static_cast<Index>(rng() % 3);
    n += c;
  }
  if (n == 0) counts[4] = 1;
  n = counts[0] + counts[1] + counts[2] + counts[3] + 2 * counts[4];

  Matrix a = Matrix::Zero(n, n), b = Matrix::Zero(n, n);
  Index at = 0;
  // Partner values stay away from {0, 1} so the expected ranks are unambiguous.
  auto partner = [&] { return rng.uniform(delta, 1.0 - delta); };
  for (Index i = 0; i < counts[0]; ++i, ++at) { a(at, at) = 1.0; b(at, at) = partner(); }
  for (Index i = 0; i < counts[1]; ++i, ++at) { a(at, at) = partner(); b(at, at) = 1.0; }
  for (Index i = 0; i < counts[2]; ++i, ++at) { a(at, at) = 0.0; b(at, at) = partner(); }
  for (Index i = 0; i < counts[3]; ++i, ++at) { a(at, at) = partner(); b(at, at) = 0.0; }
  for (Index i = 0; i < counts[4]; ++i, at += 2) {
    const GeneratedPair g = random_abscompat_pair(2, rng(), delta);
    a.block(at, at, 2, 2) = g.a.matrix();
    b.block(at, at, 2, 2) = g.b.matrix();
  }
  const Matrix u = haar_unitary(n, rng()).matrix();
  FiveBlockFixture out{Effect::unchecked(u * a * u.adjoint()), Effect::unchecked(u * b * u.adjoint()), {}};
  out.ranks = {counts[0], counts[1], 2 * counts[4], counts[2], counts[3]};
  return out;
}

std::vector<Effect> random_compatible_partners(const Effect& a, std::size_t count, std::uint64_t seed) {
  const BlochPoint pa = bloch_map(a.matrix());
  SplitMix64 rng(seed);
  std::vector<Effect> out;
  out.reserve(count);
  while (out.size() < count) {
    const BlochPoint pivot = random_boundary_point(rng);
    if (distance(pivot, pa) < 1e-3) continue;
    const PivotDecomposition d = decompose_through_pivot(pa, pivot);
    const BlochPoint x = (1.0 - d.lambda) * pivot + d.lambda * antipode(d.q);
    out.push_back(bloch_inverse(x));
  }
  return out;
}

}  // namespace abscompat

namespace abscompat {

ProjectionEffectPair random_projection_effect_pair(Index n, std::uint64_t seed, double delta, bool commuting) {
  check_margin(delta);
  check_positive(n);
  SplitMix64 rng(seed);
  const Index rank = static_cast<Index>(rng() % static_cast<std::uint64_t>(n + 1));
  const Matrix u = haar_unitary(n, rng()).matrix();
  const Matrix basis = u.leftCols(rank);
  const Projection p = Projection::unchecked(basis * basis.adjoint());
  if (!commuting) return {p, random_strict_effect(n, rng(), delta)};
  // Diagonal in the projection's own eigenbasis, so pa = ap.
  RealVector spectrum(n);
  for (Index i = 0; i < n; ++i) spectrum(i) = rng.uniform(delta, 1.0 - delta);
  Matrix mixed = Matrix::Zero(n, n);
  // Independent rotations inside range(p) and its complement.
  if (rank > 0) mixed.topLeftCorner(rank, rank) = haar_unitary(rank, rng()).matrix();
  if (rank < n) mixed.bottomRightCorner(n - rank, n - rank) = haar_unitary(n - rank, rng()).matrix();
  const Matrix v = u * mixed;
  return {p, Effect::unchecked(v * spectrum.asDiagonal() * v.adjoint())};
}

}  // namespace abscompat
