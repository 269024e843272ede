#pragma once

#include <array>
#include <cstdint>
#include <vector>
#include <limits>

#include "abscompat/canonical.hpp"
#include "abscompat/m2_geometry.hpp"

namespace abscompat {

/// SplitMix64: counter-based 64-bit generator. The k-th output is
/// mix(seed + k * 0x9E3779B97F4A7C15) with the Stafford variant-13 finalizer.
/// Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += kGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Box-Muller; one normal per call (the sine branch is discarded).
  double gaussian() noexcept;
  Complex complex_gaussian() noexcept;
  Complex phase() noexcept;

 private:
  std::uint64_t state_;
};

/// seed_i = base XOR (i * 0x9E3779B97F4A7C15).
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) noexcept;

/// Orthonormalized complex Gaussian matrix with phase-fixed R diagonal.
Unitary haar_unitary(Index n, std::uint64_t seed);

/// Spectrum uniform in [delta, 1 - delta], Haar eigenbasis. Throws BadMargin.
Effect random_strict_effect(Index n, std::uint64_t seed, double delta);

/// Haar-random projection of the given rank.
Projection random_projection(Index n, Index rank, std::uint64_t seed);

struct CommutingPair {
  Effect a;
  Effect b;
};

/// Shared Haar eigenbasis with per-eigenvalue delta <= alpha, beta and
/// alpha^2 + beta^2 in [delta, 1 - delta]. Throws BadMargin.
CommutingPair random_commuting_strict_pair(Index n, std::uint64_t seed, double delta);

StrictProjectionParams random_strict_projection_params(Index sites, std::uint64_t seed, double delta);
StrictUnitaryParams random_strict_unitary_params(Index sites, std::uint64_t seed, double delta);

/// Ground truth is kept so callers can check inversions against it.
struct GeneratedPair {
  Effect a;
  Effect b;
  RealVector x0;
  StrictProjectionParams p;
  Unitary conjugation;
};

/// construct_canonical with x0, a0 uniform in [delta, 1 - delta] and uniform
/// phases, conjugated by haar_unitary(n). Throws OddDimension, BadMargin.
GeneratedPair random_abscompat_pair(Index n, std::uint64_t seed, double delta);

/// Rank-one 2x2 projections P, Q with P far from Q and I - Q (Bloch distance
/// at least delta), lambda in [delta, 1 - delta].
PairSpecM2 random_pair_spec_m2(std::uint64_t seed, double delta);

/// Uniform point on the Bloch-ball boundary.
BlochPoint random_boundary_point(SplitMix64& rng);

/// a, b with orthogonal ranges of random sizes in a Haar basis: ab = 0 and
/// a + b <= I. Nonzero eigenvalues uniform in [delta, 1].
CommutingPair random_orthogonal_pair(Index n, std::uint64_t seed, double delta);

/// Commuting a, b with a + b <= I and both strict: neither orthogonal nor
/// absolutely compatible.
CommutingPair random_subunital_strict_pair(Index n, std::uint64_t seed, double delta);

/// Expected ranks of the five blocks, in the order p1, p2, s, n1, n2.
struct FiveBlockFixture {
  Effect a;
  Effect b;
  std::array<Index, 5> ranks{};
};

/// Haar-conjugated direct sum of scalar blocks (1, beta), (alpha, 1),
/// (0, beta), (alpha, 0) and strict 2x2 compatible pairs.
FiveBlockFixture random_five_block_pair(std::uint64_t seed, double delta);

struct ProjectionEffectPair {
  Projection p;
  Effect a;
};

/// Random projection of random rank with a strict effect that commutes with
/// it (when `commuting`) or a generic Haar-rotated strict effect.
ProjectionEffectPair random_projection_effect_pair(Index n, std::uint64_t seed, double delta, bool commuting);

/// Partners X of a 2x2 effect A in S with A, X absolutely compatible: for a
/// random boundary pivot P, A = (1 - l) P + l Q and X = (1 - l) P + l (I - Q).
std::vector<Effect> random_compatible_partners(const Effect& a, std::size_t count, std::uint64_t seed);

}  // namespace abscompat
