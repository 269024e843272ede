#pragma once

#include <array>
#include <string_view>

#include "abscompat/hermitian.hpp"

namespace abscompat {

struct CompatReport {
  double residual = 0.0;  // || |a-b| + |I-a-b| - I ||_op
  bool compatible = false;
};

/// Symmetric in (a, b) bit-for-bit: the pair is put in a canonical order
/// before any arithmetic.
CompatReport is_abs_compatible(const Effect& a, const Effect& b, const Tolerances& tol = kDefaultTolerances);

/// ||ab||_op <= tol.compat. For positive a, b this is equivalent to a*b = 0 = ab*.
bool is_orthogonal(const Effect& a, const Effect& b, const Tolerances& tol = kDefaultTolerances);

struct EquivalencePair {
  bool lhs = false;  // p absolutely compatible with a
  bool rhs = false;  // pa = ap
};

EquivalencePair projection_compat_equiv(const Projection& p, const Effect& a,
                                        const Tolerances& tol = kDefaultTolerances);

enum class BlockId { P1 = 0, P2 = 1, S = 2, N1 = 3, N2 = 4 };
inline constexpr std::array<BlockId, 5> kBlockOrder{BlockId::P1, BlockId::P2, BlockId::S, BlockId::N1, BlockId::N2};
std::string_view block_name(BlockId id) noexcept;

struct Block {
  Projection projection;
  Matrix basis;  // n x r, orthonormal columns spanning the projection
  Matrix a;      // r x r restriction basis* a basis
  Matrix b;
};

/// a = 1 on p1, b = 1 on p2, a = 0 on n1, b = 0 on n2, both strict on s.
struct FiveBlockDecomposition {
  std::array<Block, 5> blocks;

  const Block& operator[](BlockId id) const { return blocks[static_cast<std::size_t>(id)]; }
  /// Unitary whose columns are the block bases in the order p1, p2, s, n1, n2.
  Matrix block_basis() const;
  /// Operator norm of the off-block-diagonal part of basis* x basis.
  double off_block_mass(const Matrix& x) const;
};

/// Priority rule for overlapping regions: p1 > p2 > n1 > n2 > s, each block
/// intersected with the complement of the ones already taken. Throws
/// NotAbsolutelyCompatible, or PostconditionFailure if any block check fails.
FiveBlockDecomposition five_block_decompose(const Effect& a, const Effect& b,
                                            const Tolerances& tol = kDefaultTolerances);

}  // namespace abscompat
