#include <algorithm>
#include <sstream>

#include "abscompat/compat.hpp"

namespace abscompat {
namespace {

// Lexicographic order on (re, im) entries, column-major.
bool canonically_before(const Matrix& x, const Matrix& y) {
  for (Index i = 0; i < x.size(); ++i) {
    const Complex u = x.data()[i];
    const Complex v = y.data()[i];
    if (u.real() != v.real()) return u.real() < v.real();
    if (u.imag() != v.imag()) return u.imag() < v.imag();
  }
  return false;
}

[[noreturn]] void postcondition(const std::string& what, double value, double bound) {
  std::ostringstream os;
  os << what << " = " << value << " exceeds " << bound;
  throw Error(ErrorKind::PostconditionFailure, os.str());
}

}  // namespace

CompatReport is_abs_compatible(const Effect& a, const Effect& b, const Tolerances& tol) {
  require_same_dim(a.matrix(), b.matrix(), "is_abs_compatible");
  const bool swap = canonically_before(b.matrix(), a.matrix());
  const Matrix& first = swap ? b.matrix() : a.matrix();
  const Matrix& second = swap ? a.matrix() : b.matrix();
  const Index n = first.rows();

  const HermitianOperator diff = abs_op(first - second, tol);
  const HermitianOperator rest = abs_op(identity(n) - (first + second), tol);
  CompatReport report;
  report.residual = op_norm(diff.matrix() + rest.matrix() - identity(n));
  report.compatible = report.residual <= tol.compat;
  return report;
}

bool is_orthogonal(const Effect& a, const Effect& b, const Tolerances& tol) {
  require_same_dim(a.matrix(), b.matrix(), "is_orthogonal");
  return op_norm(a.matrix() * b.matrix()) <= tol.compat;
}

EquivalencePair projection_compat_equiv(const Projection& p, const Effect& a, const Tolerances& tol) {
  require_same_dim(p.matrix(), a.matrix(), "projection_compat_equiv");
  EquivalencePair out;
  out.lhs = is_abs_compatible(p, a, tol).compatible;
  out.rhs = op_norm(p.matrix() * a.matrix() - a.matrix() * p.matrix()) <= tol.compat;
  return out;
}

std::string_view block_name(BlockId id) noexcept {
  switch (id) {
    case BlockId::P1: return "p1";
    case BlockId::P2: return "p2";
    case BlockId::S: return "s";
    case BlockId::N1: return "n1";
    case BlockId::N2: return "n2";
  }
  return "?";
}

Matrix FiveBlockDecomposition::block_basis() const {
  const Index n = blocks[0].basis.rows();
  Matrix w(n, n);
  Index col = 0;
  for (const Block& blk : blocks) {
    if (blk.basis.cols() == 0) continue;
    w.middleCols(col, blk.basis.cols()) = blk.basis;
    col += blk.basis.cols();
  }
  return w.leftCols(col);
}

double FiveBlockDecomposition::off_block_mass(const Matrix& x) const {
  const Matrix w = block_basis();
  Matrix conj = w.adjoint() * x * w;
  Index start = 0;
  for (const Block& blk : blocks) {
    const Index r = blk.basis.cols();
    conj.block(start, start, r, r).setZero();
    start += r;
  }
  return op_norm(conj);
}

FiveBlockDecomposition five_block_decompose(const Effect& a, const Effect& b, const Tolerances& tol) {
  const CompatReport report = is_abs_compatible(a, b, tol);
  if (!report.compatible) {
    std::ostringstream os;
    os << "residual " << report.residual << " exceeds " << tol.compat;
    throw Error(ErrorKind::NotAbsolutelyCompatible, os.str());
  }
  const Index n = a.dim();
  const Matrix I = identity(n);

  const Projection p1 = support_s(a, tol);
  Matrix taken = p1.matrix();
  const Projection p2 = meet(support_s(b, tol), Projection::unchecked(I - taken), tol);
  taken += p2.matrix();
  const Projection n1 = meet(null_n(a, tol), Projection::unchecked(I - taken), tol);
  taken += n1.matrix();
  const Projection n2 = meet(null_n(b, tol), Projection::unchecked(I - taken), tol);
  taken += n2.matrix();
  // Remainder, re-extracted spectrally so that it is an exact projection.
  const Projection s = range_projection(HermitianOperator::unchecked(I - taken), tol);

  auto make_block = [&](const Projection& p) {
    const Matrix basis = range_basis(p, tol);
    return Block{p, basis, basis.adjoint() * a.matrix() * basis, basis.adjoint() * b.matrix() * basis};
  };

  FiveBlockDecomposition out{{make_block(p1), make_block(p2), make_block(s), make_block(n1), make_block(n2)}};

  // Postconditions.
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < out.blocks.size(); ++i) {
    sum += out.blocks[i].projection.matrix();
    for (std::size_t j = i + 1; j < out.blocks.size(); ++j) {
      const double overlap = op_norm(out.blocks[i].projection.matrix() * out.blocks[j].projection.matrix());
      if (overlap > tol.block) postcondition("block overlap", overlap, tol.block);
    }
    const Matrix& p = out.blocks[i].projection.matrix();
    const double ca = op_norm(p * a.matrix() - a.matrix() * p);
    const double cb = op_norm(p * b.matrix() - b.matrix() * p);
    if (std::max(ca, cb) > tol.block) postcondition("block commutator", std::max(ca, cb), tol.block);
  }
  const double completeness = op_norm(sum - I);
  if (completeness > tol.block) postcondition("||sum of blocks - I||", completeness, tol.block);

  auto check_value = [&](BlockId id, const Matrix& restricted, double value, const char* what) {
    const Index r = restricted.rows();
    if (r == 0) return;
    const double dev = op_norm(restricted - value * identity(r));
    if (dev > tol.block) postcondition(std::string(what) + " on " + std::string(block_name(id)), dev, tol.block);
  };
  check_value(BlockId::P1, out[BlockId::P1].a, 1.0, "a - 1");
  check_value(BlockId::P2, out[BlockId::P2].b, 1.0, "b - 1");
  check_value(BlockId::N1, out[BlockId::N1].a, 0.0, "a");
  check_value(BlockId::N2, out[BlockId::N2].b, 0.0, "b");

  const Block& strict_block = out[BlockId::S];
  if (strict_block.basis.cols() > 0) {
    if (!is_strict(strict_block.a, tol).strict || !is_strict(strict_block.b, tol).strict)
      throw Error(ErrorKind::PostconditionFailure, "s-block restriction is not strict");
    const CompatReport inner =
        is_abs_compatible(Effect::unchecked(strict_block.a), Effect::unchecked(strict_block.b), tol);
    if (!inner.compatible) postcondition("s-block compatibility residual", inner.residual, tol.compat);
  }

  const double mass = std::max(out.off_block_mass(a.matrix()), out.off_block_mass(b.matrix()));
  if (mass > tol.block) postcondition("off-block mass", mass, tol.block);
  return out;
}

}  // namespace abscompat
