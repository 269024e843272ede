#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "abscompat/canonical.hpp"
#include "abscompat/compat.hpp"

namespace abscompat {
namespace {

void require_sites(Index expected, Index got, const char* what) {
  if (expected != got) {
    std::ostringstream os;
    os << what << ": expected " << expected << " sites, got " << got;
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

bool strictly_inside(double v, const Tolerances& tol) { return v > tol.spec && v < 1.0 - tol.spec; }

void check_strict_params(const RealVector& a0, const char* what, const Tolerances& tol) {
  for (Index k = 0; k < a0.size(); ++k) {
    if (!std::isfinite(a0(k)) || !strictly_inside(a0(k), tol)) {
      std::ostringstream os;
      os << what << "[" << k << "] = " << a0(k) << " is not in (0, 1)";
      throw Error(ErrorKind::NotStrictParams, os.str());
    }
  }
}

void check_phases(const ComplexVector& w, const char* what, const Tolerances& tol) {
  for (Index k = 0; k < w.size(); ++k) {
    if (std::abs(std::abs(w(k)) - 1.0) > tol.unit) {
      std::ostringstream os;
      os << what << "[" << k << "] has modulus " << std::abs(w(k));
      throw Error(ErrorKind::NotStrictParams, os.str());
    }
  }
}

Complex unit_phase(Complex z) { return z / std::abs(z); }

// Per-site (1 - x) P0 + x P for a projection given by its entries.
Matrix2 pivot_mix(double x, const Matrix2& pivot, const Matrix2& proj) { return (1.0 - x) * pivot + x * proj; }

Matrix2 p0_block() {
  Matrix2 m = Matrix2::Zero();
  m(1, 1) = 1.0;
  return m;
}

Matrix2 p1_block() {
  Matrix2 m = Matrix2::Zero();
  m(0, 0) = 1.0;
  return m;
}

Matrix2 projection_block(double a0, Complex w) {
  const double s = std::sqrt(1.0 - a0 * a0);
  Matrix2 m;
  m << a0 * a0, w * a0 * s, std::conj(w) * a0 * s, s * s;
  return m;
}

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace

// --- M2OverDiag -----------------------------------------------------------

M2OverDiag::M2OverDiag(Index sites)
    : d11(ComplexVector::Zero(sites)),
      d12(ComplexVector::Zero(sites)),
      d21(ComplexVector::Zero(sites)),
      d22(ComplexVector::Zero(sites)) {}

M2OverDiag M2OverDiag::uniform(Index sites, const Matrix2& block) {
  M2OverDiag out(sites);
  for (Index k = 0; k < sites; ++k) out.set_site(k, block);
  return out;
}

Matrix2 M2OverDiag::site(Index k) const {
  Matrix2 m;
  m << d11(k), d12(k), d21(k), d22(k);
  return m;
}

void M2OverDiag::set_site(Index k, const Matrix2& block) {
  d11(k) = block(0, 0);
  d12(k) = block(0, 1);
  d21(k) = block(1, 0);
  d22(k) = block(1, 1);
}

Matrix embed(const M2OverDiag& x) {
  const Index m = x.sites();
  Matrix out = Matrix::Zero(2 * m, 2 * m);
  for (Index k = 0; k < m; ++k) out.block<2, 2>(2 * k, 2 * k) = x.site(k);
  return out;
}

M2OverDiag extract(const Matrix& x, double tol) {
  if (x.rows() != x.cols()) fail(ErrorKind::DimensionMismatch, "extract: matrix is not square");
  if (x.rows() % 2 != 0) fail(ErrorKind::OddDimension, "extract: odd dimension");
  const Index m = x.rows() / 2;
  M2OverDiag out(m);
  Matrix rest = x;
  for (Index k = 0; k < m; ++k) {
    out.set_site(k, x.block<2, 2>(2 * k, 2 * k));
    rest.block<2, 2>(2 * k, 2 * k).setZero();
  }
  if (max_abs(rest) > tol) fail(ErrorKind::DomainError, "extract: mass outside the per-site 2x2 pattern");
  return out;
}

M2OverDiag pivot_p0(Index sites) { return M2OverDiag::uniform(sites, p0_block()); }
M2OverDiag pivot_p1(Index sites) { return M2OverDiag::uniform(sites, p1_block()); }

// --- forward constructions ------------------------------------------------

EffectPair construct_from_commuting(const Effect& a, const Effect& b, const Tolerances& tol) {
  require_same_dim(a.matrix(), b.matrix(), "construct_from_commuting");
  const Matrix& A = a.matrix();
  const Matrix& B = b.matrix();
  const double comm = op_norm(A * B - B * A);
  if (comm > tol.compat) {
    std::ostringstream os;
    os << "||ab - ba|| = " << comm;
    fail(ErrorKind::NotCommuting, os.str());
  }
  if (!is_strict(A, tol).strict) fail(ErrorKind::NotStrict, "a is not strict");
  if (!is_strict(B, tol).strict) fail(ErrorKind::NotStrict, "b is not strict");
  const Matrix sq = A * A + B * B;
  const StrictnessReport sum = is_strict(sq, tol);
  if (sum.max_eigenvalue > 1.0 + tol.spec) {
    std::ostringstream os;
    os << "a^2 + b^2 has eigenvalue " << sum.max_eigenvalue;
    fail(ErrorKind::SumExceedsOne, os.str());
  }
  if (!sum.strict) fail(ErrorKind::NotStrict, "a^2 + b^2 is not strict");

  const Index n = a.dim();
  const Matrix I = identity(n);
  const Matrix ab = (A * B + B * A) * 0.5;
  Matrix a1(2 * n, 2 * n);
  Matrix b1(2 * n, 2 * n);
  a1 << A * A, ab, ab, I - A * A;
  b1 << B * B, -ab, -ab, I - B * B;
  return {Effect::unchecked(a1), Effect::unchecked(b1)};
}

EffectPair construct_canonical(const RealVector& x0, const StrictProjectionParams& p, const Tolerances& tol) {
  require_sites(x0.size(), p.a0.size(), "construct_canonical a0");
  require_sites(x0.size(), p.w.size(), "construct_canonical w");
  check_strict_params(x0, "x0", tol);
  check_strict_params(p.a0, "a0", tol);
  check_phases(p.w, "w", tol);

  const Index m = x0.size();
  M2OverDiag A(m), B(m);
  const Matrix2 I2 = Matrix2::Identity();
  for (Index k = 0; k < m; ++k) {
    const Matrix2 proj = projection_block(p.a0(k), p.w(k));
    A.set_site(k, pivot_mix(x0(k), p0_block(), proj));
    B.set_site(k, pivot_mix(x0(k), p0_block(), I2 - proj));
  }
  return {Effect::unchecked(embed(A)), Effect::unchecked(embed(B))};
}

// --- strict unitaries and projections -------------------------------------

M2OverDiag strict_unitary_from_params(const StrictUnitaryParams& q, const Tolerances& tol) {
  const Index m = q.a0.size();
  require_sites(m, q.w1.size(), "w1");
  require_sites(m, q.w2.size(), "w2");
  require_sites(m, q.w3.size(), "w3");
  check_strict_params(q.a0, "a0", tol);
  check_phases(q.w1, "w1", tol);
  check_phases(q.w2, "w2", tol);
  check_phases(q.w3, "w3", tol);
  M2OverDiag u(m);
  for (Index k = 0; k < m; ++k) {
    const double a0 = q.a0(k);
    const double s = std::sqrt(1.0 - a0 * a0);
    u.d11(k) = q.w1(k) * a0;
    u.d12(k) = q.w2(k) * s;
    u.d21(k) = q.w3(k) * s;
    u.d22(k) = -std::conj(q.w1(k)) * q.w2(k) * q.w3(k) * a0;
  }
  return u;
}

bool is_strict_unitary(const M2OverDiag& u, const Tolerances& tol) {
  Unitary::from(embed(u), tol);
  for (Index k = 0; k < u.sites(); ++k) {
    for (const Complex z : {u.d11(k), u.d12(k), u.d21(k), u.d22(k)})
      if (!strictly_inside(std::abs(z), tol)) return false;
  }
  return true;
}

StrictUnitaryParams strict_unitary_params(const M2OverDiag& u, const Tolerances& tol) {
  if (!is_strict_unitary(u, tol)) fail(ErrorKind::NotStrictUnitary, "strict_unitary_params");
  const Index m = u.sites();
  StrictUnitaryParams q{RealVector(m), ComplexVector(m), ComplexVector(m), ComplexVector(m)};
  for (Index k = 0; k < m; ++k) {
    q.a0(k) = std::abs(u.d11(k));
    q.w1(k) = unit_phase(u.d11(k));
    q.w2(k) = unit_phase(u.d12(k));
    q.w3(k) = unit_phase(u.d21(k));
  }
  return q;
}

M2OverDiag strict_projection_from_params(const StrictProjectionParams& q, const Tolerances& tol) {
  require_sites(q.a0.size(), q.w.size(), "w");
  check_strict_params(q.a0, "a0", tol);
  check_phases(q.w, "w", tol);
  M2OverDiag p(q.a0.size());
  for (Index k = 0; k < q.a0.size(); ++k) p.set_site(k, projection_block(q.a0(k), q.w(k)));
  return p;
}

bool is_strict_projection(const M2OverDiag& p, const Tolerances& tol) {
  Projection::from(embed(p), tol);
  for (Index k = 0; k < p.sites(); ++k) {
    if (std::abs(p.d11(k).imag()) > tol.proj) return false;
    if (!strictly_inside(p.d11(k).real(), tol)) return false;
    if (std::abs(p.d11(k) + p.d22(k) - 1.0) > tol.proj) return false;
  }
  return true;
}

StrictProjectionParams strict_projection_params(const M2OverDiag& p, const Tolerances& tol) {
  if (!is_strict_projection(p, tol)) fail(ErrorKind::NotStrictProjection, "strict_projection_params");
  const Index m = p.sites();
  StrictProjectionParams q{RealVector(m), ComplexVector(m)};
  for (Index k = 0; k < m; ++k) {
    q.a0(k) = std::sqrt(p.d11(k).real());
    q.w(k) = unit_phase(p.d12(k));
  }
  return q;
}

ProjectionPair projection_pair_from_unitary(const M2OverDiag& u, const Tolerances& tol) {
  if (!is_strict_unitary(u, tol)) fail(ErrorKind::NotStrictUnitary, "projection_pair_from_unitary");
  const Index m = u.sites();
  ProjectionPair out{M2OverDiag(m), M2OverDiag(m)};
  for (Index k = 0; k < m; ++k) {
    const Complex u1 = u.d11(k), u2 = u.d12(k), u3 = u.d21(k), u4 = u.d22(k);
    Matrix2 p, pp;
    p << std::norm(u1), std::conj(u1) * u2, std::conj(u2) * u1, std::norm(u2);
    pp << std::norm(u3), std::conj(u3) * u4, std::conj(u4) * u3, std::norm(u4);
    out.p.set_site(k, p);
    out.p_prime.set_site(k, pp);
  }
  return out;
}

M2OverDiag conjugate_to_pivot(const M2OverDiag& p, const Tolerances& tol) {
  if (!is_strict_projection(p, tol)) fail(ErrorKind::NotStrictProjection, "conjugate_to_pivot");
  const StrictProjectionParams q = strict_projection_params(p, tol);
  M2OverDiag u(p.sites());
  for (Index k = 0; k < p.sites(); ++k) {
    const double a0 = q.a0(k);
    const double s = std::sqrt(1.0 - a0 * a0);
    Matrix2 blk;
    blk << s, -q.w(k) * a0, a0, q.w(k) * s;
    u.set_site(k, blk);
  }
  return u;
}

// --- canonicalization -----------------------------------------------------

Matrix simultaneous_diagonalize(const std::vector<Matrix>& family, const Tolerances& tol) {
  if (family.empty()) fail(ErrorKind::EmptyInput, "simultaneous_diagonalize");
  const Index m = family.front().rows();
  std::vector<Matrix> groups{identity(m)};
  for (const Matrix& f : family) {
    require_same_dim(f, family.front(), "simultaneous_diagonalize");
    const double gap = tol.cluster * std::max(1.0, op_norm(f));
    std::vector<Matrix> next;
    for (const Matrix& g : groups) {
      if (g.cols() == 1) {
        next.push_back(g);
        continue;
      }
      const SpectralDecomposition sd = eig_hermitian(HermitianOperator::unchecked(g.adjoint() * f * g));
      const Matrix rotated = g * sd.eigenvectors;
      Index start = 0;
      const Index r = sd.eigenvalues.size();
      while (start < r) {
        Index end = start + 1;
        while (end < r && sd.eigenvalues(end) - sd.eigenvalues(end - 1) <= gap) ++end;
        next.push_back(rotated.middleCols(start, end - start));
        start = end;
      }
    }
    groups = std::move(next);
  }
  Matrix out(m, m);
  Index col = 0;
  for (const Matrix& g : groups) {
    out.middleCols(col, g.cols()) = g;
    col += g.cols();
  }
  return out;
}

CanonicalForm canonicalize(const Effect& a, const Effect& b, const Tolerances& tol) {
  require_same_dim(a.matrix(), b.matrix(), "canonicalize");
  if (!is_strict(a.matrix(), tol).strict) fail(ErrorKind::NotStrict, "a is not strict");
  if (!is_strict(b.matrix(), tol).strict) fail(ErrorKind::NotStrict, "b is not strict");
  const CompatReport report = is_abs_compatible(a, b, tol);
  if (!report.compatible) {
    std::ostringstream os;
    os << "residual " << report.residual << " exceeds " << tol.compat;
    fail(ErrorKind::NotAbsolutelyCompatible, os.str());
  }
  const Index n = a.dim();
  if (n % 2 != 0) fail(ErrorKind::OddDimension, "strict compatible pairs need even dimension");
  const Index m = n / 2;
  const Matrix& A = a.matrix();
  const Matrix& B = b.matrix();

  // (i) modulus |a - b| and z = I - a - b.
  const HermitianOperator mod = abs_op(A - B, tol);
  const SpectralDecomposition mod_sd = eig_hermitian(mod);
  const double pair_gap = tol.cluster * std::max(1.0, mod_sd.eigenvalues(n - 1));
  for (Index k = 0; k < m; ++k) {
    const double d = mod_sd.eigenvalues(2 * k + 1) - mod_sd.eigenvalues(2 * k);
    if (d > pair_gap) {
      std::ostringstream os;
      os << "eigenvalues of |a-b| do not pair: gap " << d << " at index " << 2 * k;
      fail(ErrorKind::PairingFailure, os.str());
    }
  }

  // (ii) spectral halves of z.
  const SpectralDecomposition z_sd = eig_hermitian(HermitianOperator::unchecked(identity(n) - (A + B)));
  Index negatives = 0;
  for (Index i = 0; i < n; ++i) {
    if (std::abs(z_sd.eigenvalues(i)) <= tol.spec) fail(ErrorKind::PairingFailure, "I - a - b is singular");
    if (z_sd.eigenvalues(i) < 0.0) ++negatives;
  }
  if (negatives != m) {
    std::ostringstream os;
    os << "spectral halves of I - a - b have ranks " << negatives << " and " << n - negatives;
    fail(ErrorKind::PairingFailure, os.str());
  }
  const Matrix v_neg = z_sd.eigenvectors.leftCols(m);   // carries the pivot P0
  const Matrix v_pos = z_sd.eigenvectors.rightCols(m);

  // (iii)-(iv) joint eigenbasis of the commuting family on the positive half.
  const Matrix q_neg = v_neg * v_neg.adjoint();
  const std::vector<Matrix> family{
      v_pos.adjoint() * mod.matrix() * v_pos,
      v_pos.adjoint() * A * v_pos,
      v_pos.adjoint() * A * q_neg * A * v_pos,
  };
  const Matrix e_pos = v_pos * simultaneous_diagonalize(family, tol);

  // (v) pair the negative half to the positive one through the polar factor
  // of the off-diagonal block, making every site coupling real positive.
  const Matrix coupling = e_pos.adjoint() * A * v_neg;
  const PolarDecomposition polar = polar_unitary(coupling, tol);
  const Matrix f_neg = v_neg * polar.unitary.matrix().adjoint();

  // (vi) per-site parameters.
  RealVector x0(m), a0(m);
  for (Index k = 0; k < m; ++k) {
    const Eigen::VectorXcd e = e_pos.col(k);
    x0(k) = e.dot(mod.matrix() * e).real();
    const double a11 = e.dot(A * e).real();
    a0(k) = std::sqrt(std::max(0.0, a11 / x0(k)));
  }

  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    if (x0(i) != x0(j)) return x0(i) < x0(j);
    return a0(i) < a0(j);
  });

  CanonicalForm cf;
  cf.x0.resize(m);
  cf.p.a0.resize(m);
  cf.p.w = ComplexVector::Ones(m);
  Matrix u0(n, n);
  for (Index k = 0; k < m; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    cf.x0(k) = x0(src);
    cf.p.a0(k) = a0(src);
    u0.col(2 * k) = e_pos.col(src);
    u0.col(2 * k + 1) = f_neg.col(src);
  }
  cf.u0 = Unitary::unchecked(std::move(u0));

  // (vii) verification.
  for (Index k = 0; k < m; ++k) {
    if (!strictly_inside(cf.x0(k), tol) || !strictly_inside(cf.p.a0(k), tol)) {
      std::ostringstream os;
      os << "site " << k << ": x0 = " << cf.x0(k) << ", a0 = " << cf.p.a0(k) << " not strict";
      fail(ErrorKind::PostconditionFailure, os.str());
    }
    const double b0_sq = cf.x0(k) * (1.0 - cf.p.a0(k) * cf.p.a0(k));
    if (b0_sq <= tol.spec) {
      std::ostringstream os;
      os << "site " << k << ": b0^2 = " << b0_sq << " not strict";
      fail(ErrorKind::PostconditionFailure, os.str());
    }
  }
  const ReconstructionResidual res = reconstruction_residual(cf, a, b);
  if (res.max() > tol.canon) {
    std::ostringstream os;
    os << "reconstruction residual " << res.max() << " exceeds " << tol.canon;
    fail(ErrorKind::PostconditionFailure, os.str());
  }
  return cf;
}

EffectPair reconstruct(const CanonicalForm& cf) {
  const Index m = cf.sites();
  M2OverDiag A(m), B(m);
  const Matrix2 I2 = Matrix2::Identity();
  for (Index k = 0; k < m; ++k) {
    const Matrix2 proj = projection_block(cf.p.a0(k), cf.p.w(k));
    A.set_site(k, pivot_mix(cf.x0(k), p0_block(), proj));
    B.set_site(k, pivot_mix(cf.x0(k), p0_block(), I2 - proj));
  }
  const Matrix& U = cf.u0.matrix();
  return {Effect::unchecked(U * embed(A) * U.adjoint()), Effect::unchecked(U * embed(B) * U.adjoint())};
}

EffectPair reconstruct(const ExchangedForm& cf) {
  const Index m = cf.x0.size();
  M2OverDiag A(m), B(m);
  for (Index k = 0; k < m; ++k) {
    const Matrix2 proj = projection_block(cf.a0(k), 1.0);
    A.set_site(k, (1.0 - cf.x0(k)) * proj + cf.x0(k) * p0_block());
    B.set_site(k, (1.0 - cf.x0(k)) * proj + cf.x0(k) * p1_block());
  }
  const Matrix& U = cf.u.matrix();
  return {Effect::unchecked(U * embed(A) * U.adjoint()), Effect::unchecked(U * embed(B) * U.adjoint())};
}

namespace {
template <class Form>
ReconstructionResidual residual_of(const Form& cf, const Effect& a, const Effect& b) {
  const EffectPair r = reconstruct(cf);
  require_same_dim(r.a.matrix(), a.matrix(), "reconstruction_residual");
  return {op_norm(r.a.matrix() - a.matrix()), op_norm(r.b.matrix() - b.matrix())};
}
}  // namespace

ReconstructionResidual reconstruction_residual(const CanonicalForm& cf, const Effect& a, const Effect& b) {
  return residual_of(cf, a, b);
}

ReconstructionResidual reconstruction_residual(const ExchangedForm& cf, const Effect& a, const Effect& b) {
  return residual_of(cf, a, b);
}

ExchangedForm exchanged_form(const CanonicalForm& cf, const Tolerances& tol) {
  const Index m = cf.sites();
  check_strict_params(cf.x0, "x0", tol);
  const M2OverDiag v = conjugate_to_pivot(strict_projection_from_params(cf.p, tol), tol);
  // With P = V* P0 V, V P0 V* has off-diagonal -a0 (1 - a0^2)^{1/2};
  // D = diag(-1, 1) flips it to the w-free gauge and fixes P0 and P1.
  Matrix2 d = Matrix2::Identity();
  d(0, 0) = -1.0;
  M2OverDiag change(m);
  for (Index k = 0; k < m; ++k) change.set_site(k, v.site(k).adjoint() * d);
  return ExchangedForm{Unitary::unchecked(cf.u0.matrix() * embed(change)), cf.x0, cf.p.a0};
}

}  // namespace abscompat
