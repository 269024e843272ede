#pragma once

#include <vector>

#include "abscompat/hermitian.hpp"

namespace abscompat {

using ComplexVector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;

/// A 2x2 matrix whose entries are diagonal m x m matrices, stored per site.
/// embed() places site k on coordinates (2k, 2k+1).
struct M2OverDiag {
  ComplexVector d11, d12, d21, d22;

  M2OverDiag() = default;
  explicit M2OverDiag(Index sites);
  static M2OverDiag uniform(Index sites, const Matrix2& block);

  Index sites() const noexcept { return d11.size(); }
  Matrix2 site(Index k) const;
  void set_site(Index k, const Matrix2& block);
};

Matrix embed(const M2OverDiag& x);
/// Inverse of embed. Throws DomainError if x has mass outside the per-site
/// 2x2 pattern (beyond `tol`), OddDimension if x has odd size.
M2OverDiag extract(const Matrix& x, double tol = 1e-12);

M2OverDiag pivot_p0(Index sites);  // [[0,0],[0,1]] per site
M2OverDiag pivot_p1(Index sites);  // [[1,0],[0,0]] per site

struct StrictProjectionParams {
  RealVector a0;     // per site, in (0, 1)
  ComplexVector w;   // per site, unimodular
};

struct StrictUnitaryParams {
  RealVector a0;
  ComplexVector w1, w2, w3;
};

struct EffectPair {
  Effect a;
  Effect b;
};

/// a1 = [[a^2, ab], [ab, I - a^2]], b1 = [[b^2, -ab], [-ab, I - b^2]] in
/// dimension 2n (block layout). Throws NotCommuting, NotStrict, SumExceedsOne.
EffectPair construct_from_commuting(const Effect& a, const Effect& b, const Tolerances& tol = kDefaultTolerances);

/// A = (1 - x0) P0 + x0 P, B = (1 - x0) P0 + x0 (I - P), per site.
EffectPair construct_canonical(const RealVector& x0, const StrictProjectionParams& p,
                              const Tolerances& tol = kDefaultTolerances);

/// u1 = w1 a0, u2 = w2 (1 - a0^2)^{1/2}, u3 = w3 (1 - a0^2)^{1/2}, u4 = -conj(w1) w2 w3 a0.
M2OverDiag strict_unitary_from_params(const StrictUnitaryParams& q, const Tolerances& tol = kDefaultTolerances);
/// Inverse of strict_unitary_from_params; throws NotStrictUnitary.
StrictUnitaryParams strict_unitary_params(const M2OverDiag& u, const Tolerances& tol = kDefaultTolerances);
/// Throws NotUnitary if u is not unitary.
bool is_strict_unitary(const M2OverDiag& u, const Tolerances& tol = kDefaultTolerances);

/// [[a0^2, w a0 (1 - a0^2)^{1/2}], [conj(w) a0 (1 - a0^2)^{1/2}, 1 - a0^2]].
M2OverDiag strict_projection_from_params(const StrictProjectionParams& q, const Tolerances& tol = kDefaultTolerances);
/// Inverse of strict_projection_from_params; throws NotStrictProjection.
StrictProjectionParams strict_projection_params(const M2OverDiag& p, const Tolerances& tol = kDefaultTolerances);
/// Throws NotProjection if p is not a projection.
bool is_strict_projection(const M2OverDiag& p, const Tolerances& tol = kDefaultTolerances);

struct ProjectionPair {
  M2OverDiag p;        // rows (u1, u2)
  M2OverDiag p_prime;  // rows (u3, u4)
};

ProjectionPair projection_pair_from_unitary(const M2OverDiag& u, const Tolerances& tol = kDefaultTolerances);

/// Strict unitary U = [[(1 - a0^2)^{1/2}, -w a0], [a0, w (1 - a0^2)^{1/2}]] with P = U* P0 U.
M2OverDiag conjugate_to_pivot(const M2OverDiag& p, const Tolerances& tol = kDefaultTolerances);

/// a = U0 embed((1 - x0) P0 + x0 P) U0*, b = U0 embed((1 - x0) P0 + x0 P') U0*.
struct CanonicalForm {
  Unitary u0 = Unitary::unchecked(Matrix());
  RealVector x0;
  StrictProjectionParams p;

  Index sites() const noexcept { return x0.size(); }
};

/// Re-expression with the roles of P and the pivots exchanged:
/// U* a U = (1 - x0) P + x0 P0, U* b U = (1 - x0) P + x0 P1, with
/// P = [[a0^2, a0 (1 - a0^2)^{1/2}], [a0 (1 - a0^2)^{1/2}, 1 - a0^2]].
struct ExchangedForm {
  Unitary u = Unitary::unchecked(Matrix());
  RealVector x0;
  RealVector a0;
};

struct ReconstructionResidual {
  double a = 0.0;
  double b = 0.0;
  double max() const { return a > b ? a : b; }
};

/// Joint eigenbasis of a commuting Hermitian family by sequential refinement:
/// diagonalize the first member, then each later member inside every cluster
/// of the previous ones.
Matrix simultaneous_diagonalize(const std::vector<Matrix>& family, const Tolerances& tol = kDefaultTolerances);

/// Sites are sorted by ascending x0, ties by ascending a0; phase gauge w = 1.
/// Throws NotStrict, NotAbsolutelyCompatible, OddDimension, PairingFailure,
/// PostconditionFailure.
CanonicalForm canonicalize(const Effect& a, const Effect& b, const Tolerances& tol = kDefaultTolerances);

EffectPair reconstruct(const CanonicalForm& cf);
EffectPair reconstruct(const ExchangedForm& cf);
ReconstructionResidual reconstruction_residual(const CanonicalForm& cf, const Effect& a, const Effect& b);
ReconstructionResidual reconstruction_residual(const ExchangedForm& cf, const Effect& a, const Effect& b);

ExchangedForm exchanged_form(const CanonicalForm& cf, const Tolerances& tol = kDefaultTolerances);

}  // namespace abscompat
