#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "abscompat/error.hpp"
#include "abscompat/tolerances.hpp"

namespace abscompat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Self-adjoint n x n matrix. Construction validates ||m - m*||_max <= tol.herm
/// and stores the exactly symmetrized (m + m*) / 2.
class HermitianOperator {
 public:
  static HermitianOperator from(const Matrix& m, const Tolerances& tol = kDefaultTolerances);
  /// Symmetrizes without validating. For values that are Hermitian by construction.
  static HermitianOperator unchecked(const Matrix& m);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 protected:
  explicit HermitianOperator(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Positive contraction: spectrum inside [-tol.spec, 1 + tol.spec].
class Effect : public HermitianOperator {
 public:
  static Effect from(const Matrix& m, const Tolerances& tol = kDefaultTolerances);
  static Effect unchecked(const Matrix& m);

 protected:
  explicit Effect(Matrix m) : HermitianOperator(std::move(m)) {}
};

/// Hermitian idempotent: ||P^2 - P||_op <= tol.proj.
class Projection : public Effect {
 public:
  static Projection from(const Matrix& m, const Tolerances& tol = kDefaultTolerances);
  static Projection unchecked(const Matrix& m);

  /// Rank, read off as the rounded trace.
  Index rank() const;

 private:
  explicit Projection(Matrix m) : Effect(std::move(m)) {}
};

/// ||U*U - I||_op <= tol.unit.
class Unitary {
 public:
  static Unitary from(const Matrix& m, const Tolerances& tol = kDefaultTolerances);
  static Unitary unchecked(Matrix m) { return Unitary(std::move(m)); }

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  explicit Unitary(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Eigenvalues ascending; eigenvector columns orthonormal. Each eigenvector is
/// phase-normalized so its first largest-modulus component is real positive.
struct SpectralDecomposition {
  RealVector eigenvalues;
  Matrix eigenvectors;
};

struct StrictnessReport {
  bool strict = false;
  Index support_rank = 0;  // rank of s(|x|)
  Index null_rank = 0;     // rank of n(|x|)
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

struct PolarDecomposition {
  Unitary unitary;
  HermitianOperator modulus;
};

// --- norms and predicates -------------------------------------------------

/// Spectral (operator 2-) norm.
double op_norm(const Matrix& x);
double max_abs(const Matrix& x);
bool is_hermitian(const Matrix& x, double tol);
Matrix identity(Index n);

// --- spectral machinery ---------------------------------------------------

/// Cyclic complex Jacobi. Requires an exactly Hermitian input (HermitianOperator
/// guarantees this). Deterministic: fixed sweep order, stable sort on ties.
SpectralDecomposition eig_hermitian(const HermitianOperator& h);

/// Validating overload; throws NotHermitian.
SpectralDecomposition eig_hermitian(const Matrix& h, const Tolerances& tol = kDefaultTolerances);

/// V diag(f(lambda)) V*. Throws DomainError if f is non-finite at an eigenvalue.
HermitianOperator func_calc(const HermitianOperator& h, const std::function<double(double)>& f);

/// Orthonormal basis (columns) of the spectral subspace whose eigenvalue
/// clusters satisfy `select`. Eigenvalues within tol.cluster * max(1, ||H||)
/// of a neighbour share a cluster; the cluster mean is tested.
Matrix spectral_basis(const SpectralDecomposition& sd, const std::function<bool(double)>& select,
                      const Tolerances& tol = kDefaultTolerances);

/// Orthonormal basis for the range of a projection.
Matrix range_basis(const Projection& p, const Tolerances& tol = kDefaultTolerances);

// --- functional-calculus derived operators --------------------------------

/// |x| = (x*x)^{1/2}. Hermitian inputs go through their own eigenbasis.
HermitianOperator abs_op(const Matrix& x, const Tolerances& tol = kDefaultTolerances);

/// Eigenvalue-1 eigenspace of an effect.
Projection support_s(const Effect& a, const Tolerances& tol = kDefaultTolerances);

/// Kernel projection; n(a) = I - r(a).
Projection null_n(const Effect& a, const Tolerances& tol = kDefaultTolerances);

/// Throws NegativeSpectrum for min eigenvalue < -tol.spec * max(1, ||a||).
Projection range_projection(const HermitianOperator& a, const Tolerances& tol = kDefaultTolerances);

/// Largest projection below both p and q, from the spectral cut of pqp at 1 - tol.spec.
Projection meet(const Projection& p, const Projection& q, const Tolerances& tol = kDefaultTolerances);

StrictnessReport is_strict(const Matrix& x, const Tolerances& tol = kDefaultTolerances);

/// x = u |x|. For singular x the partial isometry is completed by mapping the
/// kernel eigenvectors (ascending order) onto a Gram-Schmidt basis of the
/// cokernel built from the standard basis in index order. x = 0 gives u = I.
PolarDecomposition polar_unitary(const Matrix& x, const Tolerances& tol = kDefaultTolerances);

/// (ab + ba) / 2. Throws DimensionMismatch.
HermitianOperator jordan_product(const HermitianOperator& a, const HermitianOperator& b);

void require_same_dim(const Matrix& a, const Matrix& b, const char* what);

}  // namespace abscompat
