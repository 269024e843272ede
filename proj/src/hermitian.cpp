#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "abscompat/hermitian.hpp"

namespace abscompat {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotEffect: return "NotEffect";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NegativeSpectrum: return "NegativeSpectrum";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotAbsolutelyCompatible: return "NotAbsolutelyCompatible";
    case ErrorKind::PostconditionFailure: return "PostconditionFailure";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::NotStrict: return "NotStrict";
    case ErrorKind::SumExceedsOne: return "SumExceedsOne";
    case ErrorKind::NotStrictParams: return "NotStrictParams";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotProjection: return "NotProjection";
    case ErrorKind::NotStrictUnitary: return "NotStrictUnitary";
    case ErrorKind::NotStrictProjection: return "NotStrictProjection";
    case ErrorKind::OddDimension: return "OddDimension";
    case ErrorKind::PairingFailure: return "PairingFailure";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::DetOutOfRange: return "DetOutOfRange";
    case ErrorKind::OutsideBall: return "OutsideBall";
    case ErrorKind::DegenerateSpec: return "DegenerateSpec";
    case ErrorKind::SpectralAmbiguity: return "SpectralAmbiguity";
    case ErrorKind::NotOnSphere: return "NotOnSphere";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::BadMargin: return "BadMargin";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownSuite: return "UnknownSuite";
  }
  return "Unknown";
}

namespace {

Matrix symmetrize(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << " must be a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  if (!m.allFinite()) throw Error(ErrorKind::DomainError, std::string(what) + " has non-finite entries");
}

double spectral_radius(const SpectralDecomposition& sd) {
  if (sd.eigenvalues.size() == 0) return 0.0;
  return std::max(std::abs(sd.eigenvalues(0)), std::abs(sd.eigenvalues(sd.eigenvalues.size() - 1)));
}

Matrix basis_to_projector(const Matrix& basis) { return basis * basis.adjoint(); }

// Spectrum of |x| with matching eigenvectors, sorted ascending.
SpectralDecomposition modulus_spectrum(const Matrix& x, const Tolerances& tol) {
  SpectralDecomposition sd;
  if (is_hermitian(x, tol.herm)) {
    sd = eig_hermitian(HermitianOperator::unchecked(x));
    sd.eigenvalues = sd.eigenvalues.cwiseAbs();
  } else {
    sd = eig_hermitian(HermitianOperator::unchecked(x.adjoint() * x));
    sd.eigenvalues = sd.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  }
  std::vector<Index> order(static_cast<std::size_t>(sd.eigenvalues.size()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return sd.eigenvalues(i) < sd.eigenvalues(j); });
  SpectralDecomposition sorted{RealVector(sd.eigenvalues.size()), Matrix(x.rows(), x.rows())};
  for (Index k = 0; k < sd.eigenvalues.size(); ++k) {
    sorted.eigenvalues(k) = sd.eigenvalues(order[static_cast<std::size_t>(k)]);
    sorted.eigenvectors.col(k) = sd.eigenvectors.col(order[static_cast<std::size_t>(k)]);
  }
  return sorted;
}

}  // namespace

// --- types ----------------------------------------------------------------

HermitianOperator HermitianOperator::from(const Matrix& m, const Tolerances& tol) {
  require_square(m, "operator");
  const double asym = max_abs(m - m.adjoint());
  if (asym > tol.herm) {
    std::ostringstream os;
    os << "||H - H*||_max = " << asym << " exceeds " << tol.herm;
    throw Error(ErrorKind::NotHermitian, os.str());
  }
  return HermitianOperator(symmetrize(m));
}

HermitianOperator HermitianOperator::unchecked(const Matrix& m) { return HermitianOperator(symmetrize(m)); }

Effect Effect::from(const Matrix& m, const Tolerances& tol) {
  const HermitianOperator h = HermitianOperator::from(m, tol);
  const SpectralDecomposition sd = eig_hermitian(h);
  const double lo = sd.eigenvalues(0);
  const double hi = sd.eigenvalues(sd.eigenvalues.size() - 1);
  if (lo < -tol.spec || hi > 1.0 + tol.spec) {
    std::ostringstream os;
    os << "spectrum [" << lo << ", " << hi << "] leaves [0, 1]";
    throw Error(ErrorKind::NotEffect, os.str());
  }
  return Effect(h.matrix());
}

Effect Effect::unchecked(const Matrix& m) { return Effect(symmetrize(m)); }

Projection Projection::from(const Matrix& m, const Tolerances& tol) {
  const HermitianOperator h = HermitianOperator::from(m, tol);
  const double idem = op_norm(h.matrix() * h.matrix() - h.matrix());
  if (idem > tol.proj) {
    std::ostringstream os;
    os << "||P^2 - P||_op = " << idem << " exceeds " << tol.proj;
    throw Error(ErrorKind::NotProjection, os.str());
  }
  return Projection(h.matrix());
}

Projection Projection::unchecked(const Matrix& m) { return Projection(symmetrize(m)); }

Index Projection::rank() const { return static_cast<Index>(std::lround(m_.trace().real())); }

Unitary Unitary::from(const Matrix& m, const Tolerances& tol) {
  require_square(m, "unitary");
  const double dev = op_norm(m.adjoint() * m - identity(m.rows()));
  if (dev > tol.unit) {
    std::ostringstream os;
    os << "||U*U - I||_op = " << dev << " exceeds " << tol.unit;
    throw Error(ErrorKind::NotUnitary, os.str());
  }
  return Unitary(m);
}

// --- norms ----------------------------------------------------------------

double max_abs(const Matrix& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Matrix& x, double tol) {
  return x.rows() == x.cols() && max_abs(x - x.adjoint()) <= tol;
}

Matrix identity(Index n) { return Matrix::Identity(n, n); }

double op_norm(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  if (x.rows() == x.cols() && max_abs(x - x.adjoint()) == 0.0) {
    return spectral_radius(eig_hermitian(HermitianOperator::unchecked(x)));
  }
  const Matrix gram = x.rows() >= x.cols() ? Matrix(x.adjoint() * x) : Matrix(x * x.adjoint());
  const SpectralDecomposition sd = eig_hermitian(HermitianOperator::unchecked(gram));
  return std::sqrt(std::max(0.0, sd.eigenvalues(sd.eigenvalues.size() - 1)));
}

void require_same_dim(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << what << ": " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

// --- spectral machinery ---------------------------------------------------

HermitianOperator func_calc(const HermitianOperator& h, const std::function<double(double)>& f) {
  const SpectralDecomposition sd = eig_hermitian(h);
  RealVector fl(sd.eigenvalues.size());
  for (Index i = 0; i < fl.size(); ++i) {
    fl(i) = f(sd.eigenvalues(i));
    if (!std::isfinite(fl(i))) {
      std::ostringstream os;
      os << "function undefined at eigenvalue " << sd.eigenvalues(i);
      throw Error(ErrorKind::DomainError, os.str());
    }
  }
  return HermitianOperator::unchecked(sd.eigenvectors * fl.asDiagonal() * sd.eigenvectors.adjoint());
}

Matrix spectral_basis(const SpectralDecomposition& sd, const std::function<bool(double)>& select,
                      const Tolerances& tol) {
  const Index n = sd.eigenvalues.size();
  const double gap = tol.cluster * std::max(1.0, spectral_radius(sd));
  std::vector<Index> chosen;
  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    while (end < n && sd.eigenvalues(end) - sd.eigenvalues(end - 1) <= gap) ++end;
    const double mean = sd.eigenvalues.segment(start, end - start).mean();
    if (select(mean))
      for (Index k = start; k < end; ++k) chosen.push_back(k);
    start = end;
  }
  Matrix basis(sd.eigenvectors.rows(), static_cast<Index>(chosen.size()));
  for (std::size_t k = 0; k < chosen.size(); ++k) basis.col(static_cast<Index>(k)) = sd.eigenvectors.col(chosen[k]);
  return basis;
}

Matrix range_basis(const Projection& p, const Tolerances& tol) {
  return spectral_basis(eig_hermitian(p), [](double l) { return l > 0.5; }, tol);
}

// --- derived operators ----------------------------------------------------

HermitianOperator abs_op(const Matrix& x, const Tolerances& tol) {
  require_square(x, "abs_op input");
  const SpectralDecomposition sd = modulus_spectrum(x, tol);
  return HermitianOperator::unchecked(sd.eigenvectors * sd.eigenvalues.asDiagonal() * sd.eigenvectors.adjoint());
}

Projection support_s(const Effect& a, const Tolerances& tol) {
  const Matrix basis = spectral_basis(eig_hermitian(a), [&](double l) { return l >= 1.0 - tol.spec; }, tol);
  return Projection::unchecked(basis_to_projector(basis));
}

Projection null_n(const Effect& a, const Tolerances& tol) {
  const Matrix basis = spectral_basis(eig_hermitian(a), [&](double l) { return l <= tol.spec; }, tol);
  return Projection::unchecked(basis_to_projector(basis));
}

Projection range_projection(const HermitianOperator& a, const Tolerances& tol) {
  const SpectralDecomposition sd = eig_hermitian(a);
  const double cut = tol.spec * std::max(1.0, spectral_radius(sd));
  if (sd.eigenvalues(0) < -cut) {
    std::ostringstream os;
    os << "min eigenvalue " << sd.eigenvalues(0) << " below " << -cut;
    throw Error(ErrorKind::NegativeSpectrum, os.str());
  }
  const Matrix basis = spectral_basis(sd, [&](double l) { return l > cut; }, tol);
  return Projection::unchecked(basis_to_projector(basis));
}

Projection meet(const Projection& p, const Projection& q, const Tolerances& tol) {
  require_same_dim(p.matrix(), q.matrix(), "meet");
  const HermitianOperator pqp = HermitianOperator::unchecked(p.matrix() * q.matrix() * p.matrix());
  const Matrix basis = spectral_basis(eig_hermitian(pqp), [&](double l) { return l >= 1.0 - tol.spec; }, tol);
  return Projection::unchecked(basis_to_projector(basis));
}

StrictnessReport is_strict(const Matrix& x, const Tolerances& tol) {
  require_square(x, "is_strict input");
  const SpectralDecomposition sd = modulus_spectrum(x, tol);
  StrictnessReport report;
  report.min_eigenvalue = sd.eigenvalues(0);
  report.max_eigenvalue = sd.eigenvalues(sd.eigenvalues.size() - 1);
  report.support_rank = spectral_basis(sd, [&](double l) { return l >= 1.0 - tol.spec; }, tol).cols();
  report.null_rank = spectral_basis(sd, [&](double l) { return l <= tol.spec; }, tol).cols();
  report.strict = report.min_eigenvalue > tol.spec && report.max_eigenvalue < 1.0 - tol.spec;
  return report;
}

PolarDecomposition polar_unitary(const Matrix& x, const Tolerances& tol) {
  require_square(x, "polar_unitary input");
  const Index n = x.rows();
  const SpectralDecomposition gram = eig_hermitian(HermitianOperator::unchecked(x.adjoint() * x));
  const double top = std::max(0.0, gram.eigenvalues(n - 1));
  // Kernel cut on the Gram spectrum; squared singular values carry absolute
  // error ~ eps * ||x||^2, so the cut is made there rather than on sigma.
  const double cut = tol.spec * std::max(1.0, top);

  std::vector<Index> kernel;
  std::vector<Index> range;
  for (Index i = 0; i < n; ++i) (gram.eigenvalues(i) <= cut ? kernel : range).push_back(i);

  Matrix images(n, static_cast<Index>(range.size()));
  Matrix range_vecs(n, static_cast<Index>(range.size()));
  for (std::size_t k = 0; k < range.size(); ++k) {
    const Index i = range[k];
    range_vecs.col(static_cast<Index>(k)) = gram.eigenvectors.col(i);
    images.col(static_cast<Index>(k)) = x * gram.eigenvectors.col(i) / std::sqrt(gram.eigenvalues(i));
  }

  Matrix cokernel(n, static_cast<Index>(kernel.size()));
  Index filled = 0;
  const double accept = 0.5 / std::sqrt(static_cast<double>(n));
  for (Index j = 0; j < n && filled < cokernel.cols(); ++j) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Unit(n, j);
    for (int pass = 0; pass < 2; ++pass) {
      v -= images * (images.adjoint() * v);
      if (filled > 0) v -= cokernel.leftCols(filled) * (cokernel.leftCols(filled).adjoint() * v);
    }
    const double norm = v.norm();
    if (norm > accept) cokernel.col(filled++) = v / norm;
  }

  Matrix kernel_vecs(n, static_cast<Index>(kernel.size()));
  for (std::size_t k = 0; k < kernel.size(); ++k) kernel_vecs.col(static_cast<Index>(k)) = gram.eigenvectors.col(kernel[k]);

  Matrix u = images * range_vecs.adjoint() + cokernel * kernel_vecs.adjoint();
  // Newton-Schulz polish onto the unitary group.
  for (int it = 0; it < 2; ++it) u = u * (3.0 * identity(n) - u.adjoint() * u) * 0.5;

  return PolarDecomposition{Unitary::unchecked(std::move(u)), abs_op(x, tol)};
}

HermitianOperator jordan_product(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_dim(a.matrix(), b.matrix(), "jordan_product");
  return HermitianOperator::unchecked((a.matrix() * b.matrix() + b.matrix() * a.matrix()) * 0.5);
}

}  // namespace abscompat
