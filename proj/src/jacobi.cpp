#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "abscompat/hermitian.hpp"

namespace abscompat {
namespace {

constexpr int kMaxSweeps = 100;
constexpr double kConvergence = 1e-14;

double off_diagonal_frobenius(const Matrix& a) {
  double sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

// Annihilates a(p, q) with G = diag(1, conj(e)) * [[c, s], [-s, c]] where
// e = a(p,q) / |a(p,q)|, so that A <- G* A G and V <- V G.
void rotate(Matrix& a, Matrix& v, Index p, Index q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;

  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const Complex e = apq / mag;
  const Complex ec = std::conj(e);

  const Index n = a.rows();
  for (Index k = 0; k < n; ++k) {
    const Complex kp = a(k, p);
    const Complex kq = a(k, q);
    a(k, p) = c * kp - s * ec * kq;
    a(k, q) = s * kp + c * ec * kq;
  }
  for (Index k = 0; k < n; ++k) {
    const Complex pk = a(p, k);
    const Complex qk = a(q, k);
    a(p, k) = c * pk - s * e * qk;
    a(q, k) = s * pk + c * e * qk;
  }
  for (Index k = 0; k < n; ++k) {
    const Complex kp = v(k, p);
    const Complex kq = v(k, q);
    v(k, p) = c * kp - s * ec * kq;
    v(k, q) = s * kp + c * ec * kq;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = app - t * mag;
  a(q, q) = aqq + t * mag;
}

void normalize_phase(Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index best = 0;
    double best_mag = -1.0;
    for (Index i = 0; i < v.rows(); ++i) {
      const double mag = std::abs(v(i, j));
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    if (best_mag > 0.0) v.col(j) *= std::conj(v(best, j)) / best_mag;
  }
}

}  // namespace

SpectralDecomposition eig_hermitian(const HermitianOperator& h) {
  const Index n = h.dim();
  Matrix a = h.matrix();
  Matrix v = Matrix::Identity(n, n);

  const double scale = a.norm();
  if (scale > 0.0) {
    const double target = kConvergence * scale;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      if (off_diagonal_frobenius(a) <= target) break;
      for (Index p = 0; p + 1 < n; ++p)
        for (Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i).real() < a(j, j).real(); });

  SpectralDecomposition out{RealVector(n), Matrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = a(src, src).real();
    out.eigenvectors.col(k) = v.col(src);
  }
  normalize_phase(out.eigenvectors);
  return out;
}

SpectralDecomposition eig_hermitian(const Matrix& h, const Tolerances& tol) {
  return eig_hermitian(HermitianOperator::from(h, tol));
}

}  // namespace abscompat
