#pragma once

// Reference computations built directly on Eigen's dense solvers, kept apart
// from the library's own Jacobi path so tests do not check code against itself.

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXcd;

inline double op_norm(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(x).singularValues()(0);
}

inline Eigen::VectorXd eigenvalues(const Matrix& h) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

inline Matrix abs(const Matrix& h) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return es.eigenvectors() * es.eigenvalues().cwiseAbs().asDiagonal() * es.eigenvectors().adjoint();
}

inline double compat_residual(const Matrix& a, const Matrix& b) {
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  return op_norm(abs(a - b) + abs(id - a - b) - id);
}

inline Matrix jordan(const Matrix& a, const Matrix& b) { return 0.5 * (a * b + b * a); }

inline Matrix real2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace oracle
