#pragma once

#include <vector>

#include <Eigen/Dense>

#include "abscompat/hermitian.hpp"

namespace abscompat {

/// Image of [[a, alpha], [conj(alpha), 1 - a]] under (a, Re alpha, Im alpha).
struct BlochPoint {
  double x = 0.0, y = 0.0, z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static BlochPoint of(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
};

inline BlochPoint operator+(const BlochPoint& p, const BlochPoint& q) { return {p.x + q.x, p.y + q.y, p.z + q.z}; }
inline BlochPoint operator-(const BlochPoint& p, const BlochPoint& q) { return {p.x - q.x, p.y - q.y, p.z - q.z}; }
inline BlochPoint operator*(double t, const BlochPoint& p) { return {t * p.x, t * p.y, t * p.z}; }
double distance(const BlochPoint& p, const BlochPoint& q);

/// Centre (1/2, 0, 0) and radius 1/2 of the sphere of rank-one projections.
inline constexpr BlochPoint kBallCenter{0.5, 0.0, 0.0};
inline constexpr double kBallRadius = 0.5;

/// Reflection through the ball centre; the image of I - X.
BlochPoint antipode(const BlochPoint& p);

struct PivotalSphere {
  BlochPoint pivot;
  double index = 0.0;
  BlochPoint center;
  double radius = 0.0;
};

struct PairSpecM2 {
  Projection p = Projection::unchecked(Matrix::Zero(2, 2));
  Projection q = Projection::unchecked(Matrix::Zero(2, 2));
  double lambda = 0.0;
};

struct M2Pair {
  Effect a;
  Effect b;
};

/// Throws TraceNotOne, DetOutOfRange.
BlochPoint bloch_map(const Matrix& x, const Tolerances& tol = kDefaultTolerances);
/// Throws OutsideBall.
Effect bloch_inverse(const BlochPoint& pt, const Tolerances& tol = kDefaultTolerances);

/// 0 < det X < 1/4 and trace X = 1, strict inequalities with margin tol.geo.
bool in_S(const Matrix& x, const Tolerances& tol = kDefaultTolerances);

/// A = (1 - l) P + l Q, B = (1 - l) P + l (I - Q). Throws DegenerateSpec.
M2Pair pair_from_projections(const PairSpecM2& spec, const Tolerances& tol = kDefaultTolerances);

/// Inverse of pair_from_projections. Throws NotStrict, NotAbsolutelyCompatible,
/// SpectralAmbiguity.
PairSpecM2 decompose_pair_m2(const Effect& a, const Effect& b, const Tolerances& tol = kDefaultTolerances);

/// Sphere with diameter from the pivot to (1 - l) P + l P'. Throws DegenerateSpec.
PivotalSphere pivotal_sphere(const Projection& pivot, double lambda, const Tolerances& tol = kDefaultTolerances);

struct GeometryResiduals {
  double tangency = 0.0;      // | |c_Bd - c_l| - (1/2 - l/2) |
  double coplanarity = 0.0;   // smallest / largest singular value of the difference vectors
  double parallelism = 0.0;   // |(A - B) x (Q - Q')| / (|A - B| |Q - Q'|)
  double right_angle = 0.0;   // |(A - P) . (B - P)|
  double antipodality = 0.0;  // |midpoint(A, B) - c_l|
  double max() const;
};

struct GeometryReport {
  BlochPoint p, p_prime, q, q_prime, a, b;
  PivotalSphere sphere;
  GeometryResiduals residuals;
};

GeometryReport geometry_report(const PairSpecM2& spec, const Tolerances& tol = kDefaultTolerances);

struct BoundaryPair {
  BlochPoint r;        // on the ball boundary, C = (1 - l) P + l R
  BlochPoint r_prime;  // antipode of r
  BlochPoint c;
  BlochPoint d;        // antipode of c on the pivotal sphere
};

/// C on the pivotal sphere -> (R, R'). Throws NotOnSphere.
BoundaryPair point_bijection(const PivotalSphere& sphere, const BlochPoint& c,
                             const Tolerances& tol = kDefaultTolerances);
/// R on the ball boundary -> (C, D). Throws NotOnSphere.
BoundaryPair points_from_boundary(const PivotalSphere& sphere, const BlochPoint& r,
                                  const Tolerances& tol = kDefaultTolerances);

/// For an interior point A and a boundary point P, the decomposition
/// A = (1 - l) P + l Q with Q the second intersection of line PA with the
/// boundary. Throws OutsideBall, DegenerateSpec.
struct PivotDecomposition {
  BlochPoint q;
  double lambda = 0.0;
};
PivotDecomposition decompose_through_pivot(const BlochPoint& a, const BlochPoint& pivot,
                                           const Tolerances& tol = kDefaultTolerances);

struct SpheroidStats {
  double mean = 0.0;    // mean of |X - A| + |X - A'|
  double spread = 0.0;  // max - min
  double relative_spread() const { return mean > 0.0 ? spread / mean : spread; }
  std::size_t count = 0;
};

/// Throws EmptyInput, NotAbsolutelyCompatible.
SpheroidStats spheroid_residual(const Effect& a, const std::vector<Effect>& partners,
                                const Tolerances& tol = kDefaultTolerances);

/// Deterministic Fibonacci-lattice sample of the sphere surface.
std::vector<BlochPoint> sample_sphere(const PivotalSphere& sphere, std::size_t count);

}  // namespace abscompat
