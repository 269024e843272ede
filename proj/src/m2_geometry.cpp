#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "abscompat/compat.hpp"
#include "abscompat/m2_geometry.hpp"

namespace abscompat {
namespace {

void require_2x2(const Matrix& x, const char* what) {
  if (x.rows() != 2 || x.cols() != 2) {
    std::ostringstream os;
    os << what << " must be 2x2, got " << x.rows() << "x" << x.cols();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

double det2(const Matrix& x) { return (x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0)).real(); }

double ball_excess(const BlochPoint& p) { return distance(p, kBallCenter) - kBallRadius; }

void require_rank_one(const Projection& p, const char* what, const Tolerances& tol) {
  require_2x2(p.matrix(), what);
  const Matrix& m = p.matrix();
  const double idem = op_norm(m * m - m);
  if (idem > tol.proj || std::abs(m.trace().real() - 1.0) > tol.proj) {
    std::ostringstream os;
    os << what << " is not a rank-one projection";
    throw Error(ErrorKind::DegenerateSpec, os.str());
  }
}

void require_index(double lambda, const Tolerances& tol) {
  if (!(lambda > tol.geo && lambda < 1.0 - tol.geo)) {
    std::ostringstream os;
    os << "index " << lambda << " is not in (0, 1)";
    throw Error(ErrorKind::DegenerateSpec, os.str());
  }
}

BlochPoint lerp(const BlochPoint& p, const BlochPoint& q, double t) { return (1.0 - t) * p + t * q; }

}  // namespace

double distance(const BlochPoint& p, const BlochPoint& q) { return (p - q).vec().norm(); }

BlochPoint antipode(const BlochPoint& p) { return 2.0 * kBallCenter - p; }

BlochPoint bloch_map(const Matrix& x, const Tolerances& tol) {
  require_2x2(x, "bloch_map input");
  if (!is_hermitian(x, tol.herm)) throw Error(ErrorKind::NotHermitian, "bloch_map input");
  const double tr = x.trace().real();
  if (std::abs(tr - 1.0) > tol.geo) {
    std::ostringstream os;
    os << "trace " << tr;
    throw Error(ErrorKind::TraceNotOne, os.str());
  }
  const double det = det2(x);
  if (det < -tol.geo || det > 0.25 + tol.geo) {
    std::ostringstream os;
    os << "det " << det << " outside [0, 1/4]";
    throw Error(ErrorKind::DetOutOfRange, os.str());
  }
  return {x(0, 0).real(), x(0, 1).real(), x(0, 1).imag()};
}

Effect bloch_inverse(const BlochPoint& pt, const Tolerances& tol) {
  const Eigen::Vector3d off = (pt - kBallCenter).vec();
  if (off.squaredNorm() > 0.25 + tol.geo) {
    std::ostringstream os;
    os << "(" << pt.x << ", " << pt.y << ", " << pt.z << ") lies outside the ball";
    throw Error(ErrorKind::OutsideBall, os.str());
  }
  Matrix x(2, 2);
  x << pt.x, Complex(pt.y, pt.z), Complex(pt.y, -pt.z), 1.0 - pt.x;
  return Effect::unchecked(x);
}

bool in_S(const Matrix& x, const Tolerances& tol) {
  if (x.rows() != 2 || x.cols() != 2 || !is_hermitian(x, tol.herm)) return false;
  if (std::abs(x.trace().real() - 1.0) > tol.geo) return false;
  const double det = det2(x);
  return det > tol.geo && det < 0.25 - tol.geo;
}

M2Pair pair_from_projections(const PairSpecM2& spec, const Tolerances& tol) {
  require_rank_one(spec.p, "P", tol);
  require_rank_one(spec.q, "Q", tol);
  require_index(spec.lambda, tol);
  const Matrix& P = spec.p.matrix();
  const Matrix& Q = spec.q.matrix();
  const Matrix Qc = identity(2) - Q;
  if (op_norm(P - Q) <= tol.geo) throw Error(ErrorKind::DegenerateSpec, "P = Q");
  if (op_norm(P - Qc) <= tol.geo) throw Error(ErrorKind::DegenerateSpec, "P = I - Q");

  const double l = spec.lambda;
  M2Pair out{Effect::unchecked((1.0 - l) * P + l * Q), Effect::unchecked((1.0 - l) * P + l * Qc)};
  if (!is_strict(out.a.matrix(), tol).strict || !is_strict(out.b.matrix(), tol).strict)
    throw Error(ErrorKind::PostconditionFailure, "constructed pair is not strict");
  const CompatReport report = is_abs_compatible(out.a, out.b, tol);
  if (!report.compatible) {
    std::ostringstream os;
    os << "constructed pair has compatibility residual " << report.residual;
    throw Error(ErrorKind::PostconditionFailure, os.str());
  }
  return out;
}

PairSpecM2 decompose_pair_m2(const Effect& a, const Effect& b, const Tolerances& tol) {
  require_2x2(a.matrix(), "A");
  require_2x2(b.matrix(), "B");
  if (!is_strict(a.matrix(), tol).strict) throw Error(ErrorKind::NotStrict, "A is not strict");
  if (!is_strict(b.matrix(), tol).strict) throw Error(ErrorKind::NotStrict, "B is not strict");
  const CompatReport report = is_abs_compatible(a, b, tol);
  if (!report.compatible) {
    std::ostringstream os;
    os << "residual " << report.residual << " exceeds " << tol.compat;
    throw Error(ErrorKind::NotAbsolutelyCompatible, os.str());
  }

  const SpectralDecomposition mod = eig_hermitian(abs_op(a.matrix() - b.matrix(), tol));
  const double split = mod.eigenvalues(1) - mod.eigenvalues(0);
  if (split > tol.cluster * std::max(1.0, mod.eigenvalues(1))) {
    std::ostringstream os;
    os << "|A - B| eigenvalues differ by " << split;
    throw Error(ErrorKind::SpectralAmbiguity, os.str());
  }
  const double lambda = 0.5 * (mod.eigenvalues(0) + mod.eigenvalues(1));

  // A + B = 2(1 - l) P + l I: P is the eigenvalue-(2 - l) eigenspace.
  const SpectralDecomposition sum = eig_hermitian(HermitianOperator::unchecked(a.matrix() + b.matrix()));
  const Eigen::VectorXcd top = sum.eigenvectors.col(1);
  const Matrix P = top * top.adjoint();
  const Matrix Q = (a.matrix() - (1.0 - lambda) * P) / lambda;
  return PairSpecM2{Projection::unchecked(P), Projection::unchecked(Q), lambda};
}

PivotalSphere pivotal_sphere(const Projection& pivot, double lambda, const Tolerances& tol) {
  require_rank_one(pivot, "pivot", tol);
  require_index(lambda, tol);
  const BlochPoint p = bloch_map(pivot.matrix(), tol);
  const BlochPoint pp = antipode(p);
  return PivotalSphere{p, lambda, p + (lambda / 2.0) * (pp - p), (lambda / 2.0) * distance(p, pp)};
}

double GeometryResiduals::max() const {
  return std::max({tangency, coplanarity, parallelism, right_angle, antipodality});
}

GeometryReport geometry_report(const PairSpecM2& spec, const Tolerances& tol) {
  const M2Pair pair = pair_from_projections(spec, tol);
  GeometryReport r;
  r.p = bloch_map(spec.p.matrix(), tol);
  r.p_prime = antipode(r.p);
  r.q = bloch_map(spec.q.matrix(), tol);
  r.q_prime = antipode(r.q);
  r.a = bloch_map(pair.a.matrix(), tol);
  r.b = bloch_map(pair.b.matrix(), tol);
  r.sphere = pivotal_sphere(spec.p, spec.lambda, tol);

  GeometryResiduals& g = r.residuals;
  g.tangency = std::abs(distance(kBallCenter, r.sphere.center) - (0.5 - spec.lambda / 2.0));

  Eigen::Matrix<double, 3, 5> diffs;
  diffs << (r.p_prime - r.p).vec(), (r.q - r.p).vec(), (r.q_prime - r.p).vec(), (r.a - r.p).vec(),
      (r.b - r.p).vec();
  const Eigen::JacobiSVD<Eigen::Matrix<double, 3, 5>> svd(diffs);
  const Eigen::Vector3d sv = svd.singularValues();
  g.coplanarity = sv(0) > 0.0 ? sv(2) / sv(0) : 0.0;

  const Eigen::Vector3d ab = (r.a - r.b).vec();
  const Eigen::Vector3d qq = (r.q - r.q_prime).vec();
  g.parallelism = ab.cross(qq).norm() / (ab.norm() * qq.norm());
  g.right_angle = std::abs((r.a - r.p).vec().dot((r.b - r.p).vec()));
  g.antipodality = distance(0.5 * (r.a + r.b), r.sphere.center);
  return r;
}

BoundaryPair point_bijection(const PivotalSphere& sphere, const BlochPoint& c, const Tolerances& tol) {
  if (std::abs(distance(c, sphere.center) - sphere.radius) > tol.geo)
    throw Error(ErrorKind::NotOnSphere, "point is not on the pivotal sphere");
  const double l = sphere.index;
  BoundaryPair out;
  out.c = c;
  out.r = sphere.pivot + (1.0 / l) * (c - sphere.pivot);
  out.r_prime = antipode(out.r);
  out.d = lerp(sphere.pivot, out.r_prime, l);
  return out;
}

BoundaryPair points_from_boundary(const PivotalSphere& sphere, const BlochPoint& r, const Tolerances& tol) {
  if (std::abs(ball_excess(r)) > tol.geo) throw Error(ErrorKind::NotOnSphere, "point is not on the ball boundary");
  BoundaryPair out;
  out.r = r;
  out.r_prime = antipode(r);
  out.c = lerp(sphere.pivot, r, sphere.index);
  out.d = lerp(sphere.pivot, out.r_prime, sphere.index);
  return out;
}

PivotDecomposition decompose_through_pivot(const BlochPoint& a, const BlochPoint& pivot, const Tolerances& tol) {
  if (ball_excess(a) >= 0.0) throw Error(ErrorKind::OutsideBall, "A must lie in the open ball");
  if (std::abs(ball_excess(pivot)) > tol.geo) throw Error(ErrorKind::NotOnSphere, "pivot is not on the boundary");
  const Eigen::Vector3d d = (a - pivot).vec();
  const double len = d.norm();
  if (len <= tol.geo) throw Error(ErrorKind::DegenerateSpec, "A coincides with the pivot");
  const Eigen::Vector3d dir = d / len;
  // |P + t dir - c| = 1/2 with |P - c| = 1/2 gives t = -2 (P - c) . dir.
  const double t = -2.0 * (pivot - kBallCenter).vec().dot(dir);
  PivotDecomposition out;
  out.q = BlochPoint::of(pivot.vec() + t * dir);
  out.lambda = len / t;
  return out;
}

SpheroidStats spheroid_residual(const Effect& a, const std::vector<Effect>& partners, const Tolerances& tol) {
  if (partners.empty()) throw Error(ErrorKind::EmptyInput, "no partners");
  const BlochPoint pa = bloch_map(a.matrix(), tol);
  const BlochPoint pa_prime = antipode(pa);
  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  for (std::size_t i = 0; i < partners.size(); ++i) {
    const CompatReport report = is_abs_compatible(a, partners[i], tol);
    if (!report.compatible) {
      std::ostringstream os;
      os << "partner " << i << " has residual " << report.residual;
      throw Error(ErrorKind::NotAbsolutelyCompatible, os.str());
    }
    const BlochPoint x = bloch_map(partners[i].matrix(), tol);
    const double focal = distance(x, pa) + distance(x, pa_prime);
    lo = std::min(lo, focal);
    hi = std::max(hi, focal);
    sum += focal;
  }
  SpheroidStats stats;
  stats.count = partners.size();
  stats.mean = sum / static_cast<double>(partners.size());
  stats.spread = hi - lo;
  return stats;
}

std::vector<BlochPoint> sample_sphere(const PivotalSphere& sphere, std::size_t count) {
  std::vector<BlochPoint> out;
  out.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double h = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    const double rho = std::sqrt(std::max(0.0, 1.0 - h * h));
    const double phi = golden * static_cast<double>(i);
    out.push_back(sphere.center + sphere.radius * BlochPoint{rho * std::cos(phi), rho * std::sin(phi), h});
  }
  return out;
}

}  // namespace abscompat
