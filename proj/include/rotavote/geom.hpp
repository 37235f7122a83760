#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <utility>

namespace rotavote {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Stereographic image of a sphere point, projected from the north pole
// (0,0,1) onto the plane c = 0.
struct PlanePoint {
  double A = 0.0;
  double B = 0.0;
};

struct AxisAngle {
  Vec3 axis;     // unit
  double angle;  // radians in (-pi, pi]
};

// R = I + sin(t)[r]x + (1-cos(t))[r]x^2
Mat3 rodrigues(const Vec3& axis, double angle);
inline Mat3 rodrigues(const AxisAngle& aa) { return rodrigues(aa.axis, aa.angle); }

// Geodesic distance on SO(3): arccos(0.5*(tr(R_gt^T R_opt) - 1)), in [0, pi].
double rotation_error(const Mat3& r_gt, const Mat3& r_opt);

// (A, B) = (a/(1-c), b/(1-c)). Throws PoleProximity for c >= 1 - 1e-9.
PlanePoint project(const Vec3& p);

// Inverse of project; maps the whole plane back onto the sphere minus the pole.
Vec3 unproject(const PlanePoint& q);

// Flip to the southern hemisphere: p if c <= 0, else -p. Idempotent; the
// resulting stereographic image lies in the closed unit disk.
Vec3 canonicalize(const Vec3& p);

// Unit pair (a1, a2) spanning the plane { v : z.v = 0 }, with a2 = z x a1.
// Seeds Gram-Schmidt with the standard basis vector least aligned with z.
std::pair<Vec3, Vec3> orthonormal_basis(const Vec3& z);

}  // namespace rotavote
