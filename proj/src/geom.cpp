#include "rotavote/geom.hpp"

#include <algorithm>
#include <cmath>

#include "rotavote/errors.hpp"

namespace rotavote {

Mat3 rodrigues(const Vec3& axis, double angle) {
  Mat3 k;
  k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

double rotation_error(const Mat3& r_gt, const Mat3& r_opt) {
  const double c = 0.5 * ((r_gt.transpose() * r_opt).trace() - 1.0);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

PlanePoint project(const Vec3& p) {
  if (p.z() >= 1.0 - 1e-9) {
    throw PoleProximity("point too close to the projection pole (0,0,1)");
  }
  const double inv = 1.0 / (1.0 - p.z());
  return {p.x() * inv, p.y() * inv};
}

Vec3 unproject(const PlanePoint& q) {
  const double s = 1.0 + q.A * q.A + q.B * q.B;
  return {2.0 * q.A / s, 2.0 * q.B / s, (q.A * q.A + q.B * q.B - 1.0) / s};
}

Vec3 canonicalize(const Vec3& p) { return p.z() > 0.0 ? Vec3(-p) : p; }

std::pair<Vec3, Vec3> orthonormal_basis(const Vec3& z) {
  int least = 0;
  z.cwiseAbs().minCoeff(&least);
  const Vec3 seed = Vec3::Unit(least);
  const Vec3 a1 = (seed - seed.dot(z) * z).normalized();
  const Vec3 a2 = z.cross(a1);
  return {a1, a2};
}

}  // namespace rotavote
