#include "rotavote/angles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rotavote/errors.hpp"

namespace rotavote {

namespace {
constexpr double kPi = std::numbers::pi;

// Wrapped difference in (-pi, pi].
double circular_diff(double a, double b) {
  double d = std::fmod(a - b, 2.0 * kPi);
  if (d <= -kPi) d += 2.0 * kPi;
  if (d > kPi) d -= 2.0 * kPi;
  return d;
}
}  // namespace

double AngleHistogram::bin_width() const { return 2.0 * kPi / bin_count(); }

int AngleHistogram::bin_of(double angle) const {
  // Domain (-pi, pi]; bin k covers (-pi + k*w, -pi + (k+1)*w].
  const int n = bin_count();
  const int k = static_cast<int>(std::ceil((angle + kPi) / bin_width())) - 1;
  return std::clamp(k, 0, n - 1);
}

double AngleHistogram::bin_center(int k) const {
  return -kPi + (k + 0.5) * bin_width();
}

double correspondence_angle(const Vec3& axis, const Vec3& x, const Vec3& y,
                            double tau) {
  const Vec3 beta = axis.cross(x);
  const Vec3 gamma = axis.cross(y);
  if (beta.norm() <= tau || gamma.norm() <= tau) {
    throw DegenerateProjection("correspondence parallel to the rotation axis");
  }
  return std::atan2(beta.cross(gamma).dot(axis), beta.dot(gamma));
}

AngleHistogram vote_angles(const Vec3& axis,
                           std::span<const Correspondence> correspondences,
                           std::span<const int> indices, int bin_count,
                           double tau) {
  if (bin_count < 8) throw InvalidConfig("angle histogram needs bin_count >= 8");
  AngleHistogram hist;
  hist.bins.assign(bin_count, 0u);
  for (int i : indices) {
    const Correspondence& c = correspondences[static_cast<std::size_t>(i)];
    double angle;
    try {
      angle = correspondence_angle(axis, c.x, c.y, tau);
    } catch (const DegenerateProjection&) {
      ++hist.degenerate;
      continue;
    }
    ++hist.bins[hist.bin_of(angle)];
    ++hist.contributing;
    hist.raw_angles.push_back(angle);
  }
  if (hist.contributing == 0) throw NoVotes("no correspondence produced an angle vote");
  return hist;
}

double peak_angle(const AngleHistogram& hist, bool refine,
                  std::span<const double> raw_angles) {
  if (hist.contributing == 0) throw NoVotes("empty angle histogram");
  const auto it = std::max_element(hist.bins.begin(), hist.bins.end());
  const int k = static_cast<int>(it - hist.bins.begin());
  const double center = hist.bin_center(k);
  if (!refine) return center;

  const double window = 1.5 * hist.bin_width();  // peak bin plus one on each side
  double s = 0.0, c = 0.0;
  for (double a : raw_angles) {
    if (std::abs(circular_diff(a, center)) <= window) {
      s += std::sin(a);
      c += std::cos(a);
    }
  }
  if (s == 0.0 && c == 0.0) return center;
  double mean = std::atan2(s, c);
  if (mean <= -kPi) mean += 2.0 * kPi;
  return mean;
}

}  // namespace rotavote
