#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rotavote/geom.hpp"

namespace rotavote {

struct Correspondence {
  Vec3 x;  // source point
  Vec3 y;  // target point
};

// Histogram over (-pi, pi]; sum of bins equals `contributing`.
struct AngleHistogram {
  std::vector<std::uint32_t> bins;
  std::uint64_t contributing = 0;
  std::uint64_t degenerate = 0;        // skipped correspondences
  std::vector<double> raw_angles;      // one entry per vote, insertion order

  int bin_count() const { return static_cast<int>(bins.size()); }
  double bin_width() const;
  int bin_of(double angle) const;
  double bin_center(int k) const;
};

// Signed rotation angle of y relative to x about `axis`:
// atan2((beta x gamma).axis, beta.gamma) with beta = axis x x, gamma = axis x y.
// Throws DegenerateProjection when x or y is parallel to the axis within tau.
double correspondence_angle(const Vec3& axis, const Vec3& x, const Vec3& y,
                            double tau = 1e-6);

// One vote per non-degenerate correspondence in `indices` (indices into
// `correspondences`). Throws NoVotes if every candidate is degenerate.
AngleHistogram vote_angles(const Vec3& axis,
                           std::span<const Correspondence> correspondences,
                           std::span<const int> indices, int bin_count,
                           double tau = 1e-6);

// Peak-bin center, or (with refine) the wrap-aware circular mean of the raw
// angles within one bin of the peak center.
double peak_angle(const AngleHistogram& hist, bool refine,
                  std::span<const double> raw_angles);

inline double peak_angle(const AngleHistogram& hist, bool refine) {
  return peak_angle(hist, refine, hist.raw_angles);
}

}  // namespace rotavote
