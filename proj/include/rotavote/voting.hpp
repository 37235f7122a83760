#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rotavote/geom.hpp"

namespace rotavote {

// Planar vote grid over [-extent, extent]^2, row-major, counts[iy*grid + ix].
class Accumulator2D {
 public:
  Accumulator2D(int grid, double extent);

  int grid() const { return grid_; }
  double extent() const { return extent_; }
  double cell_size() const { return 2.0 * extent_ / grid_; }

  // Coordinate -> cell index; values exactly on a cell boundary go to the
  // lower-index cell. Clamped to [0, grid-1].
  int coord_to_cell(double v) const;
  PlanePoint cell_center(int ix, int iy) const;

  std::uint32_t& at(int ix, int iy) { return counts_[static_cast<std::size_t>(iy) * grid_ + ix]; }
  std::uint32_t at(int ix, int iy) const { return counts_[static_cast<std::size_t>(iy) * grid_ + ix]; }
  std::span<const std::uint32_t> counts() const { return counts_; }
  std::span<std::uint32_t> counts() { return counts_; }

  std::uint64_t total() const;
  void add(const Accumulator2D& other);

 private:
  int grid_;
  double extent_;
  std::vector<std::uint32_t> counts_;
};

struct Peak {
  int ix = 0;
  int iy = 0;
  PlanePoint center;
  std::uint32_t votes = 0;
};

struct PeakSet {
  std::vector<Peak> peaks;  // votes non-increasing
  int suppression_radius = 0;
};

// Shared sample table for the circle parameterisation a1*cos(t_j) + a2*sin(t_j),
// t_j uniform in [-pi, pi).
std::vector<double> circle_sample_table(int samples);  // 2*J doubles, (cos, sin) pairs

// Samples the great circle { v : z.v = 0 }, canonicalizes each sample to the
// southern hemisphere, projects it and increments the containing cell.
// Exactly `samples` increments.
void deposit_circle_votes(const Vec3& z, Accumulator2D& acc, int samples);

// Sequential-equivalent accumulation over all constraints; result is
// independent of processing order and of `threads`.
Accumulator2D accumulate(std::span<const Vec3> constraints, int grid, double extent,
                         int samples, int threads = 1);

// Greedy descending peak extraction with circular non-maximum suppression
// (radius in cells). Peaks whose centers sit on the unit circle also suppress
// their antipodal boundary cell. Throws NoPeak if nothing reaches min_votes.
PeakSet find_peaks(const Accumulator2D& acc, int max_peaks, int suppression_radius,
                   std::uint32_t min_votes);

// Cell center back to a unit axis candidate on the sphere.
Vec3 backproject_peak(const PlanePoint& center);

// Argmax of the box-blurred accumulator (window half-width `radius` cells,
// truncated at the grid edge). Recovers a usable maximum when a diffuse
// consensus band spreads its votes over many cells. `votes` holds the window
// sum (saturated); ties resolve to the lowest row-major index.
Peak blurred_argmax(const Accumulator2D& acc, int radius);

// Dump formats (plot-ready): plain text grid, and binary 8-bit PGM with counts
// rescaled linearly to 0..255.
void dump_accumulator_text(const Accumulator2D& acc, std::ostream& out);
void dump_accumulator_pgm(const Accumulator2D& acc, std::ostream& out);

}  // namespace rotavote
