#include "rotavote/voting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <thread>

#include "rotavote/errors.hpp"

namespace rotavote {

namespace {

inline int cell_of(double v, double extent, double inv_cell, int grid) {
  const double t = (v + extent) * inv_cell;
  double f = std::floor(t);
  int i = static_cast<int>(f);
  if (f == t && i > 0) --i;  // boundary values belong to the lower cell
  return std::clamp(i, 0, grid - 1);
}

void deposit_one(const Vec3& z, std::uint32_t* counts, int grid, double extent,
                 std::span<const double> table) {
  const auto [a1, a2] = orthonormal_basis(z);
  const double a1x = a1.x(), a1y = a1.y(), a1z = a1.z();
  const double a2x = a2.x(), a2y = a2.y(), a2z = a2.z();
  const double inv_cell = grid / (2.0 * extent);
  const std::size_t n = table.size() / 2;
  const double* t = table.data();
  for (std::size_t j = 0; j < n; ++j) {
    const double co = t[2 * j];
    const double si = t[2 * j + 1];
    const double x = a1x * co + a2x * si;
    const double y = a1y * co + a2y * si;
    const double c = a1z * co + a2z * si;
    const double sgn = c > 0.0 ? -1.0 : 1.0;  // hemisphere canonicalization
    const double inv = sgn / (1.0 - sgn * c);
    const int ix = cell_of(x * inv, extent, inv_cell, grid);
    const int iy = cell_of(y * inv, extent, inv_cell, grid);
    counts[static_cast<std::size_t>(iy) * grid + ix]++;
  }
}

}  // namespace

Accumulator2D::Accumulator2D(int grid, double extent)
    : grid_(grid), extent_(extent),
      counts_(static_cast<std::size_t>(grid) * grid, 0u) {
  if (grid < 1 || extent <= 0.0) throw InvalidConfig("accumulator needs grid >= 1, extent > 0");
}

int Accumulator2D::coord_to_cell(double v) const {
  return cell_of(v, extent_, grid_ / (2.0 * extent_), grid_);
}

PlanePoint Accumulator2D::cell_center(int ix, int iy) const {
  const double cs = cell_size();
  return {-extent_ + (ix + 0.5) * cs, -extent_ + (iy + 0.5) * cs};
}

std::uint64_t Accumulator2D::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

void Accumulator2D::add(const Accumulator2D& other) {
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::vector<double> circle_sample_table(int samples) {
  std::vector<double> table(2 * static_cast<std::size_t>(samples));
  const double step = 2.0 * std::numbers::pi / samples;
  for (int j = 0; j < samples; ++j) {
    const double theta = -std::numbers::pi + j * step;
    table[2 * j] = std::cos(theta);
    table[2 * j + 1] = std::sin(theta);
  }
  return table;
}

void deposit_circle_votes(const Vec3& z, Accumulator2D& acc, int samples) {
  const auto table = circle_sample_table(samples);
  deposit_one(z, acc.counts().data(), acc.grid(), acc.extent(), table);
}

Accumulator2D accumulate(std::span<const Vec3> constraints, int grid, double extent,
                         int samples, int threads) {
  if (constraints.empty()) throw EmptyInput("no constraints to accumulate");
  Accumulator2D acc(grid, extent);
  const auto table = circle_sample_table(samples);

  const std::size_t n = constraints.size();
  const int nthreads = std::clamp<int>(threads, 1, static_cast<int>(n));
  if (nthreads == 1) {
    for (const Vec3& z : constraints)
      deposit_one(z, acc.counts().data(), grid, extent, table);
    return acc;
  }

  // Private accumulators merged in chunk order; integer addition makes the
  // result identical to the sequential pass.
  std::vector<Accumulator2D> partial(nthreads, Accumulator2D(grid, extent));
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  for (int tid = 0; tid < nthreads; ++tid) {
    const std::size_t begin = n * tid / nthreads;
    const std::size_t end = n * (tid + 1) / nthreads;
    workers.emplace_back([&, tid, begin, end] {
      for (std::size_t i = begin; i < end; ++i)
        deposit_one(constraints[i], partial[tid].counts().data(), grid, extent, table);
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& p : partial) acc.add(p);
  return acc;
}

PeakSet find_peaks(const Accumulator2D& acc, int max_peaks, int suppression_radius,
                   std::uint32_t min_votes) {
  const int g = acc.grid();
  std::vector<std::uint8_t> masked(static_cast<std::size_t>(g) * g, 0);
  const auto counts = acc.counts();

  const auto mask_disk = [&](int cx, int cy) {
    const int r = suppression_radius;
    const int r2 = r * r;
    for (int dy = -r; dy <= r; ++dy) {
      const int y = cy + dy;
      if (y < 0 || y >= g) continue;
      for (int dx = -r; dx <= r; ++dx) {
        const int x = cx + dx;
        if (x < 0 || x >= g) continue;
        if (dx * dx + dy * dy <= r2) masked[static_cast<std::size_t>(y) * g + x] = 1;
      }
    }
  };

  PeakSet out;
  out.suppression_radius = suppression_radius;
  for (int k = 0; k < max_peaks; ++k) {
    std::uint32_t best = 0;
    std::size_t best_idx = 0;
    bool found = false;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (!masked[i] && counts[i] > best) {
        best = counts[i];
        best_idx = i;
        found = true;
      }
    }
    if (!found || best < min_votes || best == 0) break;
    const int iy = static_cast<int>(best_idx) / g;
    const int ix = static_cast<int>(best_idx) % g;
    Peak p{ix, iy, acc.cell_center(ix, iy), best};
    out.peaks.push_back(p);
    mask_disk(ix, iy);
    // An equatorial axis appears twice, at antipodal points of the unit
    // circle; both encode the same rotation, so suppress the mirror image.
    const double norm = std::hypot(p.center.A, p.center.B);
    if (std::abs(norm - 1.0) <= 1.5 * acc.cell_size() && norm > 0.0) {
      const double mx = -p.center.A / norm;
      const double my = -p.center.B / norm;
      mask_disk(acc.coord_to_cell(mx), acc.coord_to_cell(my));
    }
  }
  if (out.peaks.empty()) throw NoPeak("no accumulator cell reaches min_votes");
  return out;
}

Vec3 backproject_peak(const PlanePoint& center) {
  return unproject(center).normalized();
}

Peak blurred_argmax(const Accumulator2D& acc, int radius) {
  if (radius < 0) throw InvalidConfig("blur radius must be non-negative");
  const int g = acc.grid();
  const auto counts = acc.counts();
  // Summed-area table with a zero border row/column.
  std::vector<std::uint64_t> sat(static_cast<std::size_t>(g + 1) * (g + 1), 0);
  for (int y = 0; y < g; ++y) {
    std::uint64_t row = 0;
    for (int x = 0; x < g; ++x) {
      row += counts[static_cast<std::size_t>(y) * g + x];
      sat[static_cast<std::size_t>(y + 1) * (g + 1) + (x + 1)] =
          sat[static_cast<std::size_t>(y) * (g + 1) + (x + 1)] + row;
    }
  }
  const auto box = [&](int cx, int cy) {
    const int x0 = std::max(0, cx - radius), x1 = std::min(g, cx + radius + 1);
    const int y0 = std::max(0, cy - radius), y1 = std::min(g, cy + radius + 1);
    return sat[static_cast<std::size_t>(y1) * (g + 1) + x1] -
           sat[static_cast<std::size_t>(y0) * (g + 1) + x1] -
           sat[static_cast<std::size_t>(y1) * (g + 1) + x0] +
           sat[static_cast<std::size_t>(y0) * (g + 1) + x0];
  };
  Peak best;
  std::uint64_t best_sum = 0;
  bool found = false;
  for (int cy = 0; cy < g; ++cy) {
    for (int cx = 0; cx < g; ++cx) {
      const std::uint64_t s = box(cx, cy);
      if (!found || s > best_sum) {
        best_sum = s;
        best.ix = cx;
        best.iy = cy;
        found = true;
      }
    }
  }
  best.center = acc.cell_center(best.ix, best.iy);
  best.votes = static_cast<std::uint32_t>(
      std::min<std::uint64_t>(best_sum, std::numeric_limits<std::uint32_t>::max()));
  return best;
}

void dump_accumulator_text(const Accumulator2D& acc, std::ostream& out) {
  const int g = acc.grid();
  for (int iy = 0; iy < g; ++iy) {
    for (int ix = 0; ix < g; ++ix) {
      if (ix) out << ' ';
      out << acc.at(ix, iy);
    }
    out << '\n';
  }
}

void dump_accumulator_pgm(const Accumulator2D& acc, std::ostream& out) {
  const int g = acc.grid();
  const auto counts = acc.counts();
  const std::uint32_t peak = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  out << "P5\n" << g << ' ' << g << "\n255\n";
  for (std::uint32_t c : counts) {
    const unsigned char v =
        peak == 0 ? 0 : static_cast<unsigned char>((static_cast<std::uint64_t>(c) * 255) / peak);
    out.put(static_cast<char>(v));
  }
}

}  // namespace rotavote
