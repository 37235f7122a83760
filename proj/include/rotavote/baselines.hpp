#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rotavote/estimator.hpp"
#include "rotavote/geom.hpp"

namespace rotavote {

struct OracleConfig {
  int directions = 10000;  // near-uniform hemisphere samples (>= 100)
  double epsilon = 0.015;
};

// Least-squares axis over ALL constraints, no outlier rejection. Same contract
// as refine_axis; deviates badly once outliers enter.
Vec3 least_squares_axis(std::span<const Vec3> constraints);

// Two-point hypothesize-and-verify baseline: axis from z1 x z2, angle from one
// sample pair, consensus scored on |axis . z| < epsilon. Deterministic per seed.
RotationEstimate ransac_rotation(std::span<const Correspondence> correspondences,
                                 int iterations, double epsilon, std::uint64_t seed);

// Classical sequential multi-model extraction: fit, remove inliers, repeat.
std::vector<RotationEstimate> sequential_ransac_multi(
    std::span<const Correspondence> correspondences, int max_models, int iterations,
    double epsilon, std::uint64_t seed);

// Exhaustive consensus maximization over a deterministic Fibonacci layout of
// southern-hemisphere directions. Ties resolved to the lowest direction index.
std::pair<Vec3, int> grid_oracle_axis(std::span<const Vec3> constraints,
                                      const OracleConfig& cfg);

// Direction k of the oracle layout (exposed for resolution analysis in tests).
Vec3 oracle_direction(int k, int directions);

}  // namespace rotavote
