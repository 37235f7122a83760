#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "rotavote/angles.hpp"
#include "rotavote/geom.hpp"

namespace rotavote {

struct SynthConfig {
  int n = 1000;                   // total correspondences
  double rho = 0.0;               // outlier ratio, N_outlier / N
  double sigma = 0.0;             // per-component Gaussian noise
  int models = 1;                 // ground-truth rotation count
  std::vector<double> weights;    // inlier fraction per model; empty = even split
  std::uint64_t seed = 0;
};

struct SceneTruth {
  std::vector<Mat3> rotations;
  std::vector<int> labels;  // model index, or -1 for outlier
};

// Uniformly distributed rotation: axis from a normalized Gaussian triple,
// angle uniform over (-pi, pi].
Mat3 random_rotation(std::mt19937_64& rng);

// Unit-sphere sources, targets y = R_k x + noise (renormalized), outlier
// targets replaced by fresh uniform unit vectors. Label counts follow the
// configured proportions exactly (largest-remainder rounding).
std::pair<std::vector<Correspondence>, SceneTruth> generate_scene(const SynthConfig& cfg);

}  // namespace rotavote
