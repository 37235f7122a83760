#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rotavote/angles.hpp"
#include "rotavote/geom.hpp"
#include "rotavote/voting.hpp"

namespace rotavote {

struct EstimatorConfig {
  int grid = 512;                 // accumulator resolution G
  double extent = 1.05;           // accumulator half-width E (> 1)
  int theta_samples = 2048;       // circle samples J (keep >= pi * grid)
  double epsilon = 0.015;         // inlier threshold on |axis . z|
  int angle_bins = 1024;
  int max_models = 1;
  double min_votes_frac = 0.02;   // fraction of constraints required at a peak
  double consensus_floor_mult = 1.5;  // model floor as a multiple of the eps*N chance level
  double dedupe_overlap = 0.5;    // inlier-overlap fraction that collapses two peaks
  double tau_z = 1e-9;            // minimum |y - x| for a usable constraint
  double tau_deg = 1e-6;          // angle-vote degeneracy threshold
  int suppression_radius = 8;     // cells
  bool refine = true;
  bool normalize_inputs = true;   // renormalize x, y to unit length first
  int threads = 1;
};

struct RotationEstimate {
  Vec3 axis = Vec3(0, 0, -1);
  double angle = 0.0;
  Mat3 rotation = Mat3::Identity();
  std::vector<int> inliers;        // indices into the input correspondences
  std::uint32_t axis_votes = 0;
  double elapsed_s = 0.0;
};

struct PreprocessResult {
  std::vector<Vec3> constraints;  // z_i = (y_i - x_i) / |y_i - x_i|
  std::vector<int> kept;          // constraint i came from correspondence kept[i]
  std::vector<int> dropped;       // pairs with |y - x| < tau_z
};

// Throws AllDegenerate when every pair is dropped.
PreprocessResult preprocess(std::span<const Correspondence> correspondences,
                            double tau_z, bool normalize = true);

// Strict-inequality consensus set { i : |axis . z_i| < epsilon }.
std::vector<int> classify_inliers(const Vec3& axis, std::span<const Vec3> constraints,
                                  double epsilon);

// Unit minimizer of sum (z_i . r)^2: smallest-eigenvalue eigenvector of the
// scatter matrix, canonicalized south. Throws RankDeficient when the
// constraints span fewer than two directions.
Vec3 refine_axis(std::span<const Vec3> constraints);

// Minimum votes a peak must collect before it counts as a model, given the
// expected deposit a single crossing circle leaves in one cell.
std::uint32_t peak_vote_floor(const EstimatorConfig& cfg, std::size_t n_constraints);

RotationEstimate estimate_single(std::span<const Correspondence> correspondences,
                                 const EstimatorConfig& cfg);

// Up to cfg.max_models estimates by sequential extraction (vote, validate the
// dominant model, strip its band, re-vote on the residual), ordered by
// axis_votes descending.
std::vector<RotationEstimate> estimate_multi(std::span<const Correspondence> correspondences,
                                             const EstimatorConfig& cfg);

}  // namespace rotavote
