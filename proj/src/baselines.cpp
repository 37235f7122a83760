#include "rotavote/baselines.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "rotavote/errors.hpp"

namespace rotavote {

namespace {
constexpr double kTauZ = 1e-9;
constexpr double kTauDeg = 1e-6;

int consensus_count(const Vec3& axis, std::span<const Vec3> constraints, double epsilon) {
  int count = 0;
  const double ax = axis.x(), ay = axis.y(), az = axis.z();
  for (const Vec3& z : constraints) {
    const double d = ax * z.x() + ay * z.y() + az * z.z();
    if (std::abs(d) < epsilon) ++count;
  }
  return count;
}
}  // namespace

Vec3 least_squares_axis(std::span<const Vec3> constraints) {
  return refine_axis(constraints);
}

RotationEstimate ransac_rotation(std::span<const Correspondence> correspondences,
                                 int iterations, double epsilon, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  if (correspondences.size() < 2) throw NoConsensus("need at least two correspondences");
  const PreprocessResult pre = preprocess(correspondences, kTauZ, true);
  const auto& z = pre.constraints;
  if (z.size() < 2) throw NoConsensus("fewer than two usable constraints");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, z.size() - 1);

  int best_score = 0;
  Vec3 best_axis = Vec3(0, 0, -1);
  double best_angle = 0.0;

  const long attempt_cap = 50L * iterations + 100;
  long attempts = 0;
  for (int it = 0; it < iterations && attempts < attempt_cap; ++it) {
    ++attempts;
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    if (i == j) {
      --it;  // degenerate sample, resample without spending an iteration
      continue;
    }
    Vec3 axis = z[i].cross(z[j]);
    const double n = axis.norm();
    if (n <= 1e-9) {
      --it;
      continue;
    }
    axis = canonicalize(axis / n);
    double angle;
    try {
      const Correspondence& c = correspondences[static_cast<std::size_t>(pre.kept[i])];
      angle = correspondence_angle(axis, c.x, c.y, kTauDeg);
    } catch (const DegenerateProjection&) {
      --it;
      continue;
    }
    const int score = consensus_count(axis, z, epsilon);
    if (score > best_score) {
      best_score = score;
      best_axis = axis;
      best_angle = angle;
    }
  }
  if (best_score < 2) throw NoConsensus("best hypothesis explains fewer than two constraints");

  // Local refit: the winning 2-point axis can be tilted by an in-band outlier
  // (and its sample angle is then meaningless), so re-fit both from the
  // consensus set before reporting.
  std::vector<int> inl = classify_inliers(best_axis, z, epsilon);
  if (inl.size() >= 2) {
    try {
      std::vector<Vec3> support;
      support.reserve(inl.size());
      for (int i : inl) support.push_back(z[static_cast<std::size_t>(i)]);
      best_axis = refine_axis(support);
      inl = classify_inliers(best_axis, z, epsilon);
    } catch (const RankDeficient&) {
      // Keep the hypothesis axis.
    }
  }
  RotationEstimate est;
  for (int i : inl) est.inliers.push_back(pre.kept[static_cast<std::size_t>(i)]);
  try {
    const AngleHistogram hist =
        vote_angles(best_axis, correspondences, est.inliers, 1024, kTauDeg);
    best_angle = peak_angle(hist, true);
  } catch (const NoVotes&) {
    // Keep the sample angle.
  }
  est.axis = best_axis;
  est.angle = best_angle;
  est.rotation = rodrigues(best_axis, best_angle);
  est.axis_votes = static_cast<std::uint32_t>(best_score);
  est.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return est;
}

std::vector<RotationEstimate> sequential_ransac_multi(
    std::span<const Correspondence> correspondences, int max_models, int iterations,
    double epsilon, std::uint64_t seed) {
  if (max_models < 1) throw InvalidConfig("max_models must be >= 1");
  std::vector<int> active(correspondences.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = static_cast<int>(i);

  std::vector<RotationEstimate> out;
  for (int k = 0; k < max_models && active.size() >= 2; ++k) {
    std::vector<Correspondence> subset;
    subset.reserve(active.size());
    for (int i : active) subset.push_back(correspondences[static_cast<std::size_t>(i)]);
    RotationEstimate est;
    try {
      est = ransac_rotation(subset, iterations, epsilon, seed + static_cast<std::uint64_t>(k));
    } catch (const Error&) {
      break;  // consensus floor reached, stop extraction
    }
    // Map subset indices back and remove this model's inliers.
    std::vector<int> original;
    original.reserve(est.inliers.size());
    std::vector<char> taken(active.size(), 0);
    for (int i : est.inliers) {
      original.push_back(active[static_cast<std::size_t>(i)]);
      taken[static_cast<std::size_t>(i)] = 1;
    }
    est.inliers = std::move(original);
    out.push_back(est);

    std::vector<int> remaining;
    remaining.reserve(active.size());
    for (std::size_t i = 0; i < active.size(); ++i)
      if (!taken[i]) remaining.push_back(active[i]);
    active = std::move(remaining);
  }
  return out;
}

Vec3 oracle_direction(int k, int directions) {
  // Fibonacci spiral over the southern hemisphere.
  constexpr double golden_angle = 2.399963229728653;  // 2*pi*(2 - phi)
  const double c = -(k + 0.5) / directions;
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double phi = golden_angle * k;
  return {s * std::cos(phi), s * std::sin(phi), c};
}

std::pair<Vec3, int> grid_oracle_axis(std::span<const Vec3> constraints,
                                      const OracleConfig& cfg) {
  if (constraints.empty()) throw EmptyInput("no constraints");
  if (cfg.directions < 100) throw InvalidConfig("oracle needs at least 100 directions");
  int best_count = -1;
  Vec3 best_dir = Vec3(0, 0, -1);
  for (int k = 0; k < cfg.directions; ++k) {
    const Vec3 d = oracle_direction(k, cfg.directions);
    const int count = consensus_count(d, constraints, cfg.epsilon);
    if (count > best_count) {
      best_count = count;
      best_dir = d;
    }
  }
  return {best_dir, best_count};
}

}  // namespace rotavote
