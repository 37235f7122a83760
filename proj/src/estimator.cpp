#include "rotavote/estimator.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <iterator>
#include <cmath>
#include <numbers>
#include <optional>

#include "rotavote/errors.hpp"

namespace rotavote {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Vec3> gather(std::span<const Vec3> constraints, std::span<const int> idx) {
  std::vector<Vec3> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(constraints[static_cast<std::size_t>(i)]);
  return out;
}

// Sub-cell peak position: vote-weighted centroid of the 3x3 neighborhood.
PlanePoint interpolate_peak(const Accumulator2D& acc, const Peak& peak) {
  double wsum = 0.0, asum = 0.0, bsum = 0.0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int ix = peak.ix + dx, iy = peak.iy + dy;
      if (ix < 0 || ix >= acc.grid() || iy < 0 || iy >= acc.grid()) continue;
      const double w = acc.at(ix, iy);
      const PlanePoint c = acc.cell_center(ix, iy);
      wsum += w;
      asum += w * c.A;
      bsum += w * c.B;
    }
  }
  if (wsum <= 0.0) return peak.center;
  return {asum / wsum, bsum / wsum};
}

// Fixed-point iteration: the consensus set at the starting axis is a biased
// slice of a noisy band, so refit and reclassify until the set stabilizes.
std::pair<Vec3, std::vector<int>> refine_loop(Vec3 axis, std::span<const Vec3> constraints,
                                              const EstimatorConfig& cfg) {
  std::vector<int> inl = classify_inliers(axis, constraints, cfg.epsilon);
  if (!cfg.refine) return {axis, std::move(inl)};
  for (int pass = 0; pass < 10 && inl.size() >= 2; ++pass) {
    Vec3 next;
    try {
      next = refine_axis(gather(constraints, inl));
    } catch (const RankDeficient&) {
      break;  // keep the current axis
    }
    std::vector<int> next_inl = classify_inliers(next, constraints, cfg.epsilon);
    axis = next;
    const bool stable = next_inl == inl;
    inl = std::move(next_inl);
    if (stable) break;
  }
  return {axis, std::move(inl)};
}

// Vote the angle among the inliers (constraint indices) and reconstruct the
// rotation. Throws NoVotes when every inlier is angle-degenerate.
RotationEstimate build_estimate(const Vec3& axis, std::span<const int> inl,
                                std::uint32_t votes,
                                std::span<const Correspondence> correspondences,
                                const PreprocessResult& pre, const EstimatorConfig& cfg) {
  std::vector<int> corr_idx;
  corr_idx.reserve(inl.size());
  for (int i : inl) corr_idx.push_back(pre.kept[static_cast<std::size_t>(i)]);

  const AngleHistogram hist =
      vote_angles(axis, correspondences, corr_idx, cfg.angle_bins, cfg.tau_deg);
  const double angle = peak_angle(hist, cfg.refine);

  RotationEstimate est;
  est.axis = axis;
  est.angle = angle;
  est.rotation = rodrigues(axis, angle);
  est.inliers = std::move(corr_idx);
  est.axis_votes = votes;
  return est;
}

RotationEstimate estimate_from_peak(const Peak& peak, const Accumulator2D& acc,
                                    std::span<const Correspondence> correspondences,
                                    const PreprocessResult& pre,
                                    const EstimatorConfig& cfg) {
  const Vec3 start = canonicalize(backproject_peak(interpolate_peak(acc, peak)));
  auto [axis, inl] = refine_loop(start, pre.constraints, cfg);
  return build_estimate(axis, inl, peak.votes, correspondences, pre, cfg);
}

// Angle-agreement window for coherence checks: generous against the histogram
// bin width and the typical inlier angle noise.
constexpr double kAngleWindow = 0.1;  // rad

// Coherence of a candidate model: how many of its consensus inliers agree with
// its estimated angle. Random axes catch an epsilon fraction of outliers whose
// angles scatter uniformly, so chance coherence is tiny; genuine models agree.
// `band` collects |axis.z| of agreeing constraints within 4*epsilon, which
// measures how far the model's consensus band spreads past epsilon.
struct Support {
  std::size_t coherent = 0;
  std::vector<double> band;
};

Support model_support(const RotationEstimate& est,
                      std::span<const Correspondence> correspondences,
                      const PreprocessResult& pre, const EstimatorConfig& cfg) {
  Support s;
  for (std::size_t k = 0; k < pre.constraints.size(); ++k) {
    const double d = std::abs(est.axis.dot(pre.constraints[k]));
    if (d >= 4.0 * cfg.epsilon) continue;
    const auto& c = correspondences[static_cast<std::size_t>(pre.kept[k])];
    double ang;
    try {
      ang = correspondence_angle(est.axis, c.x, c.y, cfg.tau_deg);
    } catch (const DegenerateProjection&) {
      continue;
    }
    if (std::abs(std::remainder(ang - est.angle, 2.0 * std::numbers::pi)) >= kAngleWindow)
      continue;
    s.band.push_back(d);
    if (d < cfg.epsilon) ++s.coherent;
  }
  return s;
}

// A rotation by a small angle amplifies the constraint noise (the band spread
// grows like sigma / sin(theta/2)), diffusing the model's votes over many
// cells until ridge artifacts outgrow the true maximum. Recover by blurring
// the accumulator at several scales and annealing the classification band
// from the blur scale down to epsilon so the least-squares refit can track
// the band center.
Vec3 anneal_axis(Vec3 axis, double eps0, std::span<const Vec3> constraints,
                 const EstimatorConfig& cfg) {
  double e = std::max(eps0, cfg.epsilon);
  while (true) {
    const std::vector<int> inl = classify_inliers(axis, constraints, e);
    if (inl.size() >= 2) {
      try {
        axis = refine_axis(gather(constraints, inl));
      } catch (const RankDeficient&) {
      }
    }
    if (e <= cfg.epsilon) break;
    e = std::max(cfg.epsilon, 0.5 * e);
  }
  return axis;
}

std::vector<Vec3> rescue_axes(const Accumulator2D& acc, std::span<const Vec3> constraints,
                              const EstimatorConfig& cfg) {
  std::vector<Vec3> out;
  for (int w : {4, 8, 16, 32, 64}) {
    if (2 * w + 1 > acc.grid()) break;
    const Peak p = blurred_argmax(acc, w);
    const Vec3 start = canonicalize(backproject_peak(p.center));
    out.push_back(anneal_axis(start, w * acc.cell_size(), constraints, cfg));
  }
  // Scatter least squares over all constraints: isotropic clutter leaves the
  // smallest eigenvector unbiased, so even a faint band tips it toward the
  // model axis when the vote map itself is too diffuse to show a peak.
  try {
    out.push_back(anneal_axis(refine_axis(constraints), 0.25, constraints, cfg));
  } catch (const RankDeficient&) {
  }
  return out;
}

// Candidate model grown from a starting axis: fixed-point refinement and
// consensus against `pre`, votes read from the cell its projection falls into.
RotationEstimate build_candidate(const Vec3& start, const Accumulator2D& acc,
                                 std::span<const Correspondence> correspondences,
                                 const PreprocessResult& pre, const EstimatorConfig& cfg) {
  auto [axis, inl] = refine_loop(start, pre.constraints, cfg);
  std::uint32_t votes = 0;
  try {
    const PlanePoint pp = project(axis);
    votes = acc.at(acc.coord_to_cell(pp.A), acc.coord_to_cell(pp.B));
  } catch (const PoleProximity&) {
  }
  return build_estimate(axis, inl, votes, correspondences, pre, cfg);
}

// Least-squares rotation aligning the pairs (Kabsch): maximize sum y.Rx via
// the SVD of the cross-covariance, with the determinant sign fixed.
Mat3 fit_rotation(std::span<const Correspondence> correspondences,
                  std::span<const int> idx, bool normalize) {
  Mat3 h = Mat3::Zero();
  for (int i : idx) {
    Vec3 x = correspondences[static_cast<std::size_t>(i)].x;
    Vec3 y = correspondences[static_cast<std::size_t>(i)].y;
    if (normalize) {
      const double nx = x.norm(), ny = y.norm();
      if (nx > 0.0) x /= nx;
      if (ny > 0.0) y /= ny;
    }
    h += y * x.transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

// A rotation by an angle comparable to the noise level moves points less than
// the noise does; its constraint directions are then pure noise and voting is
// blind to it. Such a model surfaces instead as a large cluster of
// barely-moving pairs, which a direct least-squares fit recovers. Returns the
// model or nothing if the cluster is below `min_cluster`.
constexpr double kSmallMotion = 0.1;  // chord threshold; chance rate ~0.25%

std::optional<RotationEstimate> near_identity_model(
    std::span<const Correspondence> correspondences, const PreprocessResult& sub,
    const EstimatorConfig& cfg, std::size_t min_cluster) {
  std::vector<int> cluster;
  for (int i : sub.kept) {
    Vec3 x = correspondences[static_cast<std::size_t>(i)].x;
    Vec3 y = correspondences[static_cast<std::size_t>(i)].y;
    if (cfg.normalize_inputs) {
      const double nx = x.norm(), ny = y.norm();
      if (nx > 0.0) x /= nx;
      if (ny > 0.0) y /= ny;
    }
    if ((y - x).norm() < kSmallMotion) cluster.push_back(i);
  }
  if (cluster.size() < std::max<std::size_t>(min_cluster, 3)) return std::nullopt;
  const Mat3 r = fit_rotation(correspondences, cluster, cfg.normalize_inputs);

  RotationEstimate est;
  const Eigen::AngleAxisd aa(r);
  est.axis = canonicalize(aa.axis());
  est.angle = est.axis.dot(aa.axis()) < 0.0 ? -aa.angle() : aa.angle();
  est.rotation = r;
  est.inliers = std::move(cluster);
  est.axis_votes = static_cast<std::uint32_t>(est.inliers.size());
  return est;
}

RotationEstimate identity_estimate(std::vector<int> degenerate) {
  RotationEstimate est;
  est.inliers = std::move(degenerate);
  return est;
}

}  // namespace

PreprocessResult preprocess(std::span<const Correspondence> correspondences,
                            double tau_z, bool normalize) {
  PreprocessResult out;
  out.constraints.reserve(correspondences.size());
  out.kept.reserve(correspondences.size());
  for (std::size_t i = 0; i < correspondences.size(); ++i) {
    Vec3 x = correspondences[i].x;
    Vec3 y = correspondences[i].y;
    if (normalize) {
      const double nx = x.norm(), ny = y.norm();
      if (nx > 0.0) x /= nx;
      if (ny > 0.0) y /= ny;
    }
    const Vec3 d = y - x;
    const double len = d.norm();
    if (len < tau_z) {
      out.dropped.push_back(static_cast<int>(i));
      continue;
    }
    out.constraints.push_back(d / len);
    out.kept.push_back(static_cast<int>(i));
  }
  if (!correspondences.empty() && out.constraints.empty()) {
    throw AllDegenerate("every correspondence pair is degenerate (x ~ y)");
  }
  return out;
}

std::vector<int> classify_inliers(const Vec3& axis, std::span<const Vec3> constraints,
                                  double epsilon) {
  std::vector<int> inliers;
  const double ax = axis.x(), ay = axis.y(), az = axis.z();
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const Vec3& z = constraints[i];
    const double d = ax * z.x() + ay * z.y() + az * z.z();
    if (std::abs(d) < epsilon) inliers.push_back(static_cast<int>(i));
  }
  return inliers;
}

Vec3 refine_axis(std::span<const Vec3> constraints) {
  if (constraints.size() < 2) throw RankDeficient("need at least two constraints");
  Mat3 scatter = Mat3::Zero();
  for (const Vec3& z : constraints) scatter += z * z.transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  const Vec3 evals = eig.eigenvalues();  // ascending
  if (evals(1) <= 1e-10 * std::max(evals(2), 1e-300)) {
    throw RankDeficient("constraints span fewer than two directions");
  }
  return canonicalize(Vec3(eig.eigenvectors().col(0)).normalized());
}

std::uint32_t peak_vote_floor(const EstimatorConfig& cfg, std::size_t n_constraints) {
  // Expected deposit of one crossing circle in a single cell: samples spaced
  // 2*pi/J along a curve of roughly unit-circle length.
  const double cell = 2.0 * cfg.extent / cfg.grid;
  const double per_crossing = cfg.theta_samples * cell / (2.0 * std::numbers::pi);
  const double floor_votes = cfg.min_votes_frac * static_cast<double>(n_constraints) * per_crossing;
  return static_cast<std::uint32_t>(std::max(16.0, floor_votes));
}

RotationEstimate estimate_single(std::span<const Correspondence> correspondences,
                                 const EstimatorConfig& cfg) {
  const auto t0 = Clock::now();
  if (correspondences.empty()) throw EmptyInput("no correspondences");

  PreprocessResult pre;
  try {
    pre = preprocess(correspondences, cfg.tau_z, cfg.normalize_inputs);
  } catch (const AllDegenerate&) {
    std::vector<int> all(correspondences.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    auto est = identity_estimate(std::move(all));
    est.elapsed_s = seconds_since(t0);
    return est;
  }
  // Data dominated by x ~ y constrains nothing; report the identity.
  if (pre.dropped.size() * 10 >= correspondences.size() * 9) {
    auto est = identity_estimate(pre.dropped);
    est.elapsed_s = seconds_since(t0);
    return est;
  }

  const Accumulator2D acc =
      accumulate(pre.constraints, cfg.grid, cfg.extent, cfg.theta_samples, cfg.threads);
  const PeakSet peaks = find_peaks(acc, 1, cfg.suppression_radius, 1);
  RotationEstimate est =
      estimate_from_peak(peaks.peaks.front(), acc, correspondences, pre, cfg);

  // A consensus near the chance level (a random axis catches ~epsilon*N
  // constraints) signals a diffused peak buried under grid artifacts; try the
  // blur rescue and keep whichever candidate explains the most
  // correspondences coherently.
  const double chance = cfg.epsilon * static_cast<double>(pre.constraints.size());
  if (cfg.refine && static_cast<double>(est.inliers.size()) < 3.0 * chance) {
    std::size_t best = model_support(est, correspondences, pre, cfg).coherent;
    for (const Vec3& axis : rescue_axes(acc, pre.constraints, cfg)) {
      RotationEstimate cand;
      try {
        cand = build_candidate(axis, acc, correspondences, pre, cfg);
      } catch (const NoVotes&) {
        continue;
      }
      const std::size_t c = model_support(cand, correspondences, pre, cfg).coherent;
      if (c > best) {
        best = c;
        est = std::move(cand);
      }
    }
  }
  est.elapsed_s = seconds_since(t0);
  return est;
}

std::vector<RotationEstimate> estimate_multi(std::span<const Correspondence> correspondences,
                                             const EstimatorConfig& cfg) {
  const auto t0 = Clock::now();
  if (correspondences.empty()) throw EmptyInput("no correspondences");
  const PreprocessResult pre = preprocess(correspondences, cfg.tau_z, cfg.normalize_inputs);

  // Chance level of the consensus count: a random axis catches roughly an
  // epsilon fraction of unstructured constraints.
  const double chance = cfg.epsilon * static_cast<double>(pre.constraints.size());
  const auto consensus_floor =
      static_cast<std::size_t>(std::max(2.0, cfg.consensus_floor_mult * chance));

  // Sequential extraction: vote on the constraints not yet claimed, validate
  // the dominant model, strip its band, repeat. Re-voting on the residual is
  // what lets a weak second model (small rotation angle, diffuse band)
  // surface once the dominant model no longer drowns it.
  std::vector<RotationEstimate> out;
  std::vector<char> removed(pre.constraints.size(), 0);
  while (static_cast<int>(out.size()) < cfg.max_models) {
    PreprocessResult sub;
    for (std::size_t k = 0; k < pre.constraints.size(); ++k) {
      if (removed[k]) continue;
      sub.constraints.push_back(pre.constraints[k]);
      sub.kept.push_back(pre.kept[k]);
    }
    if (sub.constraints.size() < std::max<std::size_t>(2, consensus_floor)) break;

    const Accumulator2D acc =
        accumulate(sub.constraints, cfg.grid, cfg.extent, cfg.theta_samples, cfg.threads);
    PeakSet peaks;
    bool have_peak = true;
    try {
      peaks = find_peaks(acc, 1, cfg.suppression_radius,
                         peak_vote_floor(cfg, sub.constraints.size()));
    } catch (const NoPeak&) {
      have_peak = false;
    }

    // Seed from the raw peak and let the blur rescue compete on coherent
    // support. Candidates classify against the full constraint set: two
    // models' inlier sets may legitimately share doubly-orthogonal
    // constraints, and the report must reflect the full data.
    RotationEstimate est;
    Support sup;
    bool have = false;
    if (have_peak) {
      std::vector<Vec3> starts{
          canonicalize(backproject_peak(interpolate_peak(acc, peaks.peaks.front())))};
      for (const Vec3& a : rescue_axes(acc, sub.constraints, cfg)) starts.push_back(a);
      for (std::size_t s = 0; s < starts.size(); ++s) {
        RotationEstimate cand;
        try {
          cand = build_candidate(starts[s], acc, correspondences, pre, cfg);
        } catch (const NoVotes&) {
          continue;
        }
        if (s == 0) cand.axis_votes = peaks.peaks.front().votes;
        Support csup = model_support(cand, correspondences, pre, cfg);
        if (!have || csup.coherent > sup.coherent) {
          est = std::move(cand);
          sup = std::move(csup);
          have = true;
        }
      }
    }

    // Validation: consensus above chance, and the inliers must agree on the
    // angle — a random or artifact axis catches constraints whose angles
    // scatter uniformly. When voting yields nothing valid, check for a
    // near-identity model before giving up.
    bool identity_model = false;
    const bool valid = have && est.inliers.size() >= consensus_floor &&
                       sup.coherent >= std::max<std::size_t>(8, est.inliers.size() / 5);
    if (!valid) {
      auto ident = near_identity_model(correspondences, sub, cfg, consensus_floor);
      if (!ident) break;
      est = std::move(*ident);
      identity_model = true;
    }
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const RotationEstimate& e) {
      std::vector<int> common;
      std::set_intersection(e.inliers.begin(), e.inliers.end(), est.inliers.begin(),
                            est.inliers.end(), std::back_inserter(common));
      return static_cast<double>(common.size()) >
             cfg.dedupe_overlap * static_cast<double>(est.inliers.size());
    });
    if (duplicate) break;

    if (identity_model) {
      // The cluster is defined by small motion, not by the axis band.
      std::vector<char> member(correspondences.size(), 0);
      for (int i : est.inliers) member[static_cast<std::size_t>(i)] = 1;
      for (std::size_t k = 0; k < pre.constraints.size(); ++k) {
        if (member[static_cast<std::size_t>(pre.kept[k])]) removed[k] = 1;
      }
    } else {
      // Strip the model's whole band, which spreads past epsilon when the
      // rotation angle is small, so its leftovers cannot masquerade as
      // another model in the next round.
      double strip = 2.0 * cfg.epsilon;
      if (!sup.band.empty()) {
        std::vector<double> band = sup.band;
        const std::size_t q = std::min(band.size() - 1, (band.size() * 95) / 100);
        std::nth_element(band.begin(), band.begin() + static_cast<std::ptrdiff_t>(q), band.end());
        strip = std::max(strip, 1.25 * band[q]);
      }
      for (std::size_t k = 0; k < pre.constraints.size(); ++k) {
        if (std::abs(est.axis.dot(pre.constraints[k])) < strip) removed[k] = 1;
      }
    }
    out.push_back(std::move(est));
  }
  if (out.empty()) throw NoPeak("no peak produced a usable model");
  std::stable_sort(out.begin(), out.end(),
                   [](const RotationEstimate& a, const RotationEstimate& b) {
                     return a.axis_votes > b.axis_votes;
                   });
  const double elapsed = seconds_since(t0);
  for (auto& e : out) e.elapsed_s = elapsed;
  return out;
}

}  // namespace rotavote
