#include "rotavote/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "rotavote/baselines.hpp"
#include "rotavote/errors.hpp"

namespace rotavote {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  for (double& v : values) {
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
  }
  std::sort(values.begin(), values.end());
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(values.size())));
  return values[std::min(values.size() - 1, rank == 0 ? 0 : rank - 1)];
}

// Axis from the plain least-squares system plus histogram-voted angle; the
// no-outlier-rejection comparison subject.
RotationEstimate lsq_estimate(std::span<const Correspondence> corrs,
                              const EstimatorConfig& cfg) {
  const PreprocessResult pre = preprocess(corrs, cfg.tau_z, cfg.normalize_inputs);
  RotationEstimate est;
  est.axis = least_squares_axis(pre.constraints);
  const AngleHistogram hist =
      vote_angles(est.axis, corrs, pre.kept, cfg.angle_bins, cfg.tau_deg);
  est.angle = peak_angle(hist, cfg.refine);
  est.rotation = rodrigues(est.axis, est.angle);
  for (int i : classify_inliers(est.axis, pre.constraints, cfg.epsilon))
    est.inliers.push_back(pre.kept[static_cast<std::size_t>(i)]);
  return est;
}

}  // namespace

double multi_model_error_deg(const std::vector<Mat3>& gt,
                             const std::vector<RotationEstimate>& estimates) {
  if (gt.empty()) return 0.0;
  if (estimates.size() < gt.size()) return 180.0;
  // Brute-force min-cost assignment; model counts are tiny. Candidates are
  // vote-ordered, so capping the pool keeps the permutation count bounded.
  const std::size_t pool = std::min<std::size_t>(estimates.size(), gt.size() + 3);
  std::vector<std::size_t> pick(pool);
  for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
  double best = std::numeric_limits<double>::infinity();
  std::sort(pick.begin(), pick.end());
  do {
    double sum = 0.0;
    for (std::size_t k = 0; k < gt.size(); ++k)
      sum += rotation_error(gt[k], estimates[pick[k]].rotation);
    best = std::min(best, sum / static_cast<double>(gt.size()));
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best * kRadToDeg;
}

BenchResult run_benchmark(const BenchScenario& scenario) {
  BenchResult result;
  for (std::size_t pi = 0; pi < scenario.points.size(); ++pi) {
    const SweepPoint& point = scenario.points[pi];
    for (const std::string& name : scenario.estimators) {
      std::vector<RunRecord> block;
      for (int trial = 0; trial < scenario.trials; ++trial) {
        const std::uint64_t seed =
            scenario.base_seed + 1000003ULL * static_cast<std::uint64_t>(pi) +
            static_cast<std::uint64_t>(trial);
        SynthConfig synth;
        synth.n = point.n;
        synth.rho = point.rho;
        synth.sigma = point.sigma;
        synth.models = point.models;
        synth.seed = seed;
        const auto [corrs, truth] = generate_scene(synth);

        RunRecord rec;
        rec.scenario = point.scenario;
        rec.trial = trial;
        rec.estimator = name;
        rec.n = point.n;
        rec.rho = point.rho;
        rec.sigma = point.sigma;

        EstimatorConfig cfg = scenario.cfg;
        cfg.max_models = point.models;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          std::vector<RotationEstimate> estimates;
          if (name == "vote" || name == "vote-norefine") {
            cfg.refine = name == "vote";
            estimates.push_back(estimate_single(corrs, cfg));
          } else if (name == "vote-multi") {
            estimates = estimate_multi(corrs, cfg);
          } else if (name == "ransac") {
            estimates.push_back(
                ransac_rotation(corrs, scenario.ransac_iterations, cfg.epsilon, seed));
          } else if (name == "seq-ransac") {
            estimates = sequential_ransac_multi(corrs, point.models,
                                                scenario.ransac_iterations, cfg.epsilon, seed);
          } else if (name == "lsq") {
            estimates.push_back(lsq_estimate(corrs, cfg));
          } else {
            throw InvalidConfig("unknown estimator: " + name);
          }
          rec.e_rot_deg = multi_model_error_deg(truth.rotations, estimates);
        } catch (const Error&) {
          rec.failed = true;
          rec.e_rot_deg = std::numeric_limits<double>::quiet_NaN();
          result.any_failed = true;
        }
        rec.time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rec.success = !rec.failed && rec.e_rot_deg < scenario.success_threshold_deg;
        block.push_back(std::move(rec));
      }

      BenchAggregate agg;
      agg.scenario = point.scenario;
      agg.estimator = name;
      agg.n = point.n;
      agg.rho = point.rho;
      agg.sigma = point.sigma;
      std::vector<double> errors;
      double time_sum = 0.0;
      int successes = 0;
      for (const auto& r : block) {
        errors.push_back(r.e_rot_deg);
        time_sum += r.time_s;
        successes += r.success ? 1 : 0;
      }
      agg.median_e_rot_deg = percentile(errors, 0.5);
      agg.p95_e_rot_deg = percentile(errors, 0.95);
      agg.success_rate = block.empty() ? 0.0 : static_cast<double>(successes) / block.size();
      agg.mean_time_s = block.empty() ? 0.0 : time_sum / block.size();
      result.aggregates.push_back(std::move(agg));
      for (auto& r : block) result.trials.push_back(std::move(r));
    }
  }
  return result;
}

void write_bench_csv(const BenchResult& result, std::ostream& out) {
  const auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "scenario,trial,estimator,n,rho,sigma,e_rot_deg,time_s,success\n";
  std::size_t agg_idx = 0;
  std::string block_key;
  const auto flush_aggregate = [&] {
    if (block_key.empty() || agg_idx >= result.aggregates.size()) return;
    const auto& a = result.aggregates[agg_idx++];
    out << a.scenario << ",agg," << a.estimator << ',' << a.n << ',' << num(a.rho) << ','
        << num(a.sigma) << ',' << num(a.median_e_rot_deg) << ',' << num(a.mean_time_s) << ','
        << num(a.success_rate) << ',' << num(a.p95_e_rot_deg) << '\n';
  };
  for (const auto& r : result.trials) {
    const std::string key = r.scenario + '\x1f' + r.estimator + '\x1f' +
                            std::to_string(r.n) + '\x1f' + num(r.rho) + '\x1f' + num(r.sigma);
    if (key != block_key) {
      flush_aggregate();
      block_key = key;
    }
    out << r.scenario << ',' << r.trial << ',' << r.estimator << ',' << r.n << ','
        << num(r.rho) << ',' << num(r.sigma) << ',' << num(r.e_rot_deg) << ','
        << num(r.time_s) << ',' << (r.success ? 1 : 0) << '\n';
  }
  flush_aggregate();
}

}  // namespace rotavote
