#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rotavote/estimator.hpp"
#include "rotavote/synth.hpp"

namespace rotavote {

struct SweepPoint {
  std::string scenario;
  int n = 1000;
  double rho = 0.0;
  double sigma = 0.0;
  int models = 1;
};

struct BenchScenario {
  std::vector<SweepPoint> points;
  int trials = 20;
  std::vector<std::string> estimators{"vote"};  // vote, vote-norefine, vote-multi,
                                                // ransac, seq-ransac, lsq
  std::uint64_t base_seed = 0;
  EstimatorConfig cfg;
  int ransac_iterations = 1000;
  double success_threshold_deg = 1.0;
};

struct RunRecord {
  std::string scenario;
  int trial = 0;
  std::string estimator;
  int n = 0;
  double rho = 0.0;
  double sigma = 0.0;
  double e_rot_deg = 0.0;  // NaN on a failed trial
  double time_s = 0.0;
  bool success = false;
  bool failed = false;  // estimator raised an error
};

struct BenchAggregate {
  std::string scenario;
  std::string estimator;
  int n = 0;
  double rho = 0.0;
  double sigma = 0.0;
  double median_e_rot_deg = 0.0;
  double p95_e_rot_deg = 0.0;
  double success_rate = 0.0;
  double mean_time_s = 0.0;
};

struct BenchResult {
  std::vector<RunRecord> trials;
  std::vector<BenchAggregate> aggregates;
  bool any_failed = false;
};

// Runs every (point, estimator, trial) combination with the deterministic seed
// schedule base_seed + point-index stride + trial. Estimator errors become
// failed-trial rows; the sweep never aborts.
BenchResult run_benchmark(const BenchScenario& scenario);

// CSV with header scenario,trial,estimator,n,rho,sigma,e_rot_deg,time_s,success.
// Each (scenario, estimator) block is followed by one aggregate row
// (trial = "agg") carrying median, mean time, success rate and a trailing
// 95th-percentile field.
void write_bench_csv(const BenchResult& result, std::ostream& out);

// Rotation error (degrees) of an estimate set against ground truth, matched by
// minimum-cost assignment; 180 when there are fewer estimates than rotations.
double multi_model_error_deg(const std::vector<Mat3>& gt,
                             const std::vector<RotationEstimate>& estimates);

}  // namespace rotavote
