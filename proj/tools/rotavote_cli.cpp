#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rotavote/baselines.hpp"
#include "rotavote/bench.hpp"
#include "rotavote/errors.hpp"
#include "rotavote/io.hpp"

namespace {

using namespace rotavote;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

int resolve_threads(int flag_value) {
  // ROTAVOTE_THREADS overrides the --threads flag when set.
  if (const char* env = std::getenv("ROTAVOTE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return flag_value;
}

void add_estimator_flags(CLI::App* cmd, EstimatorConfig& cfg) {
  cmd->add_option("--grid", cfg.grid, "Accumulator resolution G");
  cmd->add_option("--extent", cfg.extent, "Accumulator half-width E");
  cmd->add_option("--theta-samples", cfg.theta_samples, "Circle samples J");
  cmd->add_option("--epsilon", cfg.epsilon, "Inlier threshold on |axis . z|");
  cmd->add_option("--angle-bins", cfg.angle_bins, "Angle histogram bins");
  cmd->add_option("--min-votes-frac", cfg.min_votes_frac, "Peak vote floor fraction");
  cmd->add_option("--suppression-radius", cfg.suppression_radius, "Peak suppression radius (cells)");
  cmd->add_flag("--refine,!--no-refine", cfg.refine, "Least-squares axis + circular-mean angle refinement");
  cmd->add_flag("--normalize,!--no-normalize", cfg.normalize_inputs, "Renormalize inputs to unit length");
  cmd->add_option("--threads", cfg.threads, "Thread budget (ROTAVOTE_THREADS overrides)");
}

void print_estimates(const std::vector<RotationEstimate>& estimates) {
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const auto& e = estimates[k];
    std::cout << "model " << k << ": axis [" << e.axis.x() << ", " << e.axis.y() << ", "
              << e.axis.z() << "]  angle " << e.angle * kRadToDeg << " deg  inliers "
              << e.inliers.size() << "  votes " << e.axis_votes << "  time "
              << e.elapsed_s << " s\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outlier-robust rotation estimation by stereographic-projection voting"};
  app.require_subcommand(1);

  EstimatorConfig cfg;
  std::string input, output, truth_path, format = "text";

  // estimate / multi
  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate a single rotation from a correspondence CSV");
  auto* multi_cmd = app.add_subcommand("multi", "Estimate several rotations simultaneously");
  for (CLI::App* cmd : {estimate_cmd, multi_cmd}) {
    cmd->add_option("--input,-i", input, "Correspondence CSV")->required();
    cmd->add_option("--output,-o", output, "Result document (JSON)");
    add_estimator_flags(cmd, cfg);
  }
  multi_cmd->add_option("--max-models", cfg.max_models, "Maximum models to extract");

  // synth
  SynthConfig synth;
  std::vector<double> weights;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene");
  synth_cmd->add_option("--n", synth.n, "Total correspondences");
  synth_cmd->add_option("--rho", synth.rho, "Outlier ratio");
  synth_cmd->add_option("--sigma", synth.sigma, "Noise standard deviation");
  synth_cmd->add_option("--models", synth.models, "Ground-truth rotation count");
  synth_cmd->add_option("--weights", weights, "Per-model inlier fractions");
  synth_cmd->add_option("--seed", synth.seed, "RNG seed");
  synth_cmd->add_option("--output,-o", output, "Correspondence CSV to write")->required();
  synth_cmd->add_option("--truth", truth_path, "Truth sidecar to write");

  // bench
  BenchScenario bench;
  std::vector<int> bench_n{10000};
  std::vector<double> bench_rho{0.0};
  double bench_sigma = 0.01;
  int bench_models = 1;
  auto* bench_cmd = app.add_subcommand("bench", "Run a synthetic benchmark sweep");
  bench_cmd->add_option("--n", bench_n, "Input sizes to sweep");
  bench_cmd->add_option("--rho", bench_rho, "Outlier ratios to sweep");
  bench_cmd->add_option("--sigma", bench_sigma, "Noise standard deviation");
  bench_cmd->add_option("--models", bench_models, "Ground-truth rotation count");
  bench_cmd->add_option("--trials", bench.trials, "Trials per sweep point");
  bench_cmd->add_option("--estimators", bench.estimators,
                        "Estimators: vote, vote-norefine, vote-multi, ransac, seq-ransac, lsq");
  bench_cmd->add_option("--seed", bench.base_seed, "Base seed of the trial schedule");
  bench_cmd->add_option("--ransac-iterations", bench.ransac_iterations, "RANSAC iterations per model");
  bench_cmd->add_option("--success-deg", bench.success_threshold_deg, "Success threshold (degrees)");
  bench_cmd->add_option("--output,-o", output, "Benchmark CSV (default: stdout)");
  add_estimator_flags(bench_cmd, bench.cfg);

  // oracle
  OracleConfig oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force consensus axis over a hemisphere grid");
  oracle_cmd->add_option("--input,-i", input, "Correspondence CSV")->required();
  oracle_cmd->add_option("--epsilon", oracle.epsilon, "Inlier threshold");
  oracle_cmd->add_option("--directions", oracle.directions, "Hemisphere sample count");

  // dump-acc
  auto* dump_cmd = app.add_subcommand("dump-acc", "Accumulate votes and dump the grid");
  dump_cmd->add_option("--input,-i", input, "Correspondence CSV")->required();
  dump_cmd->add_option("--output,-o", output, "Dump path")->required();
  dump_cmd->add_option("--format", format, "text | pgm")->check(CLI::IsMember({"text", "pgm"}));
  add_estimator_flags(dump_cmd, cfg);

  CLI11_PARSE(app, argc, argv);
  cfg.threads = resolve_threads(cfg.threads);
  bench.cfg.threads = resolve_threads(bench.cfg.threads);

  try {
    if (*estimate_cmd || *multi_cmd) {
      const auto corrs = read_correspondences(input);
      std::vector<RotationEstimate> estimates;
      if (*estimate_cmd) {
        estimates.push_back(estimate_single(corrs, cfg));
      } else {
        estimates = estimate_multi(corrs, cfg);
      }
      print_estimates(estimates);
      if (!output.empty()) write_result(estimates, output);
    } else if (*synth_cmd) {
      synth.weights = weights;
      const auto [corrs, truth] = generate_scene(synth);
      write_correspondences(corrs, output);
      if (!truth_path.empty()) write_truth(truth, truth_path);
    } else if (*bench_cmd) {
      for (int n : bench_n) {
        for (double rho : bench_rho) {
          SweepPoint p;
          p.scenario = "n" + std::to_string(n) + "_rho" + std::to_string(rho);
          p.n = n;
          p.rho = rho;
          p.sigma = bench_sigma;
          p.models = bench_models;
          bench.points.push_back(std::move(p));
        }
      }
      const BenchResult result = run_benchmark(bench);
      if (output.empty()) {
        write_bench_csv(result, std::cout);
      } else {
        std::ofstream out(output);
        if (!out) throw IoError("cannot open for writing: " + output);
        write_bench_csv(result, out);
      }
      if (result.any_failed) {
        std::cerr << "warning: some trials failed\n";
        return 1;
      }
    } else if (*oracle_cmd) {
      const auto corrs = read_correspondences(input);
      const PreprocessResult pre = preprocess(corrs, 1e-9, true);
      const auto [axis, count] = grid_oracle_axis(pre.constraints, oracle);
      std::cout << "axis [" << axis.x() << ", " << axis.y() << ", " << axis.z()
                << "]  consensus " << count << "\n";
    } else if (*dump_cmd) {
      const auto corrs = read_correspondences(input);
      const PreprocessResult pre = preprocess(corrs, cfg.tau_z, cfg.normalize_inputs);
      const Accumulator2D acc =
          accumulate(pre.constraints, cfg.grid, cfg.extent, cfg.theta_samples, cfg.threads);
      dump_accumulator(acc, output, format == "pgm" ? DumpFormat::Pgm : DumpFormat::Text);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
