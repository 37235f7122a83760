#include "rotavote/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "rotavote/errors.hpp"

namespace rotavote {

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(gauss(rng), gauss(rng), gauss(rng));
  } while (v.norm() < 1e-12);
  return v.normalized();
}

// Exact integer split of n over the given fractions, largest remainder first.
std::vector<int> largest_remainder_counts(int n, const std::vector<double>& fractions) {
  std::vector<int> counts(fractions.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    const double quota = fractions[k] * n;
    counts[k] = static_cast<int>(std::floor(quota));
    assigned += counts[k];
    remainders.emplace_back(quota - counts[k], k);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; i < n - assigned; ++i) counts[remainders[static_cast<std::size_t>(i)].second]++;
  return counts;
}

}  // namespace

Mat3 random_rotation(std::mt19937_64& rng) {
  const Vec3 axis = random_unit(rng);
  std::uniform_real_distribution<double> uni(-std::numbers::pi, std::numbers::pi);
  return rodrigues(axis, uni(rng));
}

std::pair<std::vector<Correspondence>, SceneTruth> generate_scene(const SynthConfig& cfg) {
  if (cfg.n < 0 || cfg.rho < 0.0 || cfg.rho > 1.0 || cfg.models < 1) {
    throw InvalidConfig("invalid scene configuration");
  }
  std::vector<double> weights = cfg.weights;
  if (weights.empty()) {
    weights.assign(static_cast<std::size_t>(cfg.models), (1.0 - cfg.rho) / cfg.models);
  }
  if (static_cast<int>(weights.size()) != cfg.models) {
    throw InvalidConfig("weights must have one entry per model");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), cfg.rho);
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidConfig("model weights plus outlier ratio must sum to 1");
  }

  std::vector<double> fractions = weights;
  fractions.push_back(cfg.rho);  // outliers last
  const std::vector<int> counts = largest_remainder_counts(cfg.n, fractions);

  std::mt19937_64 rng(cfg.seed);
  SceneTruth truth;
  truth.rotations.reserve(static_cast<std::size_t>(cfg.models));
  for (int k = 0; k < cfg.models; ++k) truth.rotations.push_back(random_rotation(rng));

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Correspondence> corrs;
  corrs.reserve(static_cast<std::size_t>(cfg.n));
  truth.labels.reserve(static_cast<std::size_t>(cfg.n));
  for (int k = 0; k <= cfg.models; ++k) {
    const int label = k < cfg.models ? k : -1;
    for (int i = 0; i < counts[static_cast<std::size_t>(k)]; ++i) {
      const Vec3 x = random_unit(rng);
      Vec3 y;
      if (label >= 0) {
        y = truth.rotations[static_cast<std::size_t>(label)] * x;
        if (cfg.sigma > 0.0) {
          y += cfg.sigma * Vec3(gauss(rng), gauss(rng), gauss(rng));
          y.normalize();
        }
      } else {
        y = random_unit(rng);
      }
      corrs.push_back({x, y});
      truth.labels.push_back(label);
    }
  }
  return {std::move(corrs), std::move(truth)};
}

}  // namespace rotavote
