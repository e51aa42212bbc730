#include "forge/differential_evolution.hpp"

#include "forge/common.hpp"
#include "forge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace forge {

void validate(const DEConfig& cfg) {
  if (cfg.population < 4) fail(ErrorKind::Validation, "DE population must be at least 4");
  if (!(cfg.mutation > 0.0 && cfg.mutation <= 2.0)) fail(ErrorKind::Validation, "DE mutation F must lie in (0, 2]");
  if (!(cfg.crossover >= 0.0 && cfg.crossover <= 1.0)) fail(ErrorKind::Validation, "DE crossover CR must lie in [0, 1]");
  if (cfg.max_iters < 1) fail(ErrorKind::Validation, "DE max_iters must be positive");
  if (!(cfg.tol >= 0.0)) fail(ErrorKind::Validation, "DE tol must be nonnegative");
}

DEResult differential_evolution(const Objective& f, std::span<const double> lower, std::span<const double> upper,
                                const DEConfig& cfg) {
  validate(cfg);
  const std::size_t dim = lower.size();
  if (dim == 0 || upper.size() != dim) fail(ErrorKind::Precondition, "DE bounds must be non-empty and equal-sized");
  const auto np = static_cast<std::size_t>(cfg.population);
  Rng rng(cfg.rng_seed);

  // Latin hypercube initialisation.
  std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
  std::vector<std::size_t> strata(np);
  for (std::size_t d = 0; d < dim; ++d) {
    std::iota(strata.begin(), strata.end(), 0);
    for (std::size_t k = np - 1; k > 0; --k) std::swap(strata[k], strata[rng.below(k + 1)]);
    for (std::size_t k = 0; k < np; ++k) {
      const double u = (static_cast<double>(strata[k]) + rng.uniform()) / static_cast<double>(np);
      pop[k][d] = lower[d] + u * (upper[d] - lower[d]);
    }
  }

  DEResult result;
  std::vector<double> energy(np);
  for (std::size_t k = 0; k < np; ++k) energy[k] = f(pop[k]);
  result.evaluations = static_cast<long>(np);
  std::size_t best = static_cast<std::size_t>(std::min_element(energy.begin(), energy.end()) - energy.begin());

  std::vector<double> trial(dim);
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    for (std::size_t i = 0; i < np; ++i) {
      std::size_t r1, r2;
      do r1 = rng.below(np); while (r1 == i);
      do r2 = rng.below(np); while (r2 == i || r2 == r1);
      const std::size_t forced = rng.below(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        if (d == forced || rng.uniform() < cfg.crossover) {
          double v = pop[best][d] + cfg.mutation * (pop[r1][d] - pop[r2][d]);
          if (v < lower[d] || v > upper[d]) v = lower[d] + rng.uniform() * (upper[d] - lower[d]);
          trial[d] = v;
        } else {
          trial[d] = pop[i][d];
        }
      }
      const double e = f(trial);
      ++result.evaluations;
      if (e <= energy[i]) {
        pop[i] = trial;
        energy[i] = e;
        if (e < energy[best]) best = i;
      }
    }
    double mean = 0.0;
    for (double e : energy) mean += e;
    mean /= static_cast<double>(np);
    double var = 0.0;
    for (double e : energy) var += (e - mean) * (e - mean);
    if (std::sqrt(var / static_cast<double>(np)) <= cfg.tol * std::abs(mean)) {
      ++iter;
      break;
    }
  }
  result.x = pop[best];
  result.value = energy[best];
  result.iterations = iter;
  return result;
}

}  // namespace forge
