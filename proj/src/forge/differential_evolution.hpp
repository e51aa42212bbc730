#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace forge {

// Storn-Price differential evolution settings (best/1/bin).
struct DEConfig {
  int population = 20;
  double mutation = 0.8;   // F
  double crossover = 0.9;  // CR
  int max_iters = 200;
  double tol = 1e-12;
  std::uint64_t rng_seed = 0;

  bool operator==(const DEConfig&) const = default;
};

void validate(const DEConfig& cfg);

struct DEResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  long evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

// Minimizes `f` over the box [lower, upper]. Deterministic for a fixed seed.
DEResult differential_evolution(const Objective& f, std::span<const double> lower, std::span<const double> upper,
                                const DEConfig& cfg);

}  // namespace forge
