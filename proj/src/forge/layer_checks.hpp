#pragma once

#include "forge/gs_layers.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace forge::gs {

enum class LayerKind { PointNet, Attention };

const char* to_string(LayerKind kind) noexcept;
LayerKind parse_layer(const std::string& name);  // "gs-pointnet" | "gs-attention"

struct LayerCheckOptions {
  LayerKind layer = LayerKind::Attention;
  int n = 8;                 // node count for the gradient and locality suites
  std::uint64_t seed = 1;
  int instances = 100;       // random instances for equivariance, sizes 1..16
  double tolerance = 1e-10;
  double gradient_tolerance = 1e-4;
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest observed deviation
  std::size_t cases = 0;
  std::string detail;
};

struct LayerCheckReport {
  LayerKind layer = LayerKind::Attention;
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<PropertyResult> properties;

  bool passed() const;
};

LayerCheckReport run_layer_checks(const LayerCheckOptions& opts);
std::string report_to_text(const LayerCheckReport& report);

// Random symmetric adjacency with the given edge probability.
Adjacency random_adjacency(Eigen::Index n, double edge_prob, std::uint64_t seed);
Matrix random_features(Eigen::Index n, Eigen::Index d, std::uint64_t seed, double scale = 1.0);

}  // namespace forge::gs
