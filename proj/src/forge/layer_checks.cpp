#include "forge/layer_checks.hpp"

#include "forge/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace forge::gs {

const char* to_string(LayerKind kind) noexcept {
  return kind == LayerKind::PointNet ? "gs-pointnet" : "gs-attention";
}

LayerKind parse_layer(const std::string& name) {
  if (name == "gs-pointnet" || name == "pointnet") return LayerKind::PointNet;
  if (name == "gs-attention" || name == "attention") return LayerKind::Attention;
  fail(ErrorKind::Validation, "unknown layer '" + name + "' (expected gs-pointnet or gs-attention)");
}

bool LayerCheckReport::passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.passed; });
}

Adjacency random_adjacency(Eigen::Index n, double edge_prob, std::uint64_t seed) {
  Rng rng(seed);
  Adjacency A = Adjacency::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (rng.uniform() < edge_prob) A(i, j) = A(j, i) = 1;
  return A;
}

Matrix random_features(Eigen::Index n, Eigen::Index d, std::uint64_t seed, double scale) {
  Rng rng(seed);
  Matrix X(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = scale * (2.0 * rng.uniform() - 1.0);
  return X;
}

namespace {

constexpr Eigen::Index kDimIn = 3;
constexpr Eigen::Index kDimModel = 4;
constexpr Eigen::Index kHidden = 8;

struct Instance {
  Matrix X, P;
  Adjacency A;
  PointNetParams pointnet;
  AttentionParams attention;
};

Instance make_instance(Eigen::Index n, std::uint64_t seed) {
  Instance inst;
  inst.X = random_features(n, kDimIn, mix_seed(seed, 1));
  inst.P = random_features(n, 3, mix_seed(seed, 2));
  inst.A = random_adjacency(n, 0.3, mix_seed(seed, 3));
  inst.pointnet = random_pointnet(kDimIn, kDimModel, kHidden, mix_seed(seed, 4));
  inst.attention = random_attention(kDimIn, kDimModel, mix_seed(seed, 5));
  return inst;
}

Matrix forward(LayerKind kind, const Instance& inst) {
  return kind == LayerKind::PointNet ? pointnet_forward(inst.X, inst.P, inst.A, inst.pointnet)
                                     : attention_forward(inst.X, inst.A, inst.attention);
}

std::vector<Eigen::Index> random_permutation(Eigen::Index n, Rng& rng) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  return perm;
}

// Row k of the permuted instance is row perm[k] of the original.
Instance permute(const Instance& inst, const std::vector<Eigen::Index>& perm) {
  const auto n = inst.X.rows();
  Instance out = inst;
  for (Eigen::Index k = 0; k < n; ++k) {
    out.X.row(k) = inst.X.row(perm[k]);
    out.P.row(k) = inst.P.row(perm[k]);
    for (Eigen::Index l = 0; l < n; ++l) out.A(k, l) = inst.A(perm[k], perm[l]);
  }
  return out;
}

PropertyResult check_equivariance(LayerKind kind, const LayerCheckOptions& opts) {
  PropertyResult r{"permutation equivariance", true, 0.0, 0, {}};
  Rng sizes(mix_seed(opts.seed, 0xe9));
  for (int k = 0; k < opts.instances; ++k) {
    const auto n = static_cast<Eigen::Index>(1 + sizes.below(16));
    const Instance inst = make_instance(n, mix_seed(opts.seed, 1000 + static_cast<std::uint64_t>(k)));
    Rng prng(mix_seed(opts.seed, 5000 + static_cast<std::uint64_t>(k)));
    const auto perm = random_permutation(n, prng);
    const Matrix h = forward(kind, inst);
    const Matrix hp = forward(kind, permute(inst, perm));
    for (Eigen::Index row = 0; row < n; ++row)
      r.worst = std::max(r.worst, (hp.row(row) - h.row(perm[row])).cwiseAbs().maxCoeff());
    ++r.cases;
  }
  r.passed = r.worst <= opts.tolerance;
  return r;
}

PropertyResult check_row_sums(const LayerCheckOptions& opts) {
  PropertyResult r{"attention rows sum to one", true, 0.0, 0, {}};
  Rng sizes(mix_seed(opts.seed, 0x5a));
  for (int k = 0; k < opts.instances; ++k) {
    const auto n = static_cast<Eigen::Index>(1 + sizes.below(16));
    const Instance inst = make_instance(n, mix_seed(opts.seed, 2000 + static_cast<std::uint64_t>(k)));
    const Matrix alpha = attention_weights(inst.X, inst.A);
    for (Eigen::Index i = 0; i < n; ++i) {
      double mass = 0.0;
      for (auto j : neighborhood(inst.A, i, {})) mass += alpha(i, j);
      r.worst = std::max(r.worst, std::abs(mass - 1.0));
    }
    ++r.cases;
  }
  r.passed = r.worst <= opts.tolerance;
  return r;
}

PropertyResult check_locality(LayerKind kind, const LayerCheckOptions& opts) {
  PropertyResult r{"locality", true, 0.0, 0, {}};
  const auto n = static_cast<Eigen::Index>(opts.n);
  for (int k = 0; k < opts.instances; ++k) {
    const auto seed = mix_seed(opts.seed, 3000 + static_cast<std::uint64_t>(k));
    const Instance inst = make_instance(n, seed);
    const Matrix h = forward(kind, inst);
    Rng rng(mix_seed(seed, 7));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto nbrs = neighborhood(inst.A, i, {});
      std::vector<Eigen::Index> outside;
      for (Eigen::Index j = 0; j < n; ++j)
        if (!std::binary_search(nbrs.begin(), nbrs.end(), j)) outside.push_back(j);
      if (outside.empty()) continue;
      Instance changed = inst;
      const auto victim = outside[rng.below(outside.size())];
      changed.X.row(victim) = random_features(1, kDimIn, mix_seed(seed, 100 + static_cast<std::uint64_t>(i)), 5.0);
      changed.P.row(victim) = random_features(1, 3, mix_seed(seed, 200 + static_cast<std::uint64_t>(i)), 5.0);
      const Matrix h2 = forward(kind, changed);
      r.worst = std::max(r.worst, (h2.row(i) - h.row(i)).cwiseAbs().maxCoeff());
      ++r.cases;
    }
  }
  r.passed = r.worst <= opts.tolerance;
  if (r.cases == 0) r.detail = "no node had a non-neighbour";
  return r;
}

PropertyResult check_neighbor_order(const LayerCheckOptions& opts) {
  PropertyResult r{"neighbour-order invariance", true, 0.0, 0, {}};
  const auto n = static_cast<Eigen::Index>(opts.n);
  for (int k = 0; k < opts.instances; ++k) {
    const auto seed = mix_seed(opts.seed, 4000 + static_cast<std::uint64_t>(k));
    const Instance inst = make_instance(n, seed);
    const Matrix h = pointnet_forward(inst.X, inst.P, inst.A, inst.pointnet);
    Rng rng(mix_seed(seed, 9));
    for (Eigen::Index i = 0; i < n; ++i) {
      auto nbrs = neighborhood(inst.A, i, {});
      for (std::size_t m = nbrs.size(); m > 1; --m) std::swap(nbrs[m - 1], nbrs[rng.below(m)]);
      RowVector folded = pointnet_message(inst.X, inst.P, i, nbrs.front(), inst.pointnet);
      for (std::size_t m = 1; m < nbrs.size(); ++m)
        folded = folded.cwiseMax(pointnet_message(inst.X, inst.P, i, nbrs[m], inst.pointnet));
      r.worst = std::max(r.worst, (folded - h.row(i)).cwiseAbs().maxCoeff());
      ++r.cases;
    }
  }
  r.passed = r.worst <= opts.tolerance;
  return r;
}

PropertyResult check_gradient(LayerKind kind, const LayerCheckOptions& opts) {
  PropertyResult r{"finite-difference gradient", true, 0.0, 0, {}};
  const auto n = static_cast<Eigen::Index>(opts.n);
  constexpr int kGradientInstances = 20;
  std::size_t skipped = 0;
  for (int k = 0; k < kGradientInstances; ++k) {
    const Instance inst = make_instance(n, mix_seed(opts.seed, 6000 + static_cast<std::uint64_t>(k)));
    const GradientCheck g = kind == LayerKind::PointNet
                                ? check_pointnet_gradient(inst.X, inst.P, inst.A, inst.pointnet)
                                : check_attention_gradient(inst.X, inst.A, inst.attention);
    if (g.skipped) {
      ++skipped;
      continue;
    }
    r.worst = std::max(r.worst, g.max_relative_error);
    ++r.cases;
  }
  r.passed = r.cases > 0 && r.worst < opts.gradient_tolerance;
  r.detail = std::to_string(skipped) + " instance(s) skipped at max-ties";
  return r;
}

}  // namespace

LayerCheckReport run_layer_checks(const LayerCheckOptions& opts) {
  if (opts.n < 1 || opts.n > 64) fail(ErrorKind::Validation, "n must be in [1, 64]");
  if (opts.instances < 1) fail(ErrorKind::Validation, "instances must be positive");
  LayerCheckReport report;
  report.layer = opts.layer;
  report.n = opts.n;
  report.seed = opts.seed;
  report.properties.push_back(check_equivariance(opts.layer, opts));
  if (opts.layer == LayerKind::Attention) report.properties.push_back(check_row_sums(opts));
  report.properties.push_back(check_locality(opts.layer, opts));
  if (opts.layer == LayerKind::PointNet) report.properties.push_back(check_neighbor_order(opts));
  report.properties.push_back(check_gradient(opts.layer, opts));
  return report;
}

std::string report_to_text(const LayerCheckReport& report) {
  std::ostringstream out;
  out << "layer " << to_string(report.layer) << " n=" << report.n << " seed=" << report.seed << '\n';
  for (const auto& p : report.properties) {
    char worst[32];
    std::snprintf(worst, sizeof worst, "%.3e", p.worst);
    out << (p.passed ? "PASS " : "FAIL ") << p.name << "  cases=" << p.cases << " worst=" << worst;
    if (!p.detail.empty()) out << "  (" << p.detail << ')';
    out << '\n';
  }
  out << (report.passed() ? "all properties hold" : "some properties failed") << '\n';
  return out.str();
}

}  // namespace forge::gs
