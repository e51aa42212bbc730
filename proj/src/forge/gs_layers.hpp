#pragma once

#include "forge/common.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace forge::gs {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;
// Symmetric 0/1 adjacency; the diagonal is ignored.
using Adjacency = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct LayerOptions {
  bool self_loops = true;  // node i belongs to its own neighbourhood
};

// Rows are nodes. psi(x) = x W (no bias); phi(z) = SiLU(z W1 + b1) W2 + b2 with
// z = [x W, p_i - p_j].
struct PointNetParams {
  Matrix W;    // d_in x d_model
  Matrix W1;   // (d_model + 3) x hidden
  RowVector b1;
  Matrix W2;   // hidden x d_model
  RowVector b2;

  Eigen::Index d_in() const { return W.rows(); }
  Eigen::Index d_model() const { return W.cols(); }
};

struct AttentionParams {
  Matrix V;  // d_in x d_model value projection

  Eigen::Index d_in() const { return V.rows(); }
  Eigen::Index d_model() const { return V.cols(); }
};

inline constexpr double kMaskValue = -1e9;

// Neighbourhood of node i (ascending, with i itself when self_loops).
std::vector<Eigen::Index> neighborhood(const Adjacency& A, Eigen::Index i, const LayerOptions& opts);

// h_i = max_{j in N_i} phi([x_i W, p_i - p_j]), elementwise.
Matrix pointnet_forward(const Matrix& X, const Matrix& P, const Adjacency& A, const PointNetParams& params,
                        const LayerOptions& opts = {});

// phi([x_i W, p_i - p_j]) for one ordered pair.
RowVector pointnet_message(const Matrix& X, const Matrix& P, Eigen::Index i, Eigen::Index j,
                           const PointNetParams& params);

// alpha_ij = softmax_j over N_i of x_i . x_j / sqrt(d), with d the column count of X
// and non-neighbours masked to kMaskValue; h_i = sum_j alpha_ij x_j V.
Matrix attention_forward(const Matrix& X, const Adjacency& A, const AttentionParams& params,
                         const LayerOptions& opts = {});
Matrix attention_weights(const Matrix& X, const Adjacency& A, const LayerOptions& opts = {});

// Gradients of L = sum of all outputs.
struct PointNetGrads {
  Matrix dX, dW, dW1, dW2;
  RowVector db1, db2;
  std::size_t ties = 0;  // (node, channel) maxima that were not unique within 1e-9
};
PointNetGrads pointnet_backward(const Matrix& X, const Matrix& P, const Adjacency& A, const PointNetParams& params,
                                const LayerOptions& opts = {});

struct AttentionGrads {
  Matrix dX, dV;
};
AttentionGrads attention_backward(const Matrix& X, const Adjacency& A, const AttentionParams& params,
                                  const LayerOptions& opts = {});

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t ties = 0;      // non-zero means the PointNet check was skipped
  bool skipped = false;
};

// Central differences against the analytic gradient over every parameter and
// input entry; error is |numeric - analytic| / (|analytic| + 1e-8).
GradientCheck check_pointnet_gradient(const Matrix& X, const Matrix& P, const Adjacency& A,
                                      const PointNetParams& params, double eps = 1e-5,
                                      const LayerOptions& opts = {});
GradientCheck check_attention_gradient(const Matrix& X, const Adjacency& A, const AttentionParams& params,
                                       double eps = 1e-5, const LayerOptions& opts = {});

// Random parameter initialisation (uniform in [-scale, scale]) from a seed.
PointNetParams random_pointnet(Eigen::Index d_in, Eigen::Index d_model, Eigen::Index hidden, std::uint64_t seed,
                               double scale = 0.5);
AttentionParams random_attention(Eigen::Index d_in, Eigen::Index d_model, std::uint64_t seed, double scale = 0.5);

// Two-layer sequential stack; positions always come from the raw input.
struct StackConfig {
  Eigen::Index d_model = 256;
  int layers = 2;
};
Matrix pointnet_stack_forward(const Matrix& X, const Matrix& P, const Adjacency& A,
                              const std::vector<PointNetParams>& layers, const LayerOptions& opts = {});

}  // namespace forge::gs
