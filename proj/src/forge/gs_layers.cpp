#include "forge/gs_layers.hpp"

#include "forge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace forge::gs {

namespace {

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }
double silu(double a) { return a * sigmoid(a); }
double silu_grad(double a) {
  const double s = sigmoid(a);
  return s * (1.0 + a * (1.0 - s));
}

void check_adjacency(const Adjacency& A, Eigen::Index n) {
  if (A.rows() != n || A.cols() != n) fail(ErrorKind::Validation, "adjacency must be n x n");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if ((A(i, j) != 0) != (A(j, i) != 0)) fail(ErrorKind::Validation, "adjacency must be symmetric");
}

void check_pointnet(const Matrix& X, const Matrix& P, const Adjacency& A, const PointNetParams& p) {
  const auto n = X.rows();
  if (P.rows() != n || P.cols() != 3) fail(ErrorKind::Validation, "positions must be n x 3");
  check_adjacency(A, n);
  if (p.W.rows() != X.cols()) fail(ErrorKind::Validation, "W rows must equal the feature dimension");
  if (p.d_model() <= 0) fail(ErrorKind::Validation, "d_model must be positive");
  if (p.W1.rows() != p.d_model() + 3) fail(ErrorKind::Validation, "W1 rows must equal d_model + 3");
  if (p.b1.size() != p.W1.cols() || p.W2.rows() != p.W1.cols())
    fail(ErrorKind::Validation, "hidden layer shapes disagree");
  if (p.W2.cols() != p.d_model() || p.b2.size() != p.d_model())
    fail(ErrorKind::Validation, "W2 and b2 must produce d_model outputs");
}

void check_attention(const Matrix& X, const Adjacency& A, const AttentionParams& p) {
  check_adjacency(A, X.rows());
  if (p.V.rows() != X.cols()) fail(ErrorKind::Validation, "V rows must equal the feature dimension");
  if (p.d_model() <= 0) fail(ErrorKind::Validation, "d_model must be positive");
}

struct PairActivations {
  RowVector z, a, s, o;
};

PairActivations pointnet_pair(const RowVector& xw, const Matrix& P, Eigen::Index i, Eigen::Index j,
                              const PointNetParams& p) {
  PairActivations act;
  act.z.resize(xw.size() + 3);
  act.z << xw, P.row(i) - P.row(j);
  act.a = act.z * p.W1 + p.b1;
  act.s = act.a.unaryExpr([](double v) { return silu(v); });
  act.o = act.s * p.W2 + p.b2;
  return act;
}

}  // namespace

std::vector<Eigen::Index> neighborhood(const Adjacency& A, Eigen::Index i, const LayerOptions& opts) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    if ((j == i && opts.self_loops) || (j != i && A(i, j) != 0)) out.push_back(j);
  if (out.empty()) fail(ErrorKind::Precondition, "node " + std::to_string(i) + " has an empty neighbourhood");
  return out;
}

Matrix pointnet_forward(const Matrix& X, const Matrix& P, const Adjacency& A, const PointNetParams& params,
                        const LayerOptions& opts) {
  check_pointnet(X, P, A, params);
  const auto n = X.rows();
  Matrix H(n, params.d_model());
  for (Eigen::Index i = 0; i < n; ++i) {
    const RowVector xw = X.row(i) * params.W;
    RowVector best = RowVector::Constant(params.d_model(), -std::numeric_limits<double>::infinity());
    for (auto j : neighborhood(A, i, opts)) best = best.cwiseMax(pointnet_pair(xw, P, i, j, params).o);
    H.row(i) = best;
  }
  return H;
}

RowVector pointnet_message(const Matrix& X, const Matrix& P, Eigen::Index i, Eigen::Index j,
                           const PointNetParams& params) {
  if (i < 0 || j < 0 || i >= X.rows() || j >= X.rows()) fail(ErrorKind::Validation, "node index out of range");
  const RowVector xw = X.row(i) * params.W;
  return pointnet_pair(xw, P, i, j, params).o;
}

Matrix attention_weights(const Matrix& X, const Adjacency& A, const LayerOptions& opts) {
  check_adjacency(A, X.rows());
  const auto n = X.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(X.cols()));
  Matrix alpha(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto nbrs = neighborhood(A, i, opts);
    RowVector logits = RowVector::Constant(n, kMaskValue);
    for (auto j : nbrs) logits[j] = X.row(i).dot(X.row(j)) * scale;
    const double m = logits.maxCoeff();
    // Scalar exp: the vectorised one clamps its argument, leaving masked weights near 1e-309 instead of 0.
    RowVector e = (logits.array() - m).unaryExpr([](double v) { return std::exp(v); }).matrix();
    alpha.row(i) = e / e.sum();
  }
  return alpha;
}

Matrix attention_forward(const Matrix& X, const Adjacency& A, const AttentionParams& params,
                         const LayerOptions& opts) {
  check_attention(X, A, params);
  return attention_weights(X, A, opts) * (X * params.V);
}

PointNetGrads pointnet_backward(const Matrix& X, const Matrix& P, const Adjacency& A, const PointNetParams& params,
                                const LayerOptions& opts) {
  check_pointnet(X, P, A, params);
  const auto n = X.rows();
  const auto dm = params.d_model();
  PointNetGrads g;
  g.dX = Matrix::Zero(n, X.cols());
  g.dW = Matrix::Zero(params.W.rows(), params.W.cols());
  g.dW1 = Matrix::Zero(params.W1.rows(), params.W1.cols());
  g.dW2 = Matrix::Zero(params.W2.rows(), params.W2.cols());
  g.db1 = RowVector::Zero(params.b1.size());
  g.db2 = RowVector::Zero(dm);

  for (Eigen::Index i = 0; i < n; ++i) {
    const RowVector xw = X.row(i) * params.W;
    const auto nbrs = neighborhood(A, i, opts);
    std::vector<PairActivations> acts;
    acts.reserve(nbrs.size());
    for (auto j : nbrs) acts.push_back(pointnet_pair(xw, P, i, j, params));
    std::vector<std::size_t> argmax(static_cast<std::size_t>(dm), 0);
    for (Eigen::Index k = 0; k < dm; ++k) {
      double top = -std::numeric_limits<double>::infinity();
      double second = top;
      for (std::size_t m = 0; m < acts.size(); ++m) {
        const double v = acts[m].o[k];
        if (v > top) {
          second = top;
          top = v;
          argmax[static_cast<std::size_t>(k)] = m;
        } else if (v > second) {
          second = v;
        }
      }
      if (acts.size() > 1 && top - second <= 1e-9 * (1.0 + std::abs(top))) ++g.ties;
    }
    for (std::size_t m = 0; m < acts.size(); ++m) {
      RowVector go = RowVector::Zero(dm);
      for (Eigen::Index k = 0; k < dm; ++k)
        if (argmax[static_cast<std::size_t>(k)] == m) go[k] = 1.0;
      if (go.isZero()) continue;
      const auto& act = acts[m];
      g.dW2 += act.s.transpose() * go;
      g.db2 += go;
      const RowVector ds = go * params.W2.transpose();
      const RowVector da = ds.cwiseProduct(act.a.unaryExpr([](double v) { return silu_grad(v); }));
      g.dW1 += act.z.transpose() * da;
      g.db1 += da;
      const RowVector dz = da * params.W1.transpose();
      const RowVector dxw = dz.head(dm);
      g.dW += X.row(i).transpose() * dxw;
      g.dX.row(i) += dxw * params.W.transpose();
    }
  }
  return g;
}

AttentionGrads attention_backward(const Matrix& X, const Adjacency& A, const AttentionParams& params,
                                  const LayerOptions& opts) {
  check_attention(X, A, params);
  const auto n = X.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(X.cols()));
  const Matrix alpha = attention_weights(X, A, opts);
  const Eigen::VectorXd v_sum = params.V.rowwise().sum();  // d_in
  const Eigen::VectorXd value = X * v_sum;                 // per node scalar x_j . V 1

  AttentionGrads g;
  // dL/dV[r][c] = sum_i sum_j alpha_ij X_jr, identical across columns.
  const Eigen::VectorXd col = X.transpose() * alpha.colwise().sum().transpose();
  g.dV = col.replicate(1, params.V.cols());
  g.dX = alpha.colwise().sum().transpose() * v_sum.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean_value = alpha.row(i).dot(value);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = alpha(i, j);
      if (a == 0.0) continue;
      const double dlogit = a * (value[j] - mean_value) * scale;
      g.dX.row(i) += dlogit * X.row(j);
      g.dX.row(j) += dlogit * X.row(i);
    }
  }
  return g;
}

namespace {

template <typename Loss>
void finite_difference(Matrix& target, const Matrix& analytic, double eps, const Loss& loss, GradientCheck& out) {
  for (Eigen::Index r = 0; r < target.rows(); ++r) {
    for (Eigen::Index c = 0; c < target.cols(); ++c) {
      const double saved = target(r, c);
      target(r, c) = saved + eps;
      const double up = loss();
      target(r, c) = saved - eps;
      const double down = loss();
      target(r, c) = saved;
      const double numeric = (up - down) / (2.0 * eps);
      if (!std::isfinite(numeric) || !std::isfinite(analytic(r, c)))
        fail(ErrorKind::Numeric, "non-finite gradient encountered");
      const double err = std::abs(numeric - analytic(r, c)) / (std::abs(analytic(r, c)) + 1e-8);
      out.max_relative_error = std::max(out.max_relative_error, err);
      ++out.checked;
    }
  }
}

// Smallest gap between the best and second-best neighbour per output channel.
double min_max_gap(const Matrix& X, const Matrix& P, const Adjacency& A, const PointNetParams& params,
                   const LayerOptions& opts) {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const RowVector xw = X.row(i) * params.W;
    const auto nbrs = neighborhood(A, i, opts);
    if (nbrs.size() < 2) continue;
    Matrix outs(static_cast<Eigen::Index>(nbrs.size()), params.d_model());
    for (std::size_t m = 0; m < nbrs.size(); ++m)
      outs.row(static_cast<Eigen::Index>(m)) = pointnet_pair(xw, P, i, nbrs[m], params).o;
    for (Eigen::Index k = 0; k < outs.cols(); ++k) {
      Eigen::VectorXd col = outs.col(k);
      std::sort(col.data(), col.data() + col.size(), std::greater<double>());
      gap = std::min(gap, col[0] - col[1]);
    }
  }
  return gap;
}

}  // namespace

GradientCheck check_pointnet_gradient(const Matrix& X, const Matrix& P, const Adjacency& A,
                                      const PointNetParams& params, double eps, const LayerOptions& opts) {
  const PointNetGrads analytic = pointnet_backward(X, P, A, params, opts);
  GradientCheck out;
  out.ties = analytic.ties;
  // A perturbation of eps can move a channel across a kink when the top two
  // candidates are closer than this margin.
  if (analytic.ties > 0 || min_max_gap(X, P, A, params, opts) < 1e-4) {
    out.ties = std::max<std::size_t>(out.ties, 1);
    out.skipped = true;
    return out;
  }
  Matrix x = X;
  PointNetParams p = params;
  auto loss = [&] { return pointnet_forward(x, P, A, p, opts).sum(); };
  finite_difference(p.W, analytic.dW, eps, loss, out);
  finite_difference(p.W2, analytic.dW2, eps, loss, out);
  finite_difference(p.W1, analytic.dW1, eps, loss, out);
  Matrix b1 = p.b1;
  Matrix b2 = p.b2;
  auto loss_b1 = [&] {
    p.b1 = b1.row(0);
    return loss();
  };
  finite_difference(b1, Matrix(analytic.db1), eps, loss_b1, out);
  p.b1 = b1.row(0);
  auto loss_b2 = [&] {
    p.b2 = b2.row(0);
    return loss();
  };
  finite_difference(b2, Matrix(analytic.db2), eps, loss_b2, out);
  p.b2 = b2.row(0);
  finite_difference(x, analytic.dX, eps, loss, out);
  return out;
}

GradientCheck check_attention_gradient(const Matrix& X, const Adjacency& A, const AttentionParams& params,
                                       double eps, const LayerOptions& opts) {
  const AttentionGrads analytic = attention_backward(X, A, params, opts);
  GradientCheck out;
  Matrix x = X;
  AttentionParams p = params;
  auto loss = [&] { return attention_forward(x, A, p, opts).sum(); };
  finite_difference(p.V, analytic.dV, eps, loss, out);
  finite_difference(x, analytic.dX, eps, loss, out);
  return out;
}

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale) {
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = scale * (2.0 * rng.uniform() - 1.0);
  return m;
}

}  // namespace

PointNetParams random_pointnet(Eigen::Index d_in, Eigen::Index d_model, Eigen::Index hidden, std::uint64_t seed,
                               double scale) {
  Rng rng(seed);
  PointNetParams p;
  p.W = random_matrix(d_in, d_model, rng, scale);
  p.W1 = random_matrix(d_model + 3, hidden, rng, scale);
  p.b1 = random_matrix(1, hidden, rng, scale).row(0);
  p.W2 = random_matrix(hidden, d_model, rng, scale);
  p.b2 = random_matrix(1, d_model, rng, scale).row(0);
  return p;
}

AttentionParams random_attention(Eigen::Index d_in, Eigen::Index d_model, std::uint64_t seed, double scale) {
  Rng rng(seed);
  return {random_matrix(d_in, d_model, rng, scale)};
}

Matrix pointnet_stack_forward(const Matrix& X, const Matrix& P, const Adjacency& A,
                              const std::vector<PointNetParams>& layers, const LayerOptions& opts) {
  Matrix h = X;
  for (const auto& layer : layers) h = pointnet_forward(h, P, A, layer, opts);
  return h;
}

}  // namespace forge::gs
