#pragma once

#include <Eigen/Dense>

namespace mipred::nn {

// Multi-label binary cross entropy evaluated directly on logits in the
// log-sum-exp form, so saturated logits never overflow or hit log(0).
// Per element with logit z, label y and positive-class weight w:
//   loss = w*y*softplus(-z) + (1-y)*softplus(z)
// The total is the sum over labels of the per-label batch mean. When
// `per_label` is given it receives the 7 per-label means; when `gradient` is
// given it receives d(total)/d(logits) with the same shape as `logits`.
double bce_with_logits(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& labels,
                       const Eigen::VectorXd& positive_weights,
                       Eigen::MatrixXd* gradient = nullptr,
                       Eigen::VectorXd* per_label = nullptr);

// softplus(z) = log(1 + exp(z)) without overflow.
double softplus(double z);

// Numerically safe logistic sigmoid.
double sigmoid(double z);

}  // namespace mipred::nn
