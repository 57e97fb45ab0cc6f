#pragma once

#include <Eigen/Dense>
#include <utility>

namespace mipred::hpo {

// Gaussian-process surrogate with a squared-exponential kernel over unit-cube
// coordinates:  k(x, x') = amplitude2 * exp(-|x - x'|^2 / (2 lengthscale^2)).
// Kernel hyperparameters come from a log-marginal-likelihood grid search; the
// Cholesky factorization escalates a diagonal jitter until it succeeds.
struct GpModel {
    Eigen::MatrixXd inputs;   // n x d, each row in [0,1]^d
    Eigen::VectorXd targets;  // raw objective values
    double target_mean = 0.0;
    double amplitude2 = 1.0;
    double lengthscale = 1.0;
    double noise = 0.0;       // observation noise variance supplied by caller
    double nugget = 0.0;      // extra jitter actually added to the diagonal
    Eigen::MatrixXd chol_lower;  // L with L L^T = K + (noise + nugget) I
    Eigen::VectorXd alpha;        // (K + (noise+nugget) I)^{-1} (y - mean)

    int dimension() const { return static_cast<int>(inputs.cols()); }
};

GpModel gp_fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, double noise);

// Predictive mean and standard deviation of the latent function at `query`.
// Variance is clamped at zero (tiny negative values are factorization noise).
std::pair<double, double> gp_posterior(const GpModel& model, const Eigen::VectorXd& query);

}  // namespace mipred::hpo
