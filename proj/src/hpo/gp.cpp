#include "hpo/gp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mipred::hpo {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("gp: " + msg);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, double amplitude2, double lengthscale) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd k(n, n);
    const double inv = 1.0 / (2.0 * lengthscale * lengthscale);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = amplitude2;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d2 = (x.row(i) - x.row(j)).squaredNorm();
            k(i, j) = k(j, i) = amplitude2 * std::exp(-d2 * inv);
        }
    }
    return k;
}

struct Factorization {
    bool ok = false;
    double nugget = 0.0;
    Eigen::MatrixXd lower;
};

// Cholesky with jitter escalation: starts at zero and raises the diagonal in
// decades (scaled by the signal variance) until the factorization succeeds.
Factorization factor_with_nugget(const Eigen::MatrixXd& k, double amplitude2) {
    static const double kLadder[] = {0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2};
    Factorization result;
    for (double step : kLadder) {
        const double nugget = step * amplitude2;
        Eigen::MatrixXd shifted = k;
        shifted.diagonal().array() += nugget;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() == Eigen::Success) {
            result.ok = true;
            result.nugget = nugget;
            result.lower = llt.matrixL();
            return result;
        }
    }
    return result;
}

double log_marginal_likelihood(const Eigen::MatrixXd& lower, const Eigen::VectorXd& centered,
                               const Eigen::VectorXd& alpha) {
    const double n = static_cast<double>(centered.size());
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < lower.rows(); ++i) log_det += std::log(lower(i, i));
    return -0.5 * centered.dot(alpha) - log_det - 0.5 * n * std::log(2.0 * M_PI);
}

}  // namespace

GpModel gp_fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, double noise) {
    if (inputs.rows() != targets.size()) fail("one target per input row required");
    if (inputs.rows() < 2) fail("at least 2 observations required");
    if (noise < 0.0) fail("noise variance must be non-negative");
    double max_d2 = 0.0;
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < inputs.rows(); ++j) {
            max_d2 = std::max(max_d2, (inputs.row(i) - inputs.row(j)).squaredNorm());
        }
    }
    if (max_d2 == 0.0) fail("degenerate data: all inputs coincide");

    const double mean = targets.mean();
    const Eigen::VectorXd centered = targets.array() - mean;
    const double variance =
        std::max(centered.squaredNorm() / static_cast<double>(centered.size()), 1e-12);

    // Log-spaced grids over lengthscale and signal variance.
    std::vector<double> lengthscales;
    for (int i = 0; i < 24; ++i) {
        const double t = static_cast<double>(i) / 23.0;
        lengthscales.push_back(std::exp(std::log(0.05) + t * (std::log(3.0) - std::log(0.05))));
    }
    static const double kAmplitudeFactors[] = {0.1, 0.3, 1.0, 3.0, 10.0};

    GpModel best;
    double best_lml = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (double ls : lengthscales) {
        for (double factor : kAmplitudeFactors) {
            const double amplitude2 = factor * variance;
            Eigen::MatrixXd k = kernel_matrix(inputs, amplitude2, ls);
            k.diagonal().array() += noise;
            const Factorization f = factor_with_nugget(k, amplitude2);
            if (!f.ok) continue;
            const Eigen::VectorXd alpha =
                f.lower.transpose().triangularView<Eigen::Upper>().solve(
                    f.lower.triangularView<Eigen::Lower>().solve(centered));
            const double lml = log_marginal_likelihood(f.lower, centered, alpha);
            if (!std::isfinite(lml) || lml <= best_lml) continue;
            best_lml = lml;
            best.amplitude2 = amplitude2;
            best.lengthscale = ls;
            best.nugget = f.nugget;
            best.chol_lower = f.lower;
            best.alpha = alpha;
            found = true;
        }
    }
    if (!found) fail("no kernel configuration factorized");
    best.inputs = inputs;
    best.targets = targets;
    best.target_mean = mean;
    best.noise = noise;
    return best;
}

std::pair<double, double> gp_posterior(const GpModel& model, const Eigen::VectorXd& query) {
    if (model.inputs.size() == 0) fail("posterior queried before fit");
    if (query.size() != model.inputs.cols()) fail("query dimension mismatch");
    const Eigen::Index n = model.inputs.rows();
    Eigen::VectorXd k_star(n);
    const double inv = 1.0 / (2.0 * model.lengthscale * model.lengthscale);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d2 = (model.inputs.row(i).transpose() - query).squaredNorm();
        k_star(i) = model.amplitude2 * std::exp(-d2 * inv);
    }
    const double mean = model.target_mean + k_star.dot(model.alpha);
    const Eigen::VectorXd v = model.chol_lower.triangularView<Eigen::Lower>().solve(k_star);
    double variance = model.amplitude2 - v.squaredNorm();
    if (variance < 0.0) variance = 0.0;
    return {mean, std::sqrt(variance)};
}

}  // namespace mipred::hpo
