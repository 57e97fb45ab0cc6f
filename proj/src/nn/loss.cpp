#include "nn/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace mipred::nn {

double softplus(double z) {
    // log(1+e^z) = max(z,0) + log1p(e^{-|z|}).
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double bce_with_logits(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& labels,
                       const Eigen::VectorXd& positive_weights, Eigen::MatrixXd* gradient,
                       Eigen::VectorXd* per_label) {
    if (logits.rows() != labels.rows() || logits.cols() != labels.cols())
        throw std::runtime_error("loss: logits and labels have different shapes");
    if (positive_weights.size() != logits.cols())
        throw std::runtime_error("loss: one positive weight per label required");
    if (logits.rows() == 0) throw std::runtime_error("loss: empty batch");

    const Eigen::Index batch = logits.rows();
    const Eigen::Index label_count = logits.cols();
    if (gradient) gradient->setZero(batch, label_count);
    Eigen::VectorXd label_means = Eigen::VectorXd::Zero(label_count);

    for (Eigen::Index l = 0; l < label_count; ++l) {
        const double w = positive_weights(l);
        double sum = 0.0;
        for (Eigen::Index b = 0; b < batch; ++b) {
            const double z = logits(b, l);
            const double y = labels(b, l);
            sum += w * y * softplus(-z) + (1.0 - y) * softplus(z);
            if (gradient) {
                // d/dz [w*y*softplus(-z) + (1-y)*softplus(z)]
                //   = (1-y)*sigmoid(z) - w*y*sigmoid(-z), averaged over the batch.
                (*gradient)(b, l) =
                    ((1.0 - y) * sigmoid(z) - w * y * sigmoid(-z)) / static_cast<double>(batch);
            }
        }
        label_means(l) = sum / static_cast<double>(batch);
    }
    if (per_label) *per_label = label_means;
    return label_means.sum();
}

}  // namespace mipred::nn
