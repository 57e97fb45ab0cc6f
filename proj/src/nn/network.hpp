#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mipred::nn {

// Layer vocabulary for the classifier networks. Activations flow through the
// stack as row-major batches: one row per sample, channel-major columns for
// convolutional stages (channel c of a length-L signal occupies columns
// [c*L, (c+1)*L)). Flatten is therefore a pure shape reinterpretation.
enum class LayerKind { Dense, Conv1d, MaxPool1d, Flatten, Dropout };

struct LayerSpec {
    LayerKind kind = LayerKind::Dense;
    // Dense.
    int out_width = 0;
    // Conv1d / MaxPool1d (pooling ignores the channel fields).
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 0;
    int stride = 1;
    int padding = 0;
    // Dropout.
    double rate = 0.0;

    static LayerSpec dense(int out_width);
    static LayerSpec conv1d(int in_channels, int out_channels, int kernel, int stride,
                            int padding);
    static LayerSpec maxpool1d(int kernel, int stride, int padding);
    static LayerSpec flatten();
    static LayerSpec dropout(double rate);

    bool parametric() const { return kind == LayerKind::Dense || kind == LayerKind::Conv1d; }
    std::string describe() const;
};

// Shape of the signal between layers: `channels` x `length`. Dense stages are
// represented as 1 x width.
struct StageShape {
    int channels = 1;
    int length = 0;
    int width() const { return channels * length; }
};

// Output length of a sliding window: floor((L + 2p - k) / s) + 1.
int window_output_length(int length, int kernel, int stride, int padding);

struct NetworkSpec {
    int input_width = 0;
    std::vector<LayerSpec> layers;

    // Validates the chain and returns the shape after every layer (element i
    // is the output shape of layer i; a leading entry holds the input shape).
    std::vector<StageShape> stage_shapes() const;
    int output_width() const;
    // Index of the last weight-bearing layer (-1 when none); ReLU is applied
    // after every weight-bearing layer before this one, while this one emits
    // raw logits.
    int last_parametric_index() const;
    void validate() const;
};

// Learned parameters for one layer. Dense: weight is (out x in). Conv1d:
// weight is (out_channels x in_channels*kernel), row o holding channel-major
// kernel slices. Non-parametric layers keep both empty.
struct LayerParams {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;
};

// Everything backward needs from the matching forward pass.
struct ForwardCache {
    std::vector<Eigen::MatrixXd> inputs;        // input batch of each layer
    std::vector<Eigen::MatrixXd> pre_activation; // parametric layers only
    std::vector<Eigen::MatrixXi> pool_argmax;    // maxpool layers only
    std::vector<Eigen::MatrixXd> dropout_mask;   // dropout layers only (already scaled)
    Eigen::MatrixXd output;                      // logits
};

enum class ForwardMode { Train, Eval };

// Allocates parameter storage shaped for `spec` with He-uniform weights
// (limit sqrt(6/fan_in)) and zero biases, drawn deterministically from `rng`.
std::vector<LayerParams> initialize_parameters(const NetworkSpec& spec, std::mt19937_64& rng);
std::vector<LayerParams> zero_parameters(const NetworkSpec& spec);

// Runs the batch through the network. `features` is (batch x input_width),
// already scaled. Train mode draws dropout masks from `rng` (required when the
// spec contains a dropout layer with positive rate); eval mode never touches
// it. When `cache` is given, intermediates are stored for backward.
Eigen::MatrixXd forward(const NetworkSpec& spec, const std::vector<LayerParams>& params,
                        const Eigen::MatrixXd& features, ForwardMode mode,
                        std::mt19937_64* rng = nullptr, ForwardCache* cache = nullptr);

// Reverse-mode gradients for every parameter given d(loss)/d(logits).
// Returns per-layer gradients aligned with `params`.
std::vector<LayerParams> backward(const NetworkSpec& spec, const std::vector<LayerParams>& params,
                                  const ForwardCache& cache,
                                  const Eigen::MatrixXd& logit_gradient);

}  // namespace mipred::nn
