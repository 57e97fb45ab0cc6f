#include "nn/network.hpp"

#include <cmath>
#include <stdexcept>

#include "util/rng.hpp"

namespace mipred::nn {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("network: " + msg);
}

// Source index in the input signal for output position t, kernel slot k.
// Returns -1 when the slot falls into zero padding.
int window_source(int t, int k, int stride, int padding, int in_length) {
    const int src = t * stride + k - padding;
    return (src >= 0 && src < in_length) ? src : -1;
}

}  // namespace

LayerSpec LayerSpec::dense(int out_width) {
    LayerSpec s;
    s.kind = LayerKind::Dense;
    s.out_width = out_width;
    return s;
}

LayerSpec LayerSpec::conv1d(int in_channels, int out_channels, int kernel, int stride,
                            int padding) {
    LayerSpec s;
    s.kind = LayerKind::Conv1d;
    s.in_channels = in_channels;
    s.out_channels = out_channels;
    s.kernel = kernel;
    s.stride = stride;
    s.padding = padding;
    return s;
}

LayerSpec LayerSpec::maxpool1d(int kernel, int stride, int padding) {
    LayerSpec s;
    s.kind = LayerKind::MaxPool1d;
    s.kernel = kernel;
    s.stride = stride;
    s.padding = padding;
    return s;
}

LayerSpec LayerSpec::flatten() {
    LayerSpec s;
    s.kind = LayerKind::Flatten;
    return s;
}

LayerSpec LayerSpec::dropout(double rate) {
    LayerSpec s;
    s.kind = LayerKind::Dropout;
    s.rate = rate;
    return s;
}

std::string LayerSpec::describe() const {
    char buf[96];
    switch (kind) {
        case LayerKind::Dense:
            std::snprintf(buf, sizeof(buf), "dense(%d)", out_width);
            break;
        case LayerKind::Conv1d:
            std::snprintf(buf, sizeof(buf), "conv1d(%d,%d,k=%d,s=%d,p=%d)", in_channels,
                          out_channels, kernel, stride, padding);
            break;
        case LayerKind::MaxPool1d:
            std::snprintf(buf, sizeof(buf), "maxpool1d(k=%d,s=%d,p=%d)", kernel, stride, padding);
            break;
        case LayerKind::Flatten:
            std::snprintf(buf, sizeof(buf), "flatten");
            break;
        case LayerKind::Dropout:
            std::snprintf(buf, sizeof(buf), "dropout(%g)", rate);
            break;
    }
    return buf;
}

int window_output_length(int length, int kernel, int stride, int padding) {
    if (kernel < 1 || stride < 1 || padding < 0) fail("window needs kernel>=1, stride>=1, pad>=0");
    const int span = length + 2 * padding - kernel;
    if (span < 0) return 0;
    return span / stride + 1;
}

std::vector<StageShape> NetworkSpec::stage_shapes() const {
    if (input_width < 1) fail("input width must be positive");
    if (layers.empty()) fail("network has no layers");
    std::vector<StageShape> shapes;
    shapes.push_back({1, input_width});
    for (size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        StageShape cur = shapes.back();
        const std::string where = "layer " + std::to_string(i) + " " + l.describe();
        switch (l.kind) {
            case LayerKind::Dense:
                if (cur.channels != 1)
                    fail(where + ": dense input must be flat, got " +
                         std::to_string(cur.channels) + " channels (insert flatten)");
                if (l.out_width < 1) fail(where + ": output width must be positive");
                cur = {1, l.out_width};
                break;
            case LayerKind::Conv1d: {
                if (l.in_channels != cur.channels)
                    fail(where + ": expects " + std::to_string(l.in_channels) +
                         " input channels, got " + std::to_string(cur.channels));
                if (l.out_channels < 1) fail(where + ": output channels must be positive");
                const int out_len = window_output_length(cur.length, l.kernel, l.stride,
                                                         l.padding);
                if (out_len < 1)
                    fail(where + ": output length is zero for input length " +
                         std::to_string(cur.length));
                cur = {l.out_channels, out_len};
                break;
            }
            case LayerKind::MaxPool1d: {
                if (l.padding > l.kernel - 1)
                    fail(where + ": pooling padding must be at most kernel-1");
                const int out_len = window_output_length(cur.length, l.kernel, l.stride,
                                                         l.padding);
                if (out_len < 1)
                    fail(where + ": output length is zero for input length " +
                         std::to_string(cur.length));
                cur = {cur.channels, out_len};
                break;
            }
            case LayerKind::Flatten:
                cur = {1, cur.width()};
                break;
            case LayerKind::Dropout:
                if (l.rate < 0.0 || l.rate >= 1.0) fail(where + ": rate must be in [0, 1)");
                break;
        }
        shapes.push_back(cur);
    }
    return shapes;
}

int NetworkSpec::output_width() const {
    return stage_shapes().back().width();
}

int NetworkSpec::last_parametric_index() const {
    for (int i = static_cast<int>(layers.size()) - 1; i >= 0; --i) {
        if (layers[i].parametric()) return i;
    }
    return -1;
}

void NetworkSpec::validate() const {
    const std::vector<StageShape> shapes = stage_shapes();
    if (last_parametric_index() < 0) fail("network has no weight-bearing layer");
    if (shapes.back().channels != 1)
        fail("network output must be flat, got " + std::to_string(shapes.back().channels) +
             " channels");
}

std::vector<LayerParams> zero_parameters(const NetworkSpec& spec) {
    const std::vector<StageShape> shapes = spec.stage_shapes();
    std::vector<LayerParams> params(spec.layers.size());
    for (size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        if (l.kind == LayerKind::Dense) {
            params[i].weight = Eigen::MatrixXd::Zero(l.out_width, shapes[i].width());
            params[i].bias = Eigen::VectorXd::Zero(l.out_width);
        } else if (l.kind == LayerKind::Conv1d) {
            params[i].weight = Eigen::MatrixXd::Zero(l.out_channels, l.in_channels * l.kernel);
            params[i].bias = Eigen::VectorXd::Zero(l.out_channels);
        }
    }
    return params;
}

std::vector<LayerParams> initialize_parameters(const NetworkSpec& spec, std::mt19937_64& rng) {
    std::vector<LayerParams> params = zero_parameters(spec);
    for (LayerParams& p : params) {
        if (p.weight.size() == 0) continue;
        const double limit = std::sqrt(6.0 / static_cast<double>(p.weight.cols()));
        for (Eigen::Index r = 0; r < p.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < p.weight.cols(); ++c) {
                p.weight(r, c) = (2.0 * util::uniform01(rng) - 1.0) * limit;
            }
        }
    }
    return params;
}

namespace {

// Gathers conv patches: row b*out_len+t holds the receptive field of output
// position t for sample b, channel-major (column c*kernel+k).
Eigen::MatrixXd im2col(const Eigen::MatrixXd& x, const StageShape& in, const LayerSpec& l,
                       int out_len) {
    const Eigen::Index batch = x.rows();
    Eigen::MatrixXd patches = Eigen::MatrixXd::Zero(batch * out_len, in.channels * l.kernel);
    for (Eigen::Index b = 0; b < batch; ++b) {
        for (int t = 0; t < out_len; ++t) {
            const Eigen::Index row = b * out_len + t;
            for (int k = 0; k < l.kernel; ++k) {
                const int src = window_source(t, k, l.stride, l.padding, in.length);
                if (src < 0) continue;
                for (int c = 0; c < in.channels; ++c) {
                    patches(row, c * l.kernel + k) = x(b, c * in.length + src);
                }
            }
        }
    }
    return patches;
}

}  // namespace

Eigen::MatrixXd forward(const NetworkSpec& spec, const std::vector<LayerParams>& params,
                        const Eigen::MatrixXd& features, ForwardMode mode, std::mt19937_64* rng,
                        ForwardCache* cache) {
    const std::vector<StageShape> shapes = spec.stage_shapes();
    if (params.size() != spec.layers.size()) fail("parameter list does not match layer list");
    if (features.cols() != spec.input_width)
        fail("input has width " + std::to_string(features.cols()) + ", network expects " +
             std::to_string(spec.input_width));
    const int last_param = spec.last_parametric_index();
    const Eigen::Index batch = features.rows();

    if (cache) {
        cache->inputs.assign(spec.layers.size(), {});
        cache->pre_activation.assign(spec.layers.size(), {});
        cache->pool_argmax.assign(spec.layers.size(), {});
        cache->dropout_mask.assign(spec.layers.size(), {});
    }

    Eigen::MatrixXd cur = features;
    for (size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        const StageShape& in = shapes[i];
        const StageShape& out = shapes[i + 1];
        if (cache) cache->inputs[i] = cur;
        switch (l.kind) {
            case LayerKind::Dense: {
                Eigen::MatrixXd pre = (cur * params[i].weight.transpose()).rowwise() +
                                      params[i].bias.transpose();
                if (cache) cache->pre_activation[i] = pre;
                cur = (static_cast<int>(i) == last_param) ? pre : pre.cwiseMax(0.0);
                break;
            }
            case LayerKind::Conv1d: {
                const Eigen::MatrixXd patches = im2col(cur, in, l, out.length);
                const Eigen::MatrixXd flat = (patches * params[i].weight.transpose()).rowwise() +
                                             params[i].bias.transpose();
                Eigen::MatrixXd pre(batch, out.width());
                for (Eigen::Index b = 0; b < batch; ++b) {
                    for (int o = 0; o < out.channels; ++o) {
                        for (int t = 0; t < out.length; ++t) {
                            pre(b, o * out.length + t) = flat(b * out.length + t, o);
                        }
                    }
                }
                if (cache) cache->pre_activation[i] = pre;
                cur = (static_cast<int>(i) == last_param) ? pre : pre.cwiseMax(0.0);
                break;
            }
            case LayerKind::MaxPool1d: {
                Eigen::MatrixXd pooled(batch, out.width());
                Eigen::MatrixXi argmax(batch, out.width());
                for (Eigen::Index b = 0; b < batch; ++b) {
                    for (int c = 0; c < out.channels; ++c) {
                        for (int t = 0; t < out.length; ++t) {
                            double best = 0.0;
                            int best_col = -1;
                            for (int k = 0; k < l.kernel; ++k) {
                                const int src =
                                    window_source(t, k, l.stride, l.padding, in.length);
                                if (src < 0) continue;
                                const int col = c * in.length + src;
                                if (best_col < 0 || cur(b, col) > best) {
                                    best = cur(b, col);
                                    best_col = col;
                                }
                            }
                            pooled(b, c * out.length + t) = best;
                            argmax(b, c * out.length + t) = best_col;
                        }
                    }
                }
                if (cache) cache->pool_argmax[i] = argmax;
                cur = std::move(pooled);
                break;
            }
            case LayerKind::Flatten:
                break;  // channel-major layout already matches flattened order
            case LayerKind::Dropout: {
                if (mode == ForwardMode::Eval || l.rate == 0.0) break;
                if (!rng) fail("training-mode dropout needs a random stream");
                const double keep = 1.0 - l.rate;
                Eigen::MatrixXd mask(cur.rows(), cur.cols());
                for (Eigen::Index r = 0; r < mask.rows(); ++r) {
                    for (Eigen::Index c = 0; c < mask.cols(); ++c) {
                        mask(r, c) = util::uniform01(*rng) < keep ? 1.0 / keep : 0.0;
                    }
                }
                cur = cur.cwiseProduct(mask);
                if (cache) cache->dropout_mask[i] = std::move(mask);
                break;
            }
        }
    }
    if (cache) cache->output = cur;
    return cur;
}

std::vector<LayerParams> backward(const NetworkSpec& spec, const std::vector<LayerParams>& params,
                                  const ForwardCache& cache,
                                  const Eigen::MatrixXd& logit_gradient) {
    const std::vector<StageShape> shapes = spec.stage_shapes();
    if (cache.inputs.size() != spec.layers.size()) fail("backward needs a cached forward pass");
    const int last_param = spec.last_parametric_index();
    const Eigen::Index batch = logit_gradient.rows();

    std::vector<LayerParams> grads(spec.layers.size());
    Eigen::MatrixXd d = logit_gradient;
    for (int i = static_cast<int>(spec.layers.size()) - 1; i >= 0; --i) {
        const LayerSpec& l = spec.layers[i];
        const StageShape& in = shapes[i];
        const StageShape& out = shapes[i + 1];
        switch (l.kind) {
            case LayerKind::Dense: {
                Eigen::MatrixXd d_pre =
                    (i == last_param)
                        ? d
                        : d.cwiseProduct((cache.pre_activation[i].array() > 0.0).cast<double>()
                                             .matrix());
                grads[i].weight = d_pre.transpose() * cache.inputs[i];
                grads[i].bias = d_pre.colwise().sum();
                d = d_pre * params[i].weight;
                break;
            }
            case LayerKind::Conv1d: {
                Eigen::MatrixXd d_pre =
                    (i == last_param)
                        ? d
                        : d.cwiseProduct((cache.pre_activation[i].array() > 0.0).cast<double>()
                                             .matrix());
                // Back to im2col coordinates: row b*out_len+t, column o.
                Eigen::MatrixXd d_flat(batch * out.length, out.channels);
                for (Eigen::Index b = 0; b < batch; ++b) {
                    for (int o = 0; o < out.channels; ++o) {
                        for (int t = 0; t < out.length; ++t) {
                            d_flat(b * out.length + t, o) = d_pre(b, o * out.length + t);
                        }
                    }
                }
                const Eigen::MatrixXd patches = im2col(cache.inputs[i], in, l, out.length);
                grads[i].weight = d_flat.transpose() * patches;
                grads[i].bias = d_flat.colwise().sum();
                const Eigen::MatrixXd d_patches = d_flat * params[i].weight;
                Eigen::MatrixXd d_in = Eigen::MatrixXd::Zero(batch, in.width());
                for (Eigen::Index b = 0; b < batch; ++b) {
                    for (int t = 0; t < out.length; ++t) {
                        const Eigen::Index row = b * out.length + t;
                        for (int k = 0; k < l.kernel; ++k) {
                            const int src = window_source(t, k, l.stride, l.padding, in.length);
                            if (src < 0) continue;
                            for (int c = 0; c < in.channels; ++c) {
                                d_in(b, c * in.length + src) += d_patches(row, c * l.kernel + k);
                            }
                        }
                    }
                }
                d = std::move(d_in);
                break;
            }
            case LayerKind::MaxPool1d: {
                const Eigen::MatrixXi& argmax = cache.pool_argmax[i];
                Eigen::MatrixXd d_in = Eigen::MatrixXd::Zero(batch, in.width());
                for (Eigen::Index b = 0; b < batch; ++b) {
                    for (int j = 0; j < out.width(); ++j) {
                        d_in(b, argmax(b, j)) += d(b, j);
                    }
                }
                d = std::move(d_in);
                break;
            }
            case LayerKind::Flatten:
                break;
            case LayerKind::Dropout:
                if (cache.dropout_mask[i].size() > 0) d = d.cwiseProduct(cache.dropout_mask[i]);
                break;
        }
    }
    return grads;
}

}  // namespace mipred::nn
