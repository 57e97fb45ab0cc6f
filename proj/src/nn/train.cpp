#include "nn/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nn/loss.hpp"
#include "util/rng.hpp"

namespace mipred::nn {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("training: " + msg);
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct AdamState {
    std::vector<LayerParams> m;
    std::vector<LayerParams> v;
    long step = 0;
};

void adam_update(std::vector<LayerParams>& params, const std::vector<LayerParams>& grads,
                 AdamState& state, const TrainConfig& cfg) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    auto step_one = [&](auto& p, const auto& g, auto& m, auto& v) {
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = (cfg.beta2 * v.array() + (1.0 - cfg.beta2) * g.array().square()).matrix();
        p.array() -=
            cfg.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.adam_epsilon);
    };
    for (size_t i = 0; i < params.size(); ++i) {
        if (params[i].weight.size() == 0) continue;
        step_one(params[i].weight, grads[i].weight, state.m[i].weight, state.v[i].weight);
        step_one(params[i].bias, grads[i].bias, state.m[i].bias, state.v[i].bias);
    }
}

}  // namespace

void TrainConfig::validate(int label_count) const {
    if (epochs < 1) fail("epochs must be at least 1");
    if (!(learning_rate > 0.0)) fail("learning rate must be positive");
    if (batch_size < 0) fail("batch size must be non-negative (0 = full batch)");
    if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0))
        fail("Adam betas must lie in (0, 1)");
    if (!(adam_epsilon > 0.0)) fail("Adam epsilon must be positive");
    if (!positive_weights.empty()) {
        if (static_cast<int>(positive_weights.size()) != label_count)
            fail("positive weights must list one value per label");
        for (double w : positive_weights) {
            if (!(w > 0.0)) fail("positive weights must be positive");
        }
    }
}

TrainedModel train_network(const NetworkSpec& spec, const Eigen::MatrixXd& features,
                           const Eigen::MatrixXd& labels,
                           const std::vector<std::string>& label_names, double feature_scale,
                           const TrainConfig& config) {
    spec.validate();
    const int label_count = static_cast<int>(label_names.size());
    if (label_count < 1) fail("at least one label required");
    if (spec.output_width() != label_count)
        fail("network emits " + std::to_string(spec.output_width()) + " outputs for " +
             std::to_string(label_count) + " labels");
    if (features.rows() != labels.rows()) fail("feature and label row counts differ");
    if (features.rows() == 0) fail("training split is empty");
    if (features.cols() != spec.input_width) fail("feature width does not match network input");
    if (labels.cols() != label_count) fail("label matrix width does not match label names");
    if (!(feature_scale > 0.0)) fail("feature scale must be positive");
    for (Eigen::Index r = 0; r < labels.rows(); ++r) {
        for (Eigen::Index c = 0; c < labels.cols(); ++c) {
            if (labels(r, c) != 0.0 && labels(r, c) != 1.0) fail("labels must be 0 or 1");
        }
    }
    config.validate(label_count);

    Eigen::VectorXd weights = Eigen::VectorXd::Ones(label_count);
    for (size_t i = 0; i < config.positive_weights.size(); ++i)
        weights(static_cast<Eigen::Index>(i)) = config.positive_weights[i];

    // Independent deterministic streams for initialization, batch order and
    // dropout, all derived from the one config seed.
    std::uint64_t seed_state = config.seed;
    std::mt19937_64 init_rng(util::splitmix64(seed_state));
    std::mt19937_64 shuffle_rng(util::splitmix64(seed_state));
    std::mt19937_64 dropout_rng(util::splitmix64(seed_state));

    TrainedModel model;
    model.spec = spec;
    model.label_names = label_names;
    model.feature_scale = feature_scale;
    model.train_feature_max = features.size() > 0 ? features.maxCoeff() : 0.0;
    model.params = initialize_parameters(spec, init_rng);
    model.loss_log.reserve(static_cast<size_t>(config.epochs));

    const Eigen::MatrixXd scaled = features / feature_scale;
    const Eigen::Index n = scaled.rows();
    const Eigen::Index chunk =
        (config.batch_size == 0 || config.batch_size >= n) ? n : config.batch_size;

    AdamState adam;
    adam.m = zero_parameters(spec);
    adam.v = zero_parameters(spec);

    std::vector<int> order(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = static_cast<int>(i);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double epoch_loss = 0.0;
        if (chunk == n) {
            ForwardCache cache;
            forward(spec, model.params, scaled, ForwardMode::Train, &dropout_rng, &cache);
            Eigen::MatrixXd grad;
            epoch_loss = bce_with_logits(cache.output, labels, weights, &grad);
            if (!std::isfinite(epoch_loss))
                fail("loss diverged to a non-finite value at epoch " + std::to_string(epoch + 1) +
                     "; lower the learning rate");
            adam_update(model.params, backward(spec, model.params, cache, grad), adam, config);
        } else {
            for (Eigen::Index i = n - 1; i > 0; --i) {
                const Eigen::Index j = static_cast<Eigen::Index>(
                    util::uniform01(shuffle_rng) * static_cast<double>(i + 1));
                std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
            }
            for (Eigen::Index start = 0; start < n; start += chunk) {
                const Eigen::Index rows = std::min(chunk, n - start);
                Eigen::MatrixXd bx(rows, scaled.cols());
                Eigen::MatrixXd by(rows, labels.cols());
                for (Eigen::Index r = 0; r < rows; ++r) {
                    bx.row(r) = scaled.row(order[static_cast<size_t>(start + r)]);
                    by.row(r) = labels.row(order[static_cast<size_t>(start + r)]);
                }
                ForwardCache cache;
                forward(spec, model.params, bx, ForwardMode::Train, &dropout_rng, &cache);
                Eigen::MatrixXd grad;
                const double batch_loss = bce_with_logits(cache.output, by, weights, &grad);
                if (!std::isfinite(batch_loss))
                    fail("loss diverged to a non-finite value at epoch " +
                         std::to_string(epoch + 1) + "; lower the learning rate");
                epoch_loss += batch_loss * static_cast<double>(rows) / static_cast<double>(n);
                adam_update(model.params, backward(spec, model.params, cache, grad), adam,
                            config);
            }
        }
        model.loss_log.push_back(epoch_loss);
    }
    return model;
}

Eigen::MatrixXd model_logits(const TrainedModel& model, const Eigen::MatrixXd& features) {
    if (!(model.feature_scale > 0.0)) fail("model has no valid feature scale");
    return forward(model.spec, model.params, features / model.feature_scale, ForwardMode::Eval);
}

Eigen::MatrixXd predict_probabilities(const TrainedModel& model,
                                      const Eigen::MatrixXd& features) {
    Eigen::MatrixXd logits = model_logits(model, features);
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        for (Eigen::Index c = 0; c < logits.cols(); ++c) {
            logits(r, c) = sigmoid(logits(r, c));
        }
    }
    return logits;
}

void save_model(const TrainedModel& model, const std::string& path) {
    model.spec.validate();
    std::ofstream out(path);
    if (!out) fail("cannot write model file '" + path + "'");
    out << "# mipred-model v1\n";
    out << "input_width " << model.spec.input_width << "\n";
    out << "labels " << model.label_names.size();
    for (const std::string& name : model.label_names) out << " " << name;
    out << "\n";
    out << "feature_scale " << format_real(model.feature_scale) << "\n";
    out << "train_feature_max " << format_real(model.train_feature_max) << "\n";
    out << "layers " << model.spec.layers.size() << "\n";
    for (const LayerSpec& l : model.spec.layers) {
        switch (l.kind) {
            case LayerKind::Dense: out << "dense " << l.out_width << "\n"; break;
            case LayerKind::Conv1d:
                out << "conv1d " << l.in_channels << " " << l.out_channels << " " << l.kernel
                    << " " << l.stride << " " << l.padding << "\n";
                break;
            case LayerKind::MaxPool1d:
                out << "maxpool1d " << l.kernel << " " << l.stride << " " << l.padding << "\n";
                break;
            case LayerKind::Flatten: out << "flatten\n"; break;
            case LayerKind::Dropout: out << "dropout " << format_real(l.rate) << "\n"; break;
        }
    }
    for (size_t i = 0; i < model.params.size(); ++i) {
        const LayerParams& p = model.params[i];
        if (p.weight.size() == 0) continue;
        out << "layer " << i << " weight " << p.weight.rows() << " " << p.weight.cols() << "\n";
        for (Eigen::Index r = 0; r < p.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < p.weight.cols(); ++c) {
                if (c) out << " ";
                out << format_real(p.weight(r, c));
            }
            out << "\n";
        }
        out << "layer " << i << " bias " << p.bias.size() << "\n";
        for (Eigen::Index r = 0; r < p.bias.size(); ++r) {
            if (r) out << " ";
            out << format_real(p.bias(r));
        }
        out << "\n";
    }
    out << "end\n";
    if (!out) fail("failed while writing model file '" + path + "'");
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open model file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "# mipred-model v1")
        fail("'" + path + "' is not a v1 model file");

    auto expect_key = [&](std::istringstream& s, const std::string& key) {
        std::string k;
        if (!(s >> k) || k != key) fail("model file '" + path + "': expected '" + key + "'");
    };
    auto next_line = [&]() -> std::istringstream {
        if (!std::getline(in, line)) fail("model file '" + path + "' is truncated");
        return std::istringstream(line);
    };

    TrainedModel model;
    {
        auto s = next_line();
        expect_key(s, "input_width");
        if (!(s >> model.spec.input_width)) fail("model file: bad input_width");
    }
    {
        auto s = next_line();
        expect_key(s, "labels");
        size_t count = 0;
        if (!(s >> count) || count == 0) fail("model file: bad label count");
        std::string name;
        while (s >> name) model.label_names.push_back(name);
        if (model.label_names.size() != count) fail("model file: label name list is incomplete");
    }
    {
        auto s = next_line();
        expect_key(s, "feature_scale");
        if (!(s >> model.feature_scale) || !(model.feature_scale > 0.0))
            fail("model file: bad feature_scale");
    }
    {
        auto s = next_line();
        expect_key(s, "train_feature_max");
        if (!(s >> model.train_feature_max)) fail("model file: bad train_feature_max");
    }
    size_t layer_count = 0;
    {
        auto s = next_line();
        expect_key(s, "layers");
        if (!(s >> layer_count) || layer_count == 0) fail("model file: bad layer count");
    }
    for (size_t i = 0; i < layer_count; ++i) {
        auto s = next_line();
        std::string kind;
        if (!(s >> kind)) fail("model file: missing layer description");
        LayerSpec l;
        if (kind == "dense") {
            if (!(s >> l.out_width)) fail("model file: bad dense layer");
            l = LayerSpec::dense(l.out_width);
        } else if (kind == "conv1d") {
            int ic, oc, k, st, p;
            if (!(s >> ic >> oc >> k >> st >> p)) fail("model file: bad conv1d layer");
            l = LayerSpec::conv1d(ic, oc, k, st, p);
        } else if (kind == "maxpool1d") {
            int k, st, p;
            if (!(s >> k >> st >> p)) fail("model file: bad maxpool1d layer");
            l = LayerSpec::maxpool1d(k, st, p);
        } else if (kind == "flatten") {
            l = LayerSpec::flatten();
        } else if (kind == "dropout") {
            double rate;
            if (!(s >> rate)) fail("model file: bad dropout layer");
            l = LayerSpec::dropout(rate);
        } else {
            fail("model file: unknown layer kind '" + kind + "'");
        }
        model.spec.layers.push_back(l);
    }
    model.spec.validate();
    if (model.spec.output_width() != static_cast<int>(model.label_names.size()))
        fail("model file: network output width does not match its label list");

    model.params = zero_parameters(model.spec);
    for (size_t i = 0; i < model.params.size(); ++i) {
        LayerParams& p = model.params[i];
        if (p.weight.size() == 0) continue;
        {
            auto s = next_line();
            expect_key(s, "layer");
            size_t idx;
            std::string what;
            Eigen::Index rows, cols;
            if (!(s >> idx >> what >> rows >> cols) || idx != i || what != "weight" ||
                rows != p.weight.rows() || cols != p.weight.cols())
                fail("model file: weight header mismatch at layer " + std::to_string(i));
        }
        for (Eigen::Index r = 0; r < p.weight.rows(); ++r) {
            auto s = next_line();
            for (Eigen::Index c = 0; c < p.weight.cols(); ++c) {
                if (!(s >> p.weight(r, c)))
                    fail("model file: weight row " + std::to_string(r) + " of layer " +
                         std::to_string(i) + " is truncated");
            }
        }
        {
            auto s = next_line();
            expect_key(s, "layer");
            size_t idx;
            std::string what;
            Eigen::Index size;
            if (!(s >> idx >> what >> size) || idx != i || what != "bias" ||
                size != p.bias.size())
                fail("model file: bias header mismatch at layer " + std::to_string(i));
        }
        {
            auto s = next_line();
            for (Eigen::Index r = 0; r < p.bias.size(); ++r) {
                if (!(s >> p.bias(r)))
                    fail("model file: bias of layer " + std::to_string(i) + " is truncated");
            }
        }
    }
    {
        auto s = next_line();
        expect_key(s, "end");
    }
    for (const LayerParams& p : model.params) {
        if (p.weight.size() > 0 && (!p.weight.allFinite() || !p.bias.allFinite()))
            fail("model file: non-finite parameter");
    }
    return model;
}

}  // namespace mipred::nn
