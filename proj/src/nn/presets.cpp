#include "nn/presets.hpp"

#include <stdexcept>

namespace mipred::nn {

NetworkSpec make_dense_spec(int input_width, int label_count, int hidden_layers,
                            int hidden_width) {
    NetworkSpec spec;
    spec.input_width = input_width;
    for (int i = 0; i < hidden_layers; ++i) spec.layers.push_back(LayerSpec::dense(hidden_width));
    spec.layers.push_back(LayerSpec::dense(label_count));
    spec.validate();
    return spec;
}

NetworkSpec make_conv_spec(int input_width, int label_count, double dropout1, double dropout2) {
    NetworkSpec spec;
    spec.input_width = input_width;
    spec.layers = {
        LayerSpec::conv1d(1, 32, 10, 1, 1),   LayerSpec::maxpool1d(5, 5, 0),
        LayerSpec::conv1d(32, 128, 5, 1, 1),  LayerSpec::maxpool1d(3, 3, 0),
        LayerSpec::conv1d(128, 256, 3, 1, 1), LayerSpec::maxpool1d(2, 3, 0),
        LayerSpec::flatten(),                 LayerSpec::dense(256),
        LayerSpec::dropout(dropout1),         LayerSpec::dense(128),
        LayerSpec::dropout(dropout2),         LayerSpec::dense(label_count),
    };
    spec.validate();
    return spec;
}

NetworkSpec make_network_spec(const std::string& name, int input_width, int label_count) {
    if (name == "ann") return make_dense_spec(input_width, label_count, 3, 200);
    if (name == "cnn") return make_conv_spec(input_width, label_count, 0.0, 0.3);
    throw std::runtime_error("unknown network preset '" + name + "' (expected ann or cnn)");
}

TrainConfig default_train_config(const std::string& name) {
    TrainConfig cfg;
    if (name == "ann") {
        cfg.learning_rate = 6.19e-5;
        cfg.epochs = 8715;
    } else if (name == "cnn") {
        cfg.learning_rate = 4.37e-4;
        cfg.epochs = 7532;
    } else {
        throw std::runtime_error("unknown network preset '" + name + "' (expected ann or cnn)");
    }
    return cfg;
}

}  // namespace mipred::nn
