#pragma once

#include <string>

#include "nn/network.hpp"
#include "nn/train.hpp"

namespace mipred::nn {

// Dense classifier: `hidden_layers` ReLU layers of `hidden_width` neurons,
// then a linear logit layer.
NetworkSpec make_dense_spec(int input_width, int label_count, int hidden_layers,
                            int hidden_width);

// Convolutional classifier over the 1-channel arrival sequence:
//   conv(1->32, k10 s1 p1) -> pool(k5 s5) -> conv(32->128, k5 s1 p1) ->
//   pool(k3 s3) -> conv(128->256, k3 s1 p1) -> pool(k2 s3) -> flatten ->
//   dense 256 -> dropout(rate1) -> dense 128 -> dropout(rate2) -> logits.
NetworkSpec make_conv_spec(int input_width, int label_count, double dropout1, double dropout2);

// Named network presets: "ann" (3 hidden x 200) and "cnn" (stack above with
// dropout 0.0 / 0.3). Throws on unknown names.
NetworkSpec make_network_spec(const std::string& name, int input_width, int label_count);

// Reference training configurations for the presets: ann = lr 6.19e-5 for
// 8,715 epochs; cnn = lr 4.37e-4 for 7,532 epochs. Full batch, Adam defaults.
TrainConfig default_train_config(const std::string& name);

}  // namespace mipred::nn
