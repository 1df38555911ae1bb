// Copyright 2026 The ETDFE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Feed-forward classifier (honest / fraudulent) with softmax output, trained
// by mini-batch Adam on cross-entropy plus an L2 penalty. The first hidden
// layer can be split off, quantized, and evaluated under functional
// encryption; inference then resumes from the decrypted integer outputs.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "etdfe/attacks.hpp"
#include "etdfe/quantize.hpp"

namespace etdfe::model {

using attacks::DailyRecord;
using attacks::Label;

enum class Activation { kLinear, kRelu, kSoftmax };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view text);

struct Architecture {
  std::vector<std::size_t> layer_sizes;  // input d, hidden..., output 2
  std::vector<Activation> activations;   // one per non-input layer

  // Structural checks: |activations| == |layer_sizes| - 1, softmax last and
  // only last, two outputs. Does not check n < d; see check_first_layer().
  void validate() const;

  // Throws PrivacyViolation unless first hidden width < input width.
  void check_first_layer() const;

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t first_hidden() const { return layer_sizes.at(1); }

  // 48 -> 16 (linear) -> 32 (relu) -> 2 (softmax)
  static Architecture desk(std::size_t d = 48);
  // The 15-layer network: 48 -> 40 linear -> 13 relu layers -> 2 softmax.
  static Architecture table3();

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> w;  // in x out, row-major: w[i*out + j] = input i -> unit j
  std::vector<double> b;  // out
  Activation act = Activation::kLinear;

  friend bool operator==(const Layer&, const Layer&) = default;
};

struct ModelWeights {
  Architecture arch;
  quantize::QuantScheme quant;
  std::vector<Layer> layers;

  static ModelWeights zeros(const Architecture& arch,
                            const quantize::QuantScheme& quant = {});
  // Symmetric uniform init scaled by 1/sqrt(fan_in); biases zero.
  static ModelWeights init(const Architecture& arch,
                           const quantize::QuantScheme& quant,
                           std::uint64_t seed);

  // Shapes match arch and every entry is finite (BadWeight otherwise).
  void validate() const;

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

struct Prediction {
  std::array<double, 2> probs{};  // [honest, fraudulent]
  Label label = Label::kFraudulent;
};

struct FirstLayerSplit {
  quantize::IntMatrix w_q;  // d x n
  std::vector<double> v;    // n, applied in plaintext after decryption
  std::array<std::uint8_t, 32> digest{};
  std::int64_t max_abs = 0;
};

std::vector<double> relu(std::span<const double> x);
std::vector<double> softmax(std::span<const double> z);

// argmax with ties going to fraudulent.
Label decide(const std::array<double, 2>& probs);

Prediction infer_plain(const ModelWeights& m, std::span<const double> r);

FirstLayerSplit split_first_layer(const ModelWeights& m);

// `decrypted[j]` = sum_t W_q[t][j] * r_q[t]. Dequantizes, adds the bias,
// applies the first activation and runs the remaining layers.
Prediction infer_from_first_layer(const ModelWeights& m,
                                  std::span<const std::int64_t> decrypted);

// Plaintext reference for the encrypted path: exact r_q^T W_q followed by
// infer_from_first_layer.
Prediction infer_quantized(const ModelWeights& m, const FirstLayerSplit& split,
                           std::span<const std::int64_t> readings_q);

// Same function as the encrypted path, but on the float model whose first
// layer weights are replaced by W_q / weight_scale.
ModelWeights with_quantized_first_layer(const ModelWeights& m);

struct TrainParams {
  std::size_t epochs = 60;
  std::size_t batch = 250;
  double lr = 1e-4;
  double l2 = 1e-4;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Mean cross-entropy over the samples plus l2 * sum(w^2) over weight
// matrices (biases unpenalised). When `grad` is non-null it receives the
// gradient with the same shapes as `m`.
double loss_and_gradient(const ModelWeights& m,
                         std::span<const std::vector<double>> xs,
                         std::span<const int> ys, double l2,
                         ModelWeights* grad);

// Throws DegenerateDataset unless both classes are present.
ModelWeights train(const std::vector<DailyRecord>& dataset,
                   const Architecture& arch, const TrainParams& hp,
                   const quantize::QuantScheme& quant = {});

}  // namespace etdfe::model
