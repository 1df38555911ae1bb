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

#include "etdfe/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "etdfe/error.hpp"
#include "etdfe/kernels.hpp"
#include "etdfe/random.hpp"

namespace etdfe::model {
namespace {

void apply_activation(Activation act, std::vector<double>& z) {
  switch (act) {
    case Activation::kLinear:
      break;
    case Activation::kRelu:
      kernels::relu_inplace(z);
      break;
    case Activation::kSoftmax:
      z = softmax(z);
      break;
  }
}

// z = a W + b
void affine(const Layer& layer, std::span<const double> a,
            std::vector<double>& z) {
  z.resize(layer.out);
  kernels::vec_mat(a, layer.w, layer.out, z);
  for (std::size_t j = 0; j < layer.out; ++j) z[j] += layer.b[j];
}

// Runs layers [first, end) starting from the input activation `a`.
Prediction run_from(const ModelWeights& m, std::size_t first,
                    std::vector<double> a) {
  std::vector<double> z;
  for (std::size_t l = first; l < m.layers.size(); ++l) {
    affine(m.layers[l], a, z);
    apply_activation(m.layers[l].act, z);
    a.swap(z);
  }
  Prediction p;
  p.probs = {a[0], a[1]};
  p.label = decide(p.probs);
  return p;
}

void check_input(const ModelWeights& m, std::size_t size) {
  if (size != m.arch.input_size()) {
    fail(ErrorCode::kShapeMismatch,
         "model expects " + std::to_string(m.arch.input_size()) +
             " inputs, got " + std::to_string(size));
  }
}

}  // namespace

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::kLinear: return "linear";
    case Activation::kRelu: return "relu";
    case Activation::kSoftmax: return "softmax";
  }
  return "?";
}

Activation parse_activation(std::string_view text) {
  if (text == "linear") return Activation::kLinear;
  if (text == "relu") return Activation::kRelu;
  if (text == "softmax") return Activation::kSoftmax;
  fail(ErrorCode::kFormatError, "unknown activation '" + std::string(text) + "'");
}

void Architecture::validate() const {
  if (layer_sizes.size() < 2) {
    fail(ErrorCode::kShapeMismatch, "architecture needs at least two layers");
  }
  if (activations.size() != layer_sizes.size() - 1) {
    fail(ErrorCode::kShapeMismatch,
         "need one activation per non-input layer");
  }
  for (std::size_t s : layer_sizes) {
    if (s == 0) fail(ErrorCode::kShapeMismatch, "empty layer");
  }
  if (layer_sizes.back() != 2) {
    fail(ErrorCode::kShapeMismatch, "output layer must have two units");
  }
  for (std::size_t i = 0; i + 1 < activations.size(); ++i) {
    if (activations[i] == Activation::kSoftmax) {
      fail(ErrorCode::kShapeMismatch, "softmax is only allowed on the output");
    }
  }
  if (activations.back() != Activation::kSoftmax) {
    fail(ErrorCode::kShapeMismatch, "output activation must be softmax");
  }
}

void Architecture::check_first_layer() const {
  if (layer_sizes.size() < 3) {
    fail(ErrorCode::kShapeMismatch,
         "the encrypted first layer needs at least one hidden layer");
  }
  if (first_hidden() >= input_size()) {
    fail(ErrorCode::kPrivacyViolation,
         "first hidden layer (n=" + std::to_string(first_hidden()) +
             ") must be narrower than the input (d=" +
             std::to_string(input_size()) + ")");
  }
}

Architecture Architecture::desk(std::size_t d) {
  return Architecture{{d, 16, 32, 2},
                      {Activation::kLinear, Activation::kRelu,
                       Activation::kSoftmax}};
}

Architecture Architecture::table3() {
  Architecture a;
  a.layer_sizes = {48,  40,   500, 350,  110, 350, 110, 1536,
                   500, 1536, 500, 1536, 500, 700, 2};
  a.activations.push_back(Activation::kLinear);
  for (int i = 0; i < 12; ++i) a.activations.push_back(Activation::kRelu);
  a.activations.push_back(Activation::kSoftmax);
  return a;
}

ModelWeights ModelWeights::zeros(const Architecture& arch,
                                 const quantize::QuantScheme& quant) {
  arch.validate();
  ModelWeights m;
  m.arch = arch;
  m.quant = quant;
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    Layer layer;
    layer.in = arch.layer_sizes[l];
    layer.out = arch.layer_sizes[l + 1];
    layer.w.assign(layer.in * layer.out, 0.0);
    layer.b.assign(layer.out, 0.0);
    layer.act = arch.activations[l];
    m.layers.push_back(std::move(layer));
  }
  return m;
}

ModelWeights ModelWeights::init(const Architecture& arch,
                                const quantize::QuantScheme& quant,
                                std::uint64_t seed) {
  ModelWeights m = zeros(arch, quant);
  Rng rng(seed);
  for (Layer& layer : m.layers) {
    const double limit = 1.0 / std::sqrt(static_cast<double>(layer.in));
    for (double& w : layer.w) w = rng.uniform(-limit, limit);
  }
  return m;
}

void ModelWeights::validate() const {
  arch.validate();
  quant.validate();
  if (layers.size() != arch.layer_sizes.size() - 1) {
    fail(ErrorCode::kShapeMismatch, "layer count does not match architecture");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    if (layer.in != arch.layer_sizes[l] || layer.out != arch.layer_sizes[l + 1] ||
        layer.w.size() != layer.in * layer.out || layer.b.size() != layer.out ||
        layer.act != arch.activations[l]) {
      fail(ErrorCode::kShapeMismatch,
           "layer " + std::to_string(l) + " does not match architecture");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(layer.w.begin(), layer.w.end(), finite) ||
        !std::all_of(layer.b.begin(), layer.b.end(), finite)) {
      fail(ErrorCode::kBadWeight,
           "layer " + std::to_string(l) + " has a non-finite entry");
    }
  }
}

std::vector<double> relu(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  kernels::relu_inplace(out);
  return out;
}

std::vector<double> softmax(std::span<const double> z) {
  std::vector<double> out(z.size());
  if (z.empty()) return out;
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - top);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

Label decide(const std::array<double, 2>& probs) {
  return probs[1] >= probs[0] ? Label::kFraudulent : Label::kHonest;
}

Prediction infer_plain(const ModelWeights& m, std::span<const double> r) {
  check_input(m, r.size());
  return run_from(m, 0, std::vector<double>(r.begin(), r.end()));
}

FirstLayerSplit split_first_layer(const ModelWeights& m) {
  m.arch.validate();
  m.arch.check_first_layer();
  const Layer& first = m.layers.front();
  auto q = quantize::quantize_weights(first.w, first.in, first.out, m.quant);
  FirstLayerSplit split;
  split.digest = q.matrix.digest();
  split.w_q = std::move(q.matrix);
  split.max_abs = q.max_abs;
  split.v = first.b;
  return split;
}

Prediction infer_from_first_layer(const ModelWeights& m,
                                  std::span<const std::int64_t> decrypted) {
  const Layer& first = m.layers.front();
  if (decrypted.size() != first.out) {
    fail(ErrorCode::kShapeMismatch,
         "expected " + std::to_string(first.out) + " first-layer outputs, got " +
             std::to_string(decrypted.size()));
  }
  std::vector<double> a(first.out);
  for (std::size_t j = 0; j < first.out; ++j) {
    a[j] = quantize::dequantize_inner(decrypted[j], m.quant,
                                      quantize::Purpose::kDetection) +
           first.b[j];
  }
  apply_activation(first.act, a);
  if (m.layers.size() == 1) {
    Prediction p;
    p.probs = {a[0], a[1]};
    p.label = decide(p.probs);
    return p;
  }
  return run_from(m, 1, std::move(a));
}

Prediction infer_quantized(const ModelWeights& m, const FirstLayerSplit& split,
                           std::span<const std::int64_t> readings_q) {
  check_input(m, readings_q.size());
  std::vector<std::int32_t> r(readings_q.size());
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (readings_q[t] < 0 || readings_q[t] > m.quant.reading_max) {
      fail(ErrorCode::kReadingOutOfRange, "quantized reading out of range");
    }
    r[t] = static_cast<std::int32_t>(readings_q[t]);
  }
  std::vector<std::int64_t> z(split.w_q.cols);
  kernels::vec_mat_i32(r, split.w_q.data, split.w_q.cols, z);
  return infer_from_first_layer(m, z);
}

ModelWeights with_quantized_first_layer(const ModelWeights& m) {
  const FirstLayerSplit split = split_first_layer(m);
  ModelWeights out = m;
  const auto scale = static_cast<double>(m.quant.weight_scale);
  for (std::size_t i = 0; i < split.w_q.data.size(); ++i) {
    out.layers.front().w[i] = static_cast<double>(split.w_q.data[i]) / scale;
  }
  return out;
}

double loss_and_gradient(const ModelWeights& m,
                         std::span<const std::vector<double>> xs,
                         std::span<const int> ys, double l2,
                         ModelWeights* grad) {
  if (xs.size() != ys.size() || xs.empty()) {
    fail(ErrorCode::kShapeMismatch, "need one label per sample");
  }
  const std::size_t depth = m.layers.size();
  if (grad != nullptr) {
    *grad = ModelWeights::zeros(m.arch, m.quant);
  }
  std::vector<std::vector<double>> acts(depth + 1);  // post-activation
  std::vector<std::vector<double>> pre(depth);       // pre-activation
  std::vector<double> delta;
  std::vector<double> prev_delta;
  double total = 0.0;

  for (std::size_t s = 0; s < xs.size(); ++s) {
    check_input(m, xs[s].size());
    acts[0] = xs[s];
    for (std::size_t l = 0; l < depth; ++l) {
      affine(m.layers[l], acts[l], pre[l]);
      acts[l + 1] = pre[l];
      apply_activation(m.layers[l].act, acts[l + 1]);
    }
    const std::vector<double>& p = acts[depth];
    const int y = ys[s];
    total -= std::log(std::max(p[static_cast<std::size_t>(y)], 1e-300));
    if (grad == nullptr) continue;

    // Softmax + cross-entropy: dL/dz = p - onehot(y).
    delta = p;
    delta[static_cast<std::size_t>(y)] -= 1.0;
    for (std::size_t l = depth; l-- > 0;) {
      const Layer& layer = m.layers[l];
      Layer& g = grad->layers[l];
      for (std::size_t i = 0; i < layer.in; ++i) {
        kernels::axpy(acts[l][i], delta,
                      std::span<double>(g.w).subspan(i * layer.out, layer.out));
      }
      kernels::axpy(1.0, delta, g.b);
      if (l == 0) break;
      prev_delta.assign(layer.in, 0.0);
      for (std::size_t i = 0; i < layer.in; ++i) {
        prev_delta[i] = kernels::dot(
            std::span<const double>(layer.w).subspan(i * layer.out, layer.out),
            delta);
      }
      if (m.layers[l - 1].act == Activation::kRelu) {
        for (std::size_t i = 0; i < layer.in; ++i) {
          if (pre[l - 1][i] <= 0.0) prev_delta[i] = 0.0;
        }
      }
      delta.swap(prev_delta);
    }
  }

  const double inv_n = 1.0 / static_cast<double>(xs.size());
  double penalty = 0.0;
  for (std::size_t l = 0; l < depth; ++l) {
    penalty += kernels::dot(m.layers[l].w, m.layers[l].w);
  }
  if (grad != nullptr) {
    for (std::size_t l = 0; l < depth; ++l) {
      Layer& g = grad->layers[l];
      for (std::size_t k = 0; k < g.w.size(); ++k) {
        g.w[k] = g.w[k] * inv_n + 2.0 * l2 * m.layers[l].w[k];
      }
      for (double& b : g.b) b *= inv_n;
    }
  }
  return total * inv_n + l2 * penalty;
}

ModelWeights train(const std::vector<DailyRecord>& dataset,
                   const Architecture& arch, const TrainParams& hp,
                   const quantize::QuantScheme& quant) {
  arch.validate();
  if (hp.epochs == 0 || hp.batch == 0 || !(hp.lr > 0.0) || hp.l2 < 0.0) {
    fail(ErrorCode::kInvalidArgument, "bad training hyper-parameters");
  }
  bool has_honest = false;
  bool has_fraud = false;
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  xs.reserve(dataset.size());
  ys.reserve(dataset.size());
  for (const DailyRecord& rec : dataset) {
    if (rec.readings.size() != arch.input_size()) {
      fail(ErrorCode::kShapeMismatch, "record width does not match the model");
    }
    const bool fraud = rec.label == Label::kFraudulent;
    (fraud ? has_fraud : has_honest) = true;
    xs.push_back(rec.readings);
    ys.push_back(fraud ? 1 : 0);
  }
  if (!has_honest || !has_fraud) {
    fail(ErrorCode::kDegenerateDataset, "training data must contain both classes");
  }

  ModelWeights m = ModelWeights::init(arch, quant, hp.seed);
  ModelWeights first_moment = ModelWeights::zeros(arch, quant);
  ModelWeights second_moment = ModelWeights::zeros(arch, quant);
  ModelWeights grad;
  Rng rng(splitmix64(hp.seed ^ 0x5eedf00dULL));

  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::vector<double>> bx;
  std::vector<int> by;
  double beta1_t = 1.0;
  double beta2_t = 1.0;

  auto adam = [&](std::vector<double>& p, const std::vector<double>& g,
                  std::vector<double>& mom1, std::vector<double>& mom2,
                  double step) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      mom1[k] = hp.beta1 * mom1[k] + (1.0 - hp.beta1) * g[k];
      mom2[k] = hp.beta2 * mom2[k] + (1.0 - hp.beta2) * g[k] * g[k];
      p[k] -= step * mom1[k] / (std::sqrt(mom2[k]) + hp.eps);
    }
  };

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += hp.batch) {
      const std::size_t end = std::min(order.size(), start + hp.batch);
      bx.clear();
      by.clear();
      for (std::size_t k = start; k < end; ++k) {
        bx.push_back(xs[order[k]]);
        by.push_back(ys[order[k]]);
      }
      loss_and_gradient(m, bx, by, hp.l2, &grad);
      beta1_t *= hp.beta1;
      beta2_t *= hp.beta2;
      const double step = hp.lr * std::sqrt(1.0 - beta2_t) / (1.0 - beta1_t);
      for (std::size_t l = 0; l < m.layers.size(); ++l) {
        adam(m.layers[l].w, grad.layers[l].w, first_moment.layers[l].w,
             second_moment.layers[l].w, step);
        adam(m.layers[l].b, grad.layers[l].b, first_moment.layers[l].b,
             second_moment.layers[l].b, step);
      }
    }
  }
  return m;
}

}  // namespace etdfe::model
