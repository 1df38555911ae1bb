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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "etdfe/error.hpp"
#include "etdfe/model.hpp"
#include "etdfe/random.hpp"

namespace etdfe::model {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

// Straight-line forward pass, independent of the kernels.
std::array<double, 2> oracle_forward(const ModelWeights& m, std::vector<double> a) {
  for (const Layer& l : m.layers) {
    std::vector<double> z(l.out);
    for (std::size_t j = 0; j < l.out; ++j) {
      double s = l.b[j];
      for (std::size_t i = 0; i < l.in; ++i) s += a[i] * l.w[i * l.out + j];
      z[j] = s;
    }
    if (l.act == Activation::kRelu) {
      for (double& v : z) v = v > 0 ? v : 0;
    } else if (l.act == Activation::kSoftmax) {
      const double mx = std::max(z[0], z[1]);
      const double e0 = std::exp(z[0] - mx), e1 = std::exp(z[1] - mx);
      z = {e0 / (e0 + e1), e1 / (e0 + e1)};
    }
    a = z;
  }
  return {a[0], a[1]};
}

ModelWeights random_model(const Architecture& arch, std::uint64_t seed) {
  auto m = ModelWeights::init(arch, {}, seed);
  Rng rng(seed + 1);
  for (auto& l : m.layers) {
    for (double& b : l.b) b = rng.uniform(-0.3, 0.3);
  }
  return m;
}

TEST(ActivationTest, ReluExamples) {
  EXPECT_EQ(relu(std::vector<double>{-1, 0, 2}), (std::vector<double>{0, 0, 2}));
  EXPECT_EQ(relu(std::vector<double>{-3, -1}), (std::vector<double>{0, 0}));
  const std::vector<double> x{-1.5, 2.5, 0.1};
  EXPECT_EQ(relu(relu(x)), relu(x));
}

TEST(ActivationTest, SoftmaxProperties) {
  const auto half = softmax(std::vector<double>{0, 0});
  EXPECT_DOUBLE_EQ(half[0], 0.5);
  const auto big = softmax(std::vector<double>{1000, 0});
  EXPECT_NEAR(big[0], 1.0, 1e-12);
  EXPECT_GE(big[1], 0.0);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> z{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const auto p = softmax(z);
    EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
    auto shifted = z;
    for (double& v : shifted) v += 17.25;
    const auto q = softmax(shifted);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(p[k], q[k], 1e-12);
  }
}

TEST(ArchitectureTest, PresetsAndChecks) {
  const auto desk = Architecture::desk();
  EXPECT_NO_THROW(desk.validate());
  EXPECT_NO_THROW(desk.check_first_layer());
  const auto t3 = Architecture::table3();
  EXPECT_NO_THROW(t3.validate());
  EXPECT_EQ(t3.layer_sizes.size(), 15u);
  EXPECT_EQ(t3.first_hidden(), 40u);
  std::size_t hidden = 0;
  for (std::size_t k = 1; k + 1 < t3.layer_sizes.size(); ++k) hidden += t3.layer_sizes[k];
  EXPECT_EQ(hidden, 8268u);

  Architecture wide{{4, 4, 2}, {Activation::kLinear, Activation::kSoftmax}};
  EXPECT_NO_THROW(wide.validate());
  EXPECT_EQ(code_of([&] { wide.check_first_layer(); }), ErrorCode::kPrivacyViolation);
  Architecture no_softmax{{4, 2, 2}, {Activation::kLinear, Activation::kRelu}};
  EXPECT_THROW(no_softmax.validate(), Error);
  Architecture three_out{{4, 2, 3}, {Activation::kLinear, Activation::kSoftmax}};
  EXPECT_THROW(three_out.validate(), Error);
}

TEST(InferTest, ZeroModelTiesToFraud) {
  const auto m = ModelWeights::zeros(Architecture::desk());
  const auto p = infer_plain(m, std::vector<double>(48, 1.0));
  EXPECT_DOUBLE_EQ(p.probs[0], 0.5);
  EXPECT_EQ(p.label, Label::kFraudulent);
  EXPECT_EQ(code_of([&] { infer_plain(m, std::vector<double>(47, 1.0)); }),
            ErrorCode::kShapeMismatch);
}

TEST(InferTest, MatchesOracleForward) {
  const auto m = random_model(Architecture::desk(), 3);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> r(48);
    for (double& v : r) v = rng.uniform(0, 3);
    const auto p = infer_plain(m, r);
    const auto o = oracle_forward(m, r);
    EXPECT_NEAR(p.probs[0], o[0], 1e-12);
    EXPECT_NEAR(p.probs[0] + p.probs[1], 1.0, 1e-12);
    EXPECT_EQ(p.label, o[1] >= o[0] ? Label::kFraudulent : Label::kHonest);
  }
}

TEST(SplitTest, ShapesAndRejections) {
  const auto t3 = ModelWeights::zeros(Architecture::table3());
  const auto s = split_first_layer(t3);
  EXPECT_EQ(s.w_q.rows, 48u);
  EXPECT_EQ(s.w_q.cols, 40u);
  EXPECT_EQ(s.w_q.data, std::vector<std::int32_t>(48 * 40, 0));
  EXPECT_EQ(s.digest, s.w_q.digest());

  const auto square = ModelWeights::zeros(
      Architecture{{4, 4, 2}, {Activation::kLinear, Activation::kSoftmax}});
  EXPECT_EQ(code_of([&] { split_first_layer(square); }), ErrorCode::kPrivacyViolation);
}

TEST(SplitTest, ResumeMatchesQuantizedModel) {
  const auto m = random_model(Architecture::desk(), 5);
  const auto split = split_first_layer(m);
  const auto mq = with_quantized_first_layer(m);
  Rng rng(5);
  int agree_real = 0;
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    std::vector<std::int64_t> r_q(48);
    std::vector<double> r(48);
    for (std::size_t t = 0; t < 48; ++t) {
      r_q[t] = rng.uniform_int(0, 300);
      r[t] = static_cast<double>(r_q[t]) / 100.0;
    }
    std::vector<std::int64_t> z(split.w_q.cols, 0);
    for (std::size_t j = 0; j < z.size(); ++j) {
      for (std::size_t t = 0; t < 48; ++t) z[j] += r_q[t] * split.w_q.at(t, j);
    }
    const auto resumed = infer_from_first_layer(m, z);
    EXPECT_EQ(resumed.label, infer_quantized(m, split, r_q).label);
    const auto ref = infer_plain(mq, r);
    EXPECT_NEAR(resumed.probs[1], ref.probs[1], 1e-9);
    if (std::fabs(ref.probs[1] - 0.5) > 1e-9) EXPECT_EQ(resumed.label, ref.label);
    agree_real += infer_plain(m, r).label == resumed.label;
  }
  EXPECT_GE(agree_real, n * 99 / 100);
  EXPECT_EQ(code_of([&] { infer_from_first_layer(m, std::vector<std::int64_t>(3)); }),
            ErrorCode::kShapeMismatch);
}

TEST(SplitTest, ZeroDecryptedWithZeroBias) {
  auto m = random_model(Architecture::desk(), 6);
  std::fill(m.layers[0].b.begin(), m.layers[0].b.end(), 0.0);
  const auto p = infer_from_first_layer(m, std::vector<std::int64_t>(16, 0));
  // Equivalent to running the rest of the network on a zero activation.
  auto rest = m;
  for (double& w : rest.layers[0].w) w = 0.0;
  EXPECT_NEAR(p.probs[1], infer_plain(rest, std::vector<double>(48, 1.0)).probs[1],
              1e-12);
}

TEST(GradientTest, CentralDifferences) {
  const Architecture arch{{5, 3, 4, 2},
                          {Activation::kLinear, Activation::kRelu, Activation::kSoftmax}};
  Rng rng(7);
  for (int point = 0; point < 20; ++point) {
    auto m = random_model(arch, 100 + point);
    std::vector<std::vector<double>> xs(4, std::vector<double>(5));
    std::vector<int> ys(4);
    for (std::size_t s = 0; s < 4; ++s) {
      for (double& v : xs[s]) v = rng.uniform(-1, 1);
      ys[s] = static_cast<int>(s % 2);
    }
    ModelWeights grad;
    loss_and_gradient(m, xs, ys, 1e-2, &grad);
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      for (int which = 0; which < 2; ++which) {
        auto& params = which == 0 ? m.layers[l].w : m.layers[l].b;
        const auto& g = which == 0 ? grad.layers[l].w : grad.layers[l].b;
        for (std::size_t k = 0; k < params.size(); ++k) {
          const double keep = params[k];
          params[k] = keep + 1e-5;
          const double up = loss_and_gradient(m, xs, ys, 1e-2, nullptr);
          params[k] = keep - 1e-5;
          const double down = loss_and_gradient(m, xs, ys, 1e-2, nullptr);
          params[k] = keep;
          const double numeric = (up - down) / 2e-5;
          const double denom = std::max({std::fabs(numeric), std::fabs(g[k]), 1e-6});
          EXPECT_LE(std::fabs(numeric - g[k]) / denom, 1e-4)
              << "layer " << l << " param " << k;
        }
      }
    }
  }
}

std::vector<DailyRecord> xor_set(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DailyRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    DailyRecord r;
    r.readings = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.1, 0.1),
                  rng.uniform(-0.1, 0.1)};
    const bool pos = (r.readings[0] > 0) != (r.readings[1] > 0);
    r.label = pos ? Label::kFraudulent : Label::kHonest;
    out.push_back(r);
  }
  return out;
}

TEST(TrainTest, LearnsXorAndIsDeterministic) {
  const Architecture arch{{4, 3, 16, 2},
                          {Activation::kLinear, Activation::kRelu, Activation::kSoftmax}};
  TrainParams hp;
  hp.epochs = 400;
  hp.batch = 32;
  hp.lr = 0.01;
  hp.seed = 3;
  const auto data = xor_set(800, 1);
  const auto m = train(data, arch, hp);
  std::size_t correct = 0;
  for (const auto& r : data) correct += infer_plain(m, r.readings).label == r.label;
  EXPECT_GE(static_cast<double>(correct) / data.size(), 0.95);
  EXPECT_EQ(train(data, arch, hp), m);
}

TEST(TrainTest, SingleClassRejected) {
  auto data = xor_set(10, 2);
  for (auto& r : data) r.label = Label::kHonest;
  const Architecture arch{{4, 3, 2}, {Activation::kLinear, Activation::kSoftmax}};
  EXPECT_EQ(code_of([&] { train(data, arch, TrainParams{}); }),
            ErrorCode::kDegenerateDataset);
}

TEST(TrainTest, DefaultsFollowPublishedSettings) {
  const TrainParams hp;
  EXPECT_EQ(hp.epochs, 60u);
  EXPECT_EQ(hp.batch, 250u);
  EXPECT_DOUBLE_EQ(hp.lr, 1e-4);
}

TEST(WeightsTest, ValidateRejectsNonFinite) {
  auto m = ModelWeights::zeros(Architecture::desk());
  m.layers[1].w[3] = NAN;
  EXPECT_EQ(code_of([&] { m.validate(); }), ErrorCode::kBadWeight);
}

}  // namespace
}  // namespace etdfe::model
