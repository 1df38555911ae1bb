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
#include <limits>
#include <vector>

#include "etdfe/error.hpp"
#include "etdfe/quantize.hpp"
#include "etdfe/random.hpp"

namespace etdfe::quantize {
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

// Integer oracle: k / 10^4 at scale 100 is k / 100 rounded half-even.
std::int64_t half_even_div100(std::int64_t k) {
  const bool neg = k < 0;
  const std::int64_t m = neg ? -k : k;
  std::int64_t q = m / 100;
  const std::int64_t r = m % 100;
  if (r > 50 || (r == 50 && q % 2 == 1)) ++q;
  return neg ? -q : q;
}

TEST(QuantizeTest, ReadingExamples) {
  const QuantScheme qs;
  EXPECT_EQ(quantize_reading(0.0, qs), 0);
  EXPECT_EQ(quantize_reading(1.275, qs), 128);
  EXPECT_EQ(quantize_reading(2.34, qs), 234);
  EXPECT_EQ(quantize_reading(0.125, qs), 12);
  EXPECT_EQ(quantize_reading(0.135, qs), 14);
  EXPECT_EQ(quantize_reading(81.92, qs), 8192);
}

TEST(QuantizeTest, ReadingRejections) {
  const QuantScheme qs;
  EXPECT_EQ(code_of([&] { quantize_reading(-0.01, qs); }), ErrorCode::kReadingOutOfRange);
  EXPECT_EQ(code_of([&] { quantize_reading(81.93, qs); }), ErrorCode::kReadingOutOfRange);
  EXPECT_EQ(code_of([&] { quantize_reading(NAN, qs); }), ErrorCode::kReadingOutOfRange);
}

TEST(QuantizeTest, DecimalHalfEvenMatchesIntegerOracle) {
  Rng rng(17);
  for (int i = 0; i < 20000; ++i) {
    const std::int64_t k = rng.uniform_int(-2000000, 2000000);
    const double x = static_cast<double>(k) / 10000.0;
    ASSERT_EQ(round_scaled(x, 100), half_even_div100(k)) << x;
  }
}

TEST(QuantizeTest, RoundTripWithinHalfUnit) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(-50.0, 50.0);
    for (std::int64_t scale : {1, 10, 100, 1000, 100000}) {
      const auto q = round_scaled(x, scale);
      ASSERT_LE(std::fabs(static_cast<double>(q) / static_cast<double>(scale) - x),
                0.5 / static_cast<double>(scale) * (1 + 1e-12));
    }
  }
}

TEST(QuantizeTest, ExtremeMagnitudes) {
  EXPECT_EQ(round_scaled(1e-300, 1000), 0);
  EXPECT_EQ(round_scaled(-4e-4, 1000), 0);
  EXPECT_EQ(round_scaled(1.5e6, 1000), 1500000000);
  EXPECT_THROW(round_scaled(1e300, 10), Error);
  EXPECT_THROW(round_scaled(std::numeric_limits<double>::infinity(), 10), Error);
  EXPECT_THROW(round_scaled(1.0, 30), Error);
}

TEST(QuantizeTest, Weights) {
  const QuantScheme qs;
  const std::vector<double> z(6, 0.0);
  const auto zq = quantize_weights(z, 3, 2, qs);
  EXPECT_EQ(zq.matrix.data, std::vector<std::int32_t>(6, 0));
  EXPECT_EQ(zq.max_abs, 0);

  EXPECT_EQ(quantize_weights(std::vector<double>{0.0015}, 1, 1, qs).matrix.data[0], 2);

  Rng rng(2);
  std::vector<double> w(48 * 40);
  for (double& v : w) v = rng.uniform(-0.7, 0.7);
  const auto q = quantize_weights(w, 48, 40, qs);
  std::int64_t max_abs = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_LE(std::fabs(q.matrix.data[i] / 1000.0 - w[i]), 0.5 / 1000 + 1e-15);
    max_abs = std::max<std::int64_t>(max_abs, std::abs(q.matrix.data[i]));
  }
  EXPECT_EQ(q.max_abs, max_abs);
  EXPECT_EQ(q.matrix.at(3, 7), q.matrix.data[3 * 40 + 7]);

  EXPECT_EQ(code_of([&] { quantize_weights(std::vector<double>{NAN}, 1, 1, qs); }),
            ErrorCode::kBadWeight);
  EXPECT_EQ(code_of([&] { quantize_weights(std::vector<double>{1e9}, 1, 1, qs); }),
            ErrorCode::kBadWeight);
  EXPECT_THROW(quantize_weights(std::vector<double>{1, 2}, 3, 1, qs), Error);
}

TEST(QuantizeTest, DigestBindsShapeAndValues) {
  IntMatrix a(2, 3), b(3, 2), c(2, 3);
  c.at(1, 2) = 1;
  EXPECT_NE(a.digest(), b.digest());
  EXPECT_NE(a.digest(), c.digest());
  EXPECT_EQ(a.digest(), IntMatrix(2, 3).digest());
}

TEST(QuantizeTest, BoundExamples) {
  const QuantScheme qs;
  EXPECT_EQ(dlog_bound_for(Purpose::kMonitoring, 200, 1, qs), 1638400u);
  QuantScheme small = qs;
  small.reading_max = 10;
  EXPECT_EQ(dlog_bound_for(Purpose::kBilling, 1, 1, small), 10u);
  EXPECT_EQ(dlog_bound_for(Purpose::kDetection, 48, 0, qs), 1u);
  EXPECT_EQ(code_of([&] { dlog_bound_for(Purpose::kDetection, 48, 1000, qs, 1 << 20); }),
            ErrorCode::kBoundTooLarge);
}

TEST(QuantizeTest, BoundIsMonotone) {
  const QuantScheme qs;
  for (auto p : {Purpose::kMonitoring, Purpose::kBilling, Purpose::kDetection}) {
    std::uint64_t prev = 0;
    for (std::uint64_t dim = 1; dim < 60; dim += 7) {
      const auto b = dlog_bound_for(p, dim, 37, qs);
      EXPECT_GE(b, prev);
      prev = b;
      EXPECT_LE(dlog_bound_for(p, dim, 36, qs), dlog_bound_for(p, dim, 37, qs));
    }
  }
}

TEST(QuantizeTest, Dequantize) {
  const QuantScheme qs;
  EXPECT_DOUBLE_EQ(dequantize_inner(0, qs, Purpose::kMonitoring), 0.0);
  EXPECT_DOUBLE_EQ(dequantize_inner(234, qs, Purpose::kMonitoring), 2.34);
  EXPECT_DOUBLE_EQ(dequantize_inner(12000, qs, Purpose::kDetection), 0.12);
}

TEST(QuantizeTest, FirstLayerErrorWithinAnalyticBound) {
  // |r_q W_q / (rs ws) - r W| <= d (0.5/ws) max|r| + (0.5/rs) sum|w| (+ the
  // second-order cross term, which is tiny at these scales).
  const QuantScheme qs;
  Rng rng(21);
  const std::size_t d = 48, n = 16;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> r(d), w(d * n);
    for (double& v : r) v = rng.uniform(0.0, 3.0);
    for (double& v : w) v = rng.uniform(-0.5, 0.5);
    const auto r_q = quantize_readings(r, qs);
    const auto w_q = quantize_weights(w, d, n, qs).matrix;
    const double max_r = *std::max_element(r.begin(), r.end());
    for (std::size_t j = 0; j < n; ++j) {
      double exact = 0, sum_abs_w = 0;
      std::int64_t acc = 0;
      for (std::size_t t = 0; t < d; ++t) {
        exact += r[t] * w[t * n + j];
        sum_abs_w += std::fabs(w[t * n + j]);
        acc += r_q[t] * w_q.at(t, j);
      }
      const double approx = dequantize_inner(acc, qs, Purpose::kDetection);
      const double bound = d * (0.5 / 1000) * max_r + (0.5 / 100) * sum_abs_w +
                           d * (0.5 / 1000) * (0.5 / 100);
      EXPECT_LE(std::fabs(approx - exact), bound);
    }
  }
}

TEST(QuantizeTest, SchemeValidation) {
  QuantScheme q;
  q.weight_scale = 300;
  EXPECT_THROW(q.validate(), Error);
  q = QuantScheme{};
  q.reading_max = 0;
  EXPECT_THROW(q.validate(), Error);
}

}  // namespace
}  // namespace etdfe::quantize
