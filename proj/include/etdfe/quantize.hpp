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

// Fixed-point bridge between real-valued kWh readings, tariffs and model
// weights and the integers the encryption scheme works over. All rounding is
// round-half-even on the shortest decimal representation of the input, so
// 1.275 at scale 100 gives 128 even though 1.275*100 == 127.4999... in binary.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace etdfe::quantize {

struct QuantScheme {
  std::int64_t reading_scale = 100;   // centi-kWh
  std::int64_t weight_scale = 1000;
  std::int64_t rate_scale = 1000;     // tenths of a cent per kWh
  std::int64_t reading_max = 8192;    // R_max, in quantized units

  // Scales must be powers of ten >= 1 and reading_max >= 1.
  void validate() const;

  double max_kwh() const {
    return static_cast<double>(reading_max) / static_cast<double>(reading_scale);
  }

  friend bool operator==(const QuantScheme&, const QuantScheme&) = default;
};

// Row-major integer matrix (rows = detection slots d, cols = neurons n).
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int32_t> data;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

  std::int32_t& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  std::int32_t at(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::vector<std::int64_t> column(std::size_t c) const;
  std::int64_t max_abs() const;

  // SHA-256 over the shape and entries; binds detection keys to a model.
  std::array<std::uint8_t, 32> digest() const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

struct QuantizedWeights {
  IntMatrix matrix;
  std::int64_t max_abs = 0;
};

enum class Purpose { kMonitoring, kBilling, kDetection };

inline constexpr std::uint64_t kDefaultSearchCeiling = std::uint64_t{1} << 36;

// round-half-even(x * scale) using decimal semantics. Throws
// InvalidArgument for non-finite input or int64 overflow.
std::int64_t round_scaled(double x, std::int64_t scale);

std::int64_t quantize_reading(double kwh, const QuantScheme& qs);
std::vector<std::int64_t> quantize_readings(std::span<const double> kwh,
                                            const QuantScheme& qs);

// Signed tariffs; rate_scale units per kWh.
std::vector<std::int64_t> quantize_rates(std::span<const double> rates,
                                         const QuantScheme& qs);

// `w` is row-major rows x cols.
QuantizedWeights quantize_weights(std::span<const double> w, std::size_t rows,
                                  std::size_t cols, const QuantScheme& qs);

// Largest |inner product| the dlog solver must cover:
//   monitoring: dim (meters) * R_max
//   billing:    dim (b) * R_max * max_abs_coeff
//   detection:  dim (d) * R_max * max_abs_coeff
// Zero results clamp to 1. Throws BoundTooLarge above `ceiling`.
std::uint64_t dlog_bound_for(Purpose purpose, std::uint64_t dim,
                             std::int64_t max_abs_coeff, const QuantScheme& qs,
                             std::uint64_t ceiling = kDefaultSearchCeiling);

// value / (reading_scale * {1, rate_scale, weight_scale})
double dequantize_inner(std::int64_t value, const QuantScheme& qs,
                        Purpose purpose);

}  // namespace etdfe::quantize
