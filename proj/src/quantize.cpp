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

#include "etdfe/quantize.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "etdfe/error.hpp"

namespace etdfe::quantize {
namespace {

int decimal_exponent(std::int64_t scale, const char* what) {
  if (scale < 1) fail(ErrorCode::kInvalidArgument, std::string(what) + " < 1");
  int k = 0;
  while (scale % 10 == 0) {
    scale /= 10;
    ++k;
  }
  if (scale != 1) {
    fail(ErrorCode::kInvalidArgument,
         std::string(what) + " must be a power of ten");
  }
  return k;
}

bool mul_overflows(std::uint64_t a, std::uint64_t b, std::uint64_t limit) {
  return a != 0 && b > limit / a;
}

}  // namespace

void QuantScheme::validate() const {
  decimal_exponent(reading_scale, "reading_scale");
  decimal_exponent(weight_scale, "weight_scale");
  decimal_exponent(rate_scale, "rate_scale");
  if (reading_max < 1) fail(ErrorCode::kInvalidArgument, "reading_max < 1");
}

std::int64_t round_scaled(double x, std::int64_t scale) {
  if (!std::isfinite(x)) fail(ErrorCode::kInvalidArgument, "non-finite value");
  const int shift = decimal_exponent(scale, "scale");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  const std::string repr(buf, res.ptr);

  // repr is [-]digits[.digits][e[+-]digits]; collect all mantissa digits and
  // the power of ten they are scaled by.
  bool negative = false;
  std::string digits;
  int exp10 = 0;
  std::size_t i = 0;
  if (repr[i] == '-') {
    negative = true;
    ++i;
  }
  bool after_point = false;
  for (; i < repr.size() && repr[i] != 'e'; ++i) {
    if (repr[i] == '.') {
      after_point = true;
      continue;
    }
    digits.push_back(repr[i]);
    if (after_point) --exp10;
  }
  if (i < repr.size()) exp10 += std::stoi(repr.substr(i + 1));
  exp10 += shift;

  std::string int_part;
  std::string frac_part;
  if (exp10 >= 0) {
    int_part = digits + std::string(static_cast<std::size_t>(exp10), '0');
  } else {
    const auto cut = static_cast<std::ptrdiff_t>(digits.size()) + exp10;
    if (cut <= 0) {
      frac_part = std::string(static_cast<std::size_t>(-cut), '0') + digits;
    } else {
      int_part = digits.substr(0, static_cast<std::size_t>(cut));
      frac_part = digits.substr(static_cast<std::size_t>(cut));
    }
  }

  constexpr auto kMax =
      static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
  std::uint64_t value = 0;
  for (char c : int_part) {
    if (mul_overflows(value, 10, kMax) || value * 10 > kMax - (c - '0')) {
      fail(ErrorCode::kInvalidArgument, "scaled value overflows int64");
    }
    value = value * 10 + static_cast<std::uint64_t>(c - '0');
  }

  // Compare the fraction against one half.
  int cmp = 0;
  if (!frac_part.empty()) {
    if (frac_part[0] > '5') {
      cmp = 1;
    } else if (frac_part[0] < '5') {
      cmp = -1;
    } else {
      cmp = frac_part.find_first_not_of('0', 1) == std::string::npos ? 0 : 1;
    }
  } else {
    cmp = -1;
  }
  if (cmp > 0 || (cmp == 0 && (value & 1) == 1)) {
    if (value == kMax) fail(ErrorCode::kInvalidArgument, "overflow");
    ++value;
  }
  const auto signed_value = static_cast<std::int64_t>(value);
  return negative ? -signed_value : signed_value;
}

std::vector<std::int64_t> IntMatrix::column(std::size_t c) const {
  std::vector<std::int64_t> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
  return out;
}

std::int64_t IntMatrix::max_abs() const {
  std::int64_t m = 0;
  for (std::int32_t v : data) m = std::max<std::int64_t>(m, std::llabs(v));
  return m;
}

std::array<std::uint8_t, 32> IntMatrix::digest() const {
  std::vector<std::uint8_t> buf;
  const std::string tag = "etdfe-weights/1";
  buf.insert(buf.end(), tag.begin(), tag.end());
  auto put = [&](std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  };
  put(rows, 8);
  put(cols, 8);
  for (std::int32_t v : data) put(static_cast<std::uint32_t>(v), 4);
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(buf.data(), buf.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    fail(ErrorCode::kCryptoError, "SHA-256 failed");
  }
  return out;
}

std::int64_t quantize_reading(double kwh, const QuantScheme& qs) {
  if (!std::isfinite(kwh) || kwh < 0.0) {
    fail(ErrorCode::kReadingOutOfRange,
         "reading must be a finite non-negative kWh value");
  }
  std::int64_t q = 0;
  try {
    q = round_scaled(kwh, qs.reading_scale);
  } catch (const Error&) {
    fail(ErrorCode::kReadingOutOfRange, "reading too large");
  }
  if (q > qs.reading_max) {
    fail(ErrorCode::kReadingOutOfRange,
         "reading " + std::to_string(kwh) + " kWh exceeds R_max " +
             std::to_string(qs.reading_max) + " units");
  }
  return q;
}

std::vector<std::int64_t> quantize_readings(std::span<const double> kwh,
                                            const QuantScheme& qs) {
  std::vector<std::int64_t> out;
  out.reserve(kwh.size());
  for (double v : kwh) out.push_back(quantize_reading(v, qs));
  return out;
}

std::vector<std::int64_t> quantize_rates(std::span<const double> rates,
                                         const QuantScheme& qs) {
  std::vector<std::int64_t> out;
  out.reserve(rates.size());
  for (double r : rates) {
    if (!std::isfinite(r)) fail(ErrorCode::kInvalidArgument, "non-finite rate");
    out.push_back(round_scaled(r, qs.rate_scale));
  }
  return out;
}

QuantizedWeights quantize_weights(std::span<const double> w, std::size_t rows,
                                  std::size_t cols, const QuantScheme& qs) {
  if (w.size() != rows * cols) {
    fail(ErrorCode::kShapeMismatch, "weight matrix size does not match shape");
  }
  QuantizedWeights out{IntMatrix(rows, cols), 0};
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i])) {
      fail(ErrorCode::kBadWeight, "non-finite weight at index " + std::to_string(i));
    }
    std::int64_t q = 0;
    try {
      q = round_scaled(w[i], qs.weight_scale);
    } catch (const Error&) {
      fail(ErrorCode::kBadWeight, "weight overflows at index " + std::to_string(i));
    }
    if (q > std::numeric_limits<std::int32_t>::max() ||
        q < -std::numeric_limits<std::int32_t>::max()) {
      fail(ErrorCode::kBadWeight, "quantized weight exceeds 32 bits");
    }
    out.matrix.data[i] = static_cast<std::int32_t>(q);
    out.max_abs = std::max<std::int64_t>(out.max_abs, std::llabs(q));
  }
  return out;
}

std::uint64_t dlog_bound_for(Purpose purpose, std::uint64_t dim,
                             std::int64_t max_abs_coeff, const QuantScheme& qs,
                             std::uint64_t ceiling) {
  if (dim == 0) fail(ErrorCode::kInvalidArgument, "dimension must be positive");
  if (max_abs_coeff < 0) {
    fail(ErrorCode::kInvalidArgument, "max_abs_coeff must be >= 0");
  }
  const auto coeff = purpose == Purpose::kMonitoring
                         ? std::uint64_t{1}
                         : static_cast<std::uint64_t>(max_abs_coeff);
  const auto rmax = static_cast<std::uint64_t>(qs.reading_max);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
  bool overflow = mul_overflows(dim, rmax, limit);
  std::uint64_t bound = overflow ? limit : dim * rmax;
  if (!overflow && mul_overflows(bound, coeff, limit)) overflow = true;
  if (!overflow) bound *= coeff;
  if (overflow || bound > ceiling) {
    fail(ErrorCode::kBoundTooLarge,
         "dlog bound exceeds ceiling " + std::to_string(ceiling) +
             "; reduce reading_scale/weight_scale/rate_scale or reading_max");
  }
  return bound == 0 ? 1 : bound;
}

double dequantize_inner(std::int64_t value, const QuantScheme& qs,
                        Purpose purpose) {
  double denom = static_cast<double>(qs.reading_scale);
  if (purpose == Purpose::kBilling) denom *= static_cast<double>(qs.rate_scale);
  if (purpose == Purpose::kDetection) {
    denom *= static_cast<double>(qs.weight_scale);
  }
  return static_cast<double>(value) / denom;
}

}  // namespace etdfe::quantize
