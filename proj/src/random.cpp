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

#include "etdfe/random.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "etdfe/error.hpp"

namespace etdfe {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) fail(ErrorCode::kInvalidArgument, "uniform_int: hi < lo");
  const std::uint64_t span =
      static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == std::numeric_limits<std::uint64_t>::max()) {
    return static_cast<std::int64_t>(engine_());
  }
  const std::uint64_t range = span + 1;
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + draw % range);
}

double Rng::normal(double mean, double sigma) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + sigma * spare_;
  }
  double u;
  double v;
  double s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return mean + sigma * u * f;
}

Rng Rng::fork(std::uint64_t stream) {
  return Rng(splitmix64(engine_() ^ splitmix64(stream)));
}

void SystemEntropy::fill(std::span<std::uint8_t> out) {
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    fail(ErrorCode::kCryptoError, "RAND_bytes failed");
  }
}

SeededEntropy::SeededEntropy(std::uint64_t seed, std::string_view domain) {
  key_.assign(domain.begin(), domain.end());
  for (int i = 0; i < 8; ++i) {
    key_.push_back(static_cast<std::uint8_t>(seed >> (8 * i)));
  }
}

void SeededEntropy::refill() {
  std::vector<std::uint8_t> input = key_;
  for (int i = 0; i < 8; ++i) {
    input.push_back(static_cast<std::uint8_t>(counter_ >> (8 * i)));
  }
  ++counter_;
  unsigned int len = 0;
  if (EVP_Digest(input.data(), input.size(), block_, &len, EVP_sha256(),
                 nullptr) != 1) {
    fail(ErrorCode::kCryptoError, "SHA-256 failed");
  }
  used_ = 0;
}

void SeededEntropy::fill(std::span<std::uint8_t> out) {
  std::size_t pos = 0;
  while (pos < out.size()) {
    if (used_ == sizeof(block_)) refill();
    const std::size_t take = std::min(out.size() - pos, sizeof(block_) - used_);
    std::memcpy(out.data() + pos, block_ + used_, take);
    used_ += take;
    pos += take;
  }
}

}  // namespace etdfe
