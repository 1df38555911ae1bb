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

// Dense inner loops used by the model and by the plaintext oracles. Each
// kernel has a portable scalar reference and an AVX2 variant; the variant is
// picked once at startup from CPUID and can be pinned with the
// ETDFE_KERNELS=scalar|avx2 environment variable or force_backend().
//
// Integer kernels are exact in every backend. Floating-point kernels may
// differ between backends by reassociation error only.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace etdfe::kernels {

enum class Backend { kScalar, kAvx2 };

std::string_view backend_name(Backend backend);
bool backend_available(Backend backend);
Backend active_backend();

// Throws Error(kInvalidArgument) when the backend is not available on this CPU.
void force_backend(Backend backend);

// Restores the CPUID/environment selection.
void reset_backend();

double dot(std::span<const double> x, std::span<const double> y);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// x := max(x, 0)
void relu_inplace(std::span<double> x);

// out[j] = sum_i x[i] * m[i * cols + j], with m row-major (x.size() rows).
void vec_mat(std::span<const double> x, std::span<const double> m,
             std::size_t cols, std::span<double> out);

// Exact integer row-vector times matrix: out[j] = sum_i x[i] * m[i*cols + j].
// Products are formed in 64-bit; callers keep |sum| below 2^63.
void vec_mat_i32(std::span<const std::int32_t> x,
                 std::span<const std::int32_t> m, std::size_t cols,
                 std::span<std::int64_t> out);

std::int64_t dot_i32(std::span<const std::int32_t> x,
                     std::span<const std::int32_t> y);

}  // namespace etdfe::kernels
