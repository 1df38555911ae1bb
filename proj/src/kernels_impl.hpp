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

#include <cstddef>
#include <cstdint>

namespace etdfe::kernels {

struct KernelTable {
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*relu)(double* x, std::size_t n);
  void (*vec_mat)(const double* x, std::size_t rows, const double* m,
                  std::size_t cols, double* out);
  void (*vec_mat_i32)(const std::int32_t* x, std::size_t rows,
                      const std::int32_t* m, std::size_t cols,
                      std::int64_t* out);
  std::int64_t (*dot_i32)(const std::int32_t* x, const std::int32_t* y,
                          std::size_t n);
};

namespace scalar {
const KernelTable& table();
}

#if defined(ETDFE_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif

}  // namespace etdfe::kernels
