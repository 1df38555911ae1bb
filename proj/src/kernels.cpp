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

#include "etdfe/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "etdfe/error.hpp"
#include "kernels_impl.hpp"

namespace etdfe::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(ETDFE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& table_for(Backend backend) {
#if defined(ETDFE_HAVE_AVX2)
  if (backend == Backend::kAvx2) return avx2::table();
#endif
  (void)backend;
  return scalar::table();
}

Backend detect() {
  if (const char* env = std::getenv("ETDFE_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return Backend::kScalar;
    if (want == "avx2" && cpu_has_avx2()) return Backend::kAvx2;
  }
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

struct Active {
  std::atomic<Backend> backend{detect()};
};

Active& active() {
  static Active a;
  return a;
}

const KernelTable& current() { return table_for(active().backend.load()); }

void check_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    fail(ErrorCode::kShapeMismatch,
         std::string(what) + ": " + std::to_string(a) + " vs " +
             std::to_string(b));
  }
}

}  // namespace

std::string_view backend_name(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

bool backend_available(Backend backend) {
  return backend == Backend::kScalar || cpu_has_avx2();
}

Backend active_backend() { return active().backend.load(); }

void force_backend(Backend backend) {
  if (!backend_available(backend)) {
    fail(ErrorCode::kInvalidArgument,
         "kernel backend not available: " + std::string(backend_name(backend)));
  }
  active().backend.store(backend);
}

void reset_backend() { active().backend.store(detect()); }

double dot(std::span<const double> x, std::span<const double> y) {
  check_same(x.size(), y.size(), "dot");
  return current().dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same(x.size(), y.size(), "axpy");
  current().axpy(alpha, x.data(), y.data(), x.size());
}

void relu_inplace(std::span<double> x) { current().relu(x.data(), x.size()); }

void vec_mat(std::span<const double> x, std::span<const double> m,
             std::size_t cols, std::span<double> out) {
  check_same(m.size(), x.size() * cols, "vec_mat matrix");
  check_same(out.size(), cols, "vec_mat output");
  current().vec_mat(x.data(), x.size(), m.data(), cols, out.data());
}

void vec_mat_i32(std::span<const std::int32_t> x,
                 std::span<const std::int32_t> m, std::size_t cols,
                 std::span<std::int64_t> out) {
  check_same(m.size(), x.size() * cols, "vec_mat_i32 matrix");
  check_same(out.size(), cols, "vec_mat_i32 output");
  current().vec_mat_i32(x.data(), x.size(), m.data(), cols, out.data());
}

std::int64_t dot_i32(std::span<const std::int32_t> x,
                     std::span<const std::int32_t> y) {
  check_same(x.size(), y.size(), "dot_i32");
  return current().dot_i32(x.data(), y.data(), x.size());
}

}  // namespace etdfe::kernels
