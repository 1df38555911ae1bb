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

#include <openssl/bn.h>
#include <openssl/ec.h>

#include <memory>

#include "etdfe/group.hpp"

namespace etdfe::group::detail {

struct BnFree {
  void operator()(BIGNUM* bn) const { BN_free(bn); }
};
using Bn = std::unique_ptr<BIGNUM, BnFree>;

struct PointFree {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
using Point = std::unique_ptr<EC_POINT, PointFree>;

Bn new_bn();

// Curve handles shared read-only across threads. `fast` uses OpenSSL's
// optimised P-256 method; `generic` is the same curve under the generic
// Montgomery method, whose affine conversion is cheap enough for building
// large dlog tables.
struct Curve {
  EC_GROUP* fast = nullptr;
  EC_GROUP* generic = nullptr;
  BIGNUM* order = nullptr;
  BIGNUM* field = nullptr;
};

const Curve& curve();

// Per-thread scratch context.
BN_CTX* bn_ctx();

[[noreturn]] void crypto_fail(const char* what);

Bn scalar_to_bn(const Scalar& s);
Scalar bn_to_scalar(const BIGNUM* bn);  // reduces mod q
Bn int_to_bn_mod_q(std::int64_t value);

}  // namespace etdfe::group::detail
