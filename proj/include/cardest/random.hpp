// Copyright 2026 The cardest Authors
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

// Seeded randomness with a fixed cross-platform derivation.
//
// Generator: std::mt19937_64, whose output sequence is fully pinned by the
// C++ standard. A (base_seed, stream_id) pair is expanded through
// std::seed_seq (also fully specified) from the four 32-bit words
//   [base_seed lo, base_seed hi, stream_id lo, stream_id hi].
// Bounded integers use Lemire's multiply-and-reject method, so no
// implementation-defined std::*_distribution is involved anywhere.

#pragma once

#include <cstdint>
#include <random>

#include "cardest/errors.hpp"
#include "cardest/uint128.hpp"

namespace cardest {

using Rng = std::mt19937_64;

struct RngSeed {
  std::uint64_t base_seed = 0;
  std::uint64_t stream_id = 0;
};

inline Rng make_rng(RngSeed seed) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed.base_seed), static_cast<std::uint32_t>(seed.base_seed >> 32),
      static_cast<std::uint32_t>(seed.stream_id), static_cast<std::uint32_t>(seed.stream_id >> 32)};
  return Rng(seq);
}

// Uniform integer in [0, bound) without modulo bias.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw ParameterError("uniform_below needs a positive bound");
  uint128 m = static_cast<uint128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    while (low < threshold) {
      m = static_cast<uint128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace cardest
