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

// Repeat-counting cardinality estimator.
//
// Samples are consumed one at a time. Three counters are kept:
//   s  samples taken,
//   d  distinct samples taken,
//   w  sum over samples of the value d had just before that sample.
// The expected number of repeats after s samples is w / |I|, so once the
// observed repeat count s - d reaches k_err the estimate w / (s - d) is
// returned. For a uniform source it lies within (1 +- delta_err)|I| with
// probability greater than 1 - p_err.

#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>

#include "cardest/bounds.hpp"
#include "cardest/errors.hpp"

namespace cardest {

// Opaque identity of one element of the sampled set.
struct SampleId {
  std::uint64_t value = 0;
  friend auto operator<=>(const SampleId&, const SampleId&) = default;
};

struct Counters {
  std::uint64_t samples = 0;   // s
  std::uint64_t distinct = 0;  // d
  uint128 weighted = 0;        // w

  std::uint64_t repeats() const noexcept { return samples - distinct; }
  friend bool operator==(const Counters&, const Counters&) = default;
};

struct Estimate {
  uint128 numerator = 0;          // w at termination
  std::uint64_t denominator = 0;  // s - d at termination
  double value = 0.0;             // numerator / denominator, rounded
  std::uint64_t samples_used = 0;
  std::uint64_t distinct = 0;

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

// Raised by run() when the caller's cap is reached before the stopping rule.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted(std::uint64_t cap, Counters partial)
      : std::runtime_error("sample cap of " + std::to_string(cap) +
                           " reached before the stopping rule fired"),
        cap_(cap),
        partial_(partial) {}

  std::uint64_t cap() const noexcept { return cap_; }
  const Counters& partial() const noexcept { return partial_; }

 private:
  std::uint64_t cap_;
  Counters partial_;
};

template <typename Id = SampleId>
  requires std::equality_comparable<Id>
class Estimator;

}  // namespace cardest

template <>
struct std::hash<cardest::SampleId> {
  std::size_t operator()(const cardest::SampleId& id) const noexcept {
    // splitmix64 finalizer; identity hashing clusters sequential ids.
    std::uint64_t z = id.value + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

namespace cardest {

// Single-owner state machine. Movable between threads, never shared.
template <typename Id>
  requires std::equality_comparable<Id>
class Estimator {
 public:
  explicit Estimator(const Precision& precision)
      : k_(compute_k_err(precision)), k_ceil_(k_.ceil()) {}

  // Feeds one sample. The weight is accumulated with the distinct count from
  // before the sample is classified.
  void observe(const Id& x) {
    if (terminated_) throw StateError("observe() called after the estimator terminated");
    counters_.weighted += counters_.distinct;
    ++counters_.samples;
    if (seen_.insert(x).second) ++counters_.distinct;
    // s - d is integral, so comparing against ceil(k) is the same as against k.
    terminated_ = counters_.repeats() >= k_ceil_;
  }

  Estimate finish() const {
    if (!terminated_) throw StateError("finish() called before the stopping rule fired");
    Estimate e;
    e.numerator = counters_.weighted;
    e.denominator = counters_.repeats();
    e.value = static_cast<double>(e.numerator) / static_cast<double>(e.denominator);
    e.samples_used = counters_.samples;
    e.distinct = counters_.distinct;
    return e;
  }

  const Counters& counters() const noexcept { return counters_; }
  std::uint64_t samples() const noexcept { return counters_.samples; }
  std::uint64_t distinct() const noexcept { return counters_.distinct; }
  uint128 weighted() const noexcept { return counters_.weighted; }
  const KErr& k() const noexcept { return k_; }
  bool terminated() const noexcept { return terminated_; }
  std::size_t seen_size() const noexcept { return seen_.size(); }

 private:
  KErr k_;
  std::uint64_t k_ceil_;
  Counters counters_;
  std::unordered_set<Id> seen_;
  bool terminated_ = false;
};

// Draws from `draw` until the stopping rule fires and returns the estimate.
// With a cap, throws BudgetExhausted if `cap` samples have been taken and the
// rule still has not fired. Exceptions from `draw` propagate unchanged.
template <typename Draw>
  requires std::invocable<Draw&>
Estimate run(const Precision& precision, Draw&& draw,
             std::optional<std::uint64_t> cap = std::nullopt) {
  using Id = std::remove_cvref_t<std::invoke_result_t<Draw&>>;
  Estimator<Id> est(precision);
  while (!est.terminated()) {
    if (cap && est.samples() >= *cap) throw BudgetExhausted(*cap, est.counters());
    est.observe(std::invoke(draw));
  }
  return est.finish();
}

}  // namespace cardest
