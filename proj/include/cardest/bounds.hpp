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

// Closed-form quantities behind the sampling estimator: the repeat threshold
// k_err, the high-probability and deterministic sample budgets, and the
// exponential tail bounds that control each failure event.
//
// Tail bounds are evaluated as exp(log-bound). Very small bounds underflow
// to 0.0, which means "below the smallest double", never "impossible"; the
// *_log variants return the natural log for callers that need the magnitude.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "cardest/errors.hpp"
#include "cardest/uint128.hpp"

namespace cardest {

// Accuracy/confidence pair (delta_err, p_err). Both are open-interval (0, 1);
// construction rejects anything else, so every Precision in flight is valid.
class Precision {
 public:
  Precision(double delta_err, double p_err) : delta_err_(delta_err), p_err_(p_err) {
    if (!(delta_err > 0.0 && delta_err < 1.0)) {
      throw ParameterError("delta_err must lie in (0, 1), got " + std::to_string(delta_err));
    }
    if (!(p_err > 0.0 && p_err < 1.0)) {
      throw ParameterError("p_err must lie in (0, 1), got " + std::to_string(p_err));
    }
  }

  double delta_err() const noexcept { return delta_err_; }
  double p_err() const noexcept { return p_err_; }

  friend bool operator==(const Precision&, const Precision&) = default;

 private:
  double delta_err_;
  double p_err_;
};

// Repeat-count threshold. Sampling stops once the number of repeats reaches
// it; since repeats are integral that is the same as reaching ceil().
class KErr {
 public:
  explicit KErr(double value) : value_(value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ParameterError("k_err must be positive and finite");
    }
    if (value >= 0x1p64) throw ParameterError("k_err does not fit a 64-bit repeat counter");
  }

  double value() const noexcept { return value_; }
  std::uint64_t ceil() const noexcept { return static_cast<std::uint64_t>(std::ceil(value_)); }

 private:
  double value_;
};

// 4 / delta_err^2 * ln(3 / p_err)
inline KErr compute_k_err(const Precision& p) {
  const double d = p.delta_err();
  return KErr(4.0 / (d * d) * std::log(3.0 / p.p_err()));
}

namespace detail {

// Smallest integer >= k * n, using the exact product k * n (not its rounding).
inline uint128 ceil_product(double k, std::uint64_t n) {
  const double nd = static_cast<double>(n);
  const double hi = k * nd;
  if (!(hi < 0x1p126)) throw ParameterError("k_err * n is too large for the budget computation");
  const double lo = std::fma(k, nd, -hi);  // k * n == hi + lo exactly
  const double hi_ceil = std::ceil(hi);
  if (hi_ceil != hi) {
    // hi < 2^52 here, and no integer can sit between hi and hi + lo.
    return static_cast<uint128>(hi_ceil);
  }
  const double lo_ceil = std::ceil(lo);
  const uint128 base = static_cast<uint128>(hi);
  return lo_ceil >= 0.0 ? base + static_cast<uint128>(lo_ceil)
                        : base - static_cast<uint128>(-lo_ceil);
}

// Smallest r with r * r >= x. The floating sqrt is only a starting guess.
inline std::uint64_t ceil_sqrt(uint128 x) {
  auto r = static_cast<uint128>(std::sqrt(static_cast<long double>(x)));
  while (r * r < x) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= x) --r;
  return static_cast<std::uint64_t>(r);
}

inline void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0)) throw ParameterError(std::string(what) + " must be non-negative");
}

}  // namespace detail

// ceil(sqrt(k * n)) with exact ceiling semantics, computed over the exact
// real product so perfect squares never round up to the next integer.
inline std::uint64_t ceil_sqrt_product(std::uint64_t n, const KErr& k) {
  return detail::ceil_sqrt(detail::ceil_product(k.value(), n));
}

// High-probability bound on RandomSample invocations:
// min(n, 2 * ceil(sqrt(k * n))) + ceil(k).
inline std::uint64_t sample_budget(std::uint64_t n, const KErr& k) {
  if (n == 0) throw ParameterError("set cardinality n must be at least 1");
  if (n > (std::uint64_t{1} << 53)) throw ParameterError("set cardinality n must not exceed 2^53");
  const uint128 twice = uint128{2} * ceil_sqrt_product(n, k);
  const std::uint64_t head = twice < n ? static_cast<std::uint64_t>(twice) : n;
  return head + k.ceil();
}

// Deterministic cap n + ceil(k): that many samples always contain ceil(k) repeats.
inline std::uint64_t hard_cap(std::uint64_t n, const KErr& k) {
  if (n == 0) throw ParameterError("set cardinality n must be at least 1");
  return n + k.ceil();
}

// Angluin-Valiant lower tail: Pr[X <= (1 - delta) E[X]] <= exp(-delta^2 E / 2).
inline double chernoff_lower_tail(double delta, double expectation) {
  detail::require_nonnegative(delta, "delta");
  detail::require_nonnegative(expectation, "expectation");
  return std::exp(-(delta * delta) * expectation / 2.0);
}

// Angluin-Valiant upper tail: Pr[X >= (1 + delta) E[X]] <= exp(-delta^2 E / (2 + delta)).
inline double chernoff_upper_tail(double delta, double expectation) {
  detail::require_nonnegative(delta, "delta");
  detail::require_nonnegative(expectation, "expectation");
  if (std::isinf(delta)) return expectation > 0.0 ? 0.0 : 1.0;
  return std::exp(-(delta * delta) * expectation / (2.0 + delta));
}

// ln of the bound on returning an estimate of (1 + delta)|I|, delta > delta_err.
inline double overestimate_tail_log(double delta, const Precision& p) {
  if (!(delta > p.delta_err()) || !std::isfinite(delta)) {
    throw ParameterError("overestimate deviation must be finite and exceed delta_err");
  }
  const double de = p.delta_err();
  const double exponent = 2.0 * delta * delta / (de * de * (1.0 + delta));
  return exponent * std::log(p.p_err() / 3.0);
}

// (p_err / 3)^(2 delta^2 / (delta_err^2 (1 + delta)))
inline double overestimate_tail(double delta, const Precision& p) {
  return std::exp(overestimate_tail_log(delta, p));
}

// ln of the bound on returning an estimate of (1 - delta)|I|, delta_err < delta < 1.
inline double underestimate_tail_log(double delta, const Precision& p) {
  if (!(delta > p.delta_err() && delta < 1.0)) {
    throw ParameterError("underestimate deviation must lie in (delta_err, 1)");
  }
  const double de = p.delta_err();
  const double exponent = 4.0 * delta * delta / (de * de * (2.0 - delta));
  return exponent * std::log(p.p_err() / 3.0);
}

// (p_err / 3)^(4 delta^2 / (delta_err^2 (2 - delta)))
inline double underestimate_tail(double delta, const Precision& p) {
  return std::exp(underestimate_tail_log(delta, p));
}

// ln of the bound on seeing fewer than k_err repeats among the first
// 2 ceil(sqrt(k_err |I|)) distinct samples: -k_err / 4.
inline double repeat_shortfall_tail_log(const Precision& p) {
  return -compute_k_err(p).value() / 4.0;
}

// exp(-k_err / 4), equivalently (p_err / 3)^(1 / delta_err^2).
inline double repeat_shortfall_tail(const Precision& p) {
  return std::exp(repeat_shortfall_tail_log(p));
}

}  // namespace cardest
