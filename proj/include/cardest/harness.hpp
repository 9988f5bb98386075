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

// Monte Carlo verification of the estimator's guarantee.
//
// Each trial runs one estimator against a source of known cardinality n on
// its own generator stream (stream_id = trial index), so results do not
// depend on how trials are scheduled across workers. A trial fails
//   on accuracy   if the estimate leaves [(1 - delta_err) n, (1 + delta_err) n],
//   on budget     if it used more than sample_budget(n, k_err) samples.
// Their union (the joint failure) must occur with probability below p_err.
// Exceeding the hard cap n + ceil(k_err) is impossible for a correct
// estimator and is treated as a hard error.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "cardest/bounds.hpp"
#include "cardest/errors.hpp"
#include "cardest/estimator.hpp"
#include "cardest/random.hpp"
#include "cardest/samplers.hpp"

namespace cardest {

// Wilson-score upper confidence bound on a binomial proportion, using the
// two-sided normal quantile for `confidence`.
inline double wilson_upper(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) throw ParameterError("wilson_upper needs at least one trial");
  if (successes > trials) throw ParameterError("wilson_upper: successes exceed trials");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ParameterError("wilson_upper: confidence must lie in (0, 1)");
  }
  const double z =
      boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + confidence / 2.0);
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = phat + z2 / (2.0 * n);
  const double spread = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return std::min(1.0, (center + spread) / (1.0 + z2 / n));
}

struct TrialRecord {
  std::uint64_t trial_index = 0;
  double estimate_value = 0.0;  // NaN when the trial hit the hard cap
  std::uint64_t samples_used = 0;
  bool within_accuracy = false;
  bool overestimate = false;
  bool underestimate = false;
  bool within_budget = false;
  bool within_hard_cap = false;
};

struct VerificationReport {
  std::uint64_t n = 0;
  Precision precision{0.5, 0.5};
  std::uint64_t trials = 0;       // requested
  std::uint64_t completed = 0;    // aggregated below
  std::uint64_t base_seed = 0;
  double k_err = 0.0;
  std::uint64_t k_ceil = 0;
  std::uint64_t budget = 0;
  std::uint64_t hard_cap = 0;

  std::uint64_t accuracy_failures = 0;
  std::uint64_t overestimates = 0;
  std::uint64_t underestimates = 0;
  std::uint64_t budget_exceedances = 0;
  std::uint64_t joint_failures = 0;
  std::uint64_t hard_cap_violations = 0;

  double accuracy_failure_rate = 0.0;
  double overestimate_rate = 0.0;
  double underestimate_rate = 0.0;
  double budget_exceed_rate = 0.0;
  double joint_failure_rate = 0.0;
  double wilson_95_upper = 1.0;  // on the joint failure rate
  double wilson_99_upper = 1.0;
  double mean_samples = 0.0;
  std::uint64_t min_samples = 0;
  std::uint64_t max_samples = 0;

  // Pass criterion: Wilson 99% upper bound below p_err and no cap violations.
  bool passed() const {
    return completed == trials && hard_cap_violations == 0 && wilson_99_upper < precision.p_err();
  }
};

// A batch was aborted. Carries the report over the trials that completed.
class HarnessError : public std::runtime_error {
 public:
  HarnessError(const std::string& what, VerificationReport partial)
      : std::runtime_error(what), report_(std::move(partial)) {}
  const VerificationReport& report() const noexcept { return report_; }

 private:
  VerificationReport report_;
};

// Some trial needed more than n + ceil(k_err) samples. The report is complete.
class HardCapViolation : public HarnessError {
 public:
  using HarnessError::HarnessError;
};

namespace detail {

inline VerificationReport aggregate(VerificationReport r, const std::vector<std::optional<TrialRecord>>& records) {
  std::uint64_t total = 0;
  r.min_samples = std::numeric_limits<std::uint64_t>::max();
  for (const auto& rec : records) {
    if (!rec) continue;
    ++r.completed;
    total += rec->samples_used;
    r.min_samples = std::min(r.min_samples, rec->samples_used);
    r.max_samples = std::max(r.max_samples, rec->samples_used);
    r.accuracy_failures += !rec->within_accuracy;
    r.overestimates += rec->overestimate;
    r.underestimates += rec->underestimate;
    r.budget_exceedances += !rec->within_budget;
    r.joint_failures += !(rec->within_accuracy && rec->within_budget);
    r.hard_cap_violations += !rec->within_hard_cap;
  }
  if (r.completed == 0) {
    r.min_samples = 0;
    return r;
  }
  const auto c = static_cast<double>(r.completed);
  r.accuracy_failure_rate = static_cast<double>(r.accuracy_failures) / c;
  r.overestimate_rate = static_cast<double>(r.overestimates) / c;
  r.underestimate_rate = static_cast<double>(r.underestimates) / c;
  r.budget_exceed_rate = static_cast<double>(r.budget_exceedances) / c;
  r.joint_failure_rate = static_cast<double>(r.joint_failures) / c;
  r.wilson_95_upper = wilson_upper(r.joint_failures, r.completed, 0.95);
  r.wilson_99_upper = wilson_upper(r.joint_failures, r.completed, 0.99);
  r.mean_samples = static_cast<double>(total) / c;
  return r;
}

}  // namespace detail

// One verification trial against `source`, whose cardinality is n.
template <SamplingSource Source>
TrialRecord run_trial(const Source& source, std::uint64_t n, const Precision& precision,
                      std::uint64_t base_seed, std::uint64_t trial_index) {
  const KErr k = compute_k_err(precision);
  const std::uint64_t cap = hard_cap(n, k);
  TrialRecord rec;
  rec.trial_index = trial_index;
  try {
    const Estimate e = estimate(precision, source, RngSeed{base_seed, trial_index}, cap);
    const double nd = static_cast<double>(n);
    rec.estimate_value = e.value;
    rec.samples_used = e.samples_used;
    rec.underestimate = e.value < (1.0 - precision.delta_err()) * nd;
    rec.overestimate = e.value > (1.0 + precision.delta_err()) * nd;
    rec.within_accuracy = !rec.underestimate && !rec.overestimate;
    rec.within_budget = e.samples_used <= sample_budget(n, k);
    rec.within_hard_cap = true;
  } catch (const BudgetExhausted& ex) {
    rec.estimate_value = std::numeric_limits<double>::quiet_NaN();
    rec.samples_used = ex.partial().samples;
  }
  return rec;
}

// Runs `trials` independent estimator runs against `source` and aggregates
// them. `threads` == 0 uses the hardware concurrency. The report does not
// depend on `threads`.
template <SamplingSource Source>
VerificationReport run_trials(const Source& source, const Precision& precision,
                              std::uint64_t trials, std::uint64_t base_seed,
                              unsigned threads = 0) {
  if (trials == 0) throw ParameterError("run_trials needs at least one trial");
  const auto known = source.known_cardinality();
  if (!known) throw ParameterError("verification needs a source of known cardinality");

  VerificationReport base;
  base.n = *known;
  base.precision = precision;
  base.trials = trials;
  base.base_seed = base_seed;
  const KErr k = compute_k_err(precision);
  base.k_err = k.value();
  base.k_ceil = k.ceil();
  base.budget = sample_budget(base.n, k);
  base.hard_cap = hard_cap(base.n, k);

  std::vector<std::optional<TrialRecord>> records(trials);
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::vector<std::exception_ptr> errors(trials);

  auto worker = [&] {
    for (std::uint64_t i = next++; i < trials && !stop; i = next++) {
      try {
        records[i] = run_trial(source, base.n, precision, base_seed, i);
      } catch (...) {
        errors[i] = std::current_exception();
        stop = true;
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  VerificationReport report = detail::aggregate(base, records);
  for (std::uint64_t i = 0; i < trials; ++i) {
    if (!errors[i]) continue;
    std::string what = "trial " + std::to_string(i) + " failed";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& ex) {
      what += ": ";
      what += ex.what();
    } catch (...) {
    }
    throw HarnessError(what, report);
  }
  if (report.hard_cap_violations > 0) {
    throw HardCapViolation(std::to_string(report.hard_cap_violations) +
                               " trial(s) exceeded the hard cap of " +
                               std::to_string(report.hard_cap) + " samples",
                           report);
  }
  return report;
}

inline VerificationReport run_trials(std::uint64_t n, const Precision& precision,
                                     std::uint64_t trials, std::uint64_t base_seed,
                                     unsigned threads = 0) {
  return run_trials(SyntheticSource(n), precision, trials, base_seed, threads);
}

struct GridPoint {
  std::uint64_t n = 0;
  double delta_err = 0.0;
  double p_err = 0.0;
};

struct SweepOutcome {
  GridPoint point;
  std::optional<VerificationReport> report;  // partial if `error` is set
  std::string error;                         // empty on success

  bool passed() const { return error.empty() && report && report->passed(); }
};

// One verification per grid point, in input order. A failing point is
// recorded in place and does not stop the others.
inline std::vector<SweepOutcome> sweep(const std::vector<GridPoint>& grid, std::uint64_t trials,
                                       std::uint64_t base_seed, unsigned threads = 0) {
  if (grid.empty()) throw ParameterError("sweep needs a non-empty grid");
  std::vector<SweepOutcome> out;
  out.reserve(grid.size());
  for (const GridPoint& g : grid) {
    SweepOutcome o{g, std::nullopt, {}};
    try {
      o.report = run_trials(g.n, Precision(g.delta_err, g.p_err), trials, base_seed, threads);
    } catch (const HarnessError& ex) {
      o.report = ex.report();
      o.error = ex.what();
    } catch (const std::exception& ex) {
      o.error = ex.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace cardest
