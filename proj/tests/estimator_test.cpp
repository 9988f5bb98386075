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

#include "cardest/estimator.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cardest/samplers.hpp"
#include "gtest/gtest.h"
#include "oracle.hpp"

namespace cardest {
namespace {

const Precision kHalf(0.5, 0.5);  // k_err = 28.668..., ceil 29

SampleId id(std::uint64_t v) { return SampleId{v}; }

TEST(EstimatorTest, FreshStateIsEmpty) {
  Estimator<> est(kHalf);
  EXPECT_EQ(est.samples(), 0u);
  EXPECT_EQ(est.distinct(), 0u);
  EXPECT_EQ(est.weighted(), 0u);
  EXPECT_EQ(est.seen_size(), 0u);
  EXPECT_FALSE(est.terminated());
  EXPECT_NEAR(est.k().value(), 28.668151507648880013, 1e-12);

  Estimator<> tight(Precision(0.1, 0.05));
  EXPECT_NEAR(tight.k().value(), 1637.7378248888400699, 1e-9);
  EXPECT_FALSE(tight.terminated());
}

TEST(EstimatorTest, FirstSampleIsDistinct) {
  Estimator<> est(kHalf);
  est.observe(id(7));
  EXPECT_EQ(est.counters(), (Counters{1, 1, 0}));
  EXPECT_FALSE(est.terminated());
}

TEST(EstimatorTest, WeightUsesDistinctCountBeforeTheSample) {
  Estimator<> est(kHalf);
  est.observe(id(0));  // w += 0
  est.observe(id(1));  // w += 1
  est.observe(id(0));  // w += 2
  EXPECT_EQ(est.counters(), (Counters{3, 2, 3}));
  EXPECT_EQ(est.counters().repeats(), 1u);
}

TEST(EstimatorTest, SingletonUniverseTerminatesAfterThirtySamples) {
  Estimator<> est(kHalf);
  for (int i = 0; i < 29; ++i) {
    est.observe(id(42));
    EXPECT_FALSE(est.terminated()) << "after " << i + 1 << " samples";
  }
  est.observe(id(42));
  ASSERT_TRUE(est.terminated());
  EXPECT_EQ(est.counters(), (Counters{30, 1, 29}));
  const Estimate e = est.finish();
  EXPECT_EQ(e.numerator, 29u);
  EXPECT_EQ(e.denominator, 29u);
  EXPECT_EQ(e.value, 1.0);
  EXPECT_EQ(e.samples_used, 30u);
  EXPECT_EQ(e.distinct, 1u);
}

TEST(EstimatorTest, FinishDividesWeightByRepeats) {
  // 71 distinct ids, then 29 repeats of id 0: w = 0 + 1 + ... + 70 + 29 * 71.
  Estimator<> est(kHalf);
  for (std::uint64_t i = 0; i < 71; ++i) est.observe(id(i));
  for (int i = 0; i < 29; ++i) est.observe(id(0));
  ASSERT_TRUE(est.terminated());
  const Estimate e = est.finish();
  EXPECT_EQ(e.numerator, 70u * 71u / 2u + 29u * 71u);
  EXPECT_EQ(e.denominator, 29u);
  EXPECT_DOUBLE_EQ(e.value, (70.0 * 71.0 / 2.0 + 29.0 * 71.0) / 29.0);
  EXPECT_GE(e.denominator, 29u);
}

TEST(EstimatorTest, StateMachineViolationsThrow) {
  Estimator<> est(kHalf);
  EXPECT_THROW(est.finish(), StateError);
  for (int i = 0; i < 30; ++i) est.observe(id(1));
  ASSERT_TRUE(est.terminated());
  EXPECT_THROW(est.observe(id(1)), StateError);
  EXPECT_TRUE(est.terminated());
  EXPECT_EQ(est.samples(), 30u);
}

TEST(EstimatorTest, MatchesBruteForceReplayOnAllShortSequences) {
  // Every sequence of length <= 8 over {0, 1, 2}. k_err is far above 8, so
  // the stopping rule never interferes.
  std::vector<std::uint64_t> seq;
  std::uint64_t sequences = 0;
  for (std::size_t len = 0; len <= 8; ++len) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < len; ++i) total *= 3;
    for (std::uint64_t code = 0; code < total; ++code) {
      seq.assign(len, 0);
      for (std::uint64_t c = code, i = 0; i < len; ++i, c /= 3) seq[i] = c % 3;

      Estimator<std::uint64_t> est(Precision(0.1, 0.05));
      for (auto x : seq) est.observe(x);
      const auto want = oracle::replay(seq);
      ASSERT_EQ(est.samples(), want.s);
      ASSERT_EQ(est.distinct(), want.d);
      ASSERT_EQ(est.weighted(), want.w);
      std::uint64_t sum_d = 0;
      for (auto d : want.d_before) sum_d += d;
      ASSERT_EQ(est.weighted(), sum_d);
      ASSERT_EQ(est.seen_size(), est.distinct());
      ++sequences;
    }
  }
  EXPECT_EQ(sequences, 9841u);  // (3^9 - 1) / 2
}

TEST(EstimatorTest, CountersAreMonotoneAndBounded) {
  Rng rng = make_rng({123, 0});
  Estimator<> est(Precision(0.3, 0.2));
  Counters prev = est.counters();
  while (!est.terminated()) {
    est.observe(SampleId{uniform_below(rng, 500)});
    const Counters& c = est.counters();
    EXPECT_EQ(c.samples, prev.samples + 1);
    EXPECT_GE(c.distinct, prev.distinct);
    EXPECT_GE(c.weighted, prev.weighted);
    EXPECT_LE(c.distinct, c.samples);
    EXPECT_LE(c.weighted, static_cast<uint128>(c.samples) * (c.samples - 1) / 2);
    EXPECT_EQ(est.terminated(), c.repeats() >= est.k().value());
    prev = c;
  }
}

TEST(EstimatorTest, WorksWithStringIdentities) {
  Estimator<std::string> est(kHalf);
  est.observe("a");
  est.observe("b");
  est.observe("a");
  EXPECT_EQ(est.counters(), (Counters{3, 2, 3}));
}

TEST(RunTest, SingletonSourceIsExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Estimate e = estimate(kHalf, SyntheticSource(1), RngSeed{seed, 0});
    EXPECT_EQ(e.value, 1.0);
    EXPECT_EQ(e.samples_used, compute_k_err(kHalf).ceil() + 1);
  }
}

TEST(RunTest, CapBelowMinimumTerminationThrowsWithPartialCounters) {
  try {
    estimate(kHalf, SyntheticSource(1), RngSeed{0, 0}, 5);
    FAIL() << "expected BudgetExhausted";
  } catch (const BudgetExhausted& ex) {
    EXPECT_EQ(ex.cap(), 5u);
    EXPECT_EQ(ex.partial(), (Counters{5, 1, 4}));
  }
}

TEST(RunTest, CapEqualToTerminationPointSucceeds) {
  const Estimate e = estimate(kHalf, SyntheticSource(1), RngSeed{0, 0}, 30);
  EXPECT_EQ(e.samples_used, 30u);
}

TEST(RunTest, SourceFailurePropagates) {
  int calls = 0;
  auto failing = [&]() -> SampleId {
    if (++calls > 3) throw std::runtime_error("source went away");
    return SampleId{static_cast<std::uint64_t>(calls)};
  };
  EXPECT_THROW(run(kHalf, failing), std::runtime_error);
}

TEST(RunTest, DeterministicForFixedSeed) {
  const Precision p(0.2, 0.1);
  const Estimate a = estimate(p, SyntheticSource(10000), RngSeed{42, 0});
  const Estimate b = estimate(p, SyntheticSource(10000), RngSeed{42, 0});
  EXPECT_EQ(a, b);
  const Estimate c = estimate(p, SyntheticSource(10000), RngSeed{42, 1});
  EXPECT_NE(a, c);
}

TEST(RunTest, AccurateOnMostSeeds) {
  const Precision p(0.2, 0.1);
  int within = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    const Estimate e = estimate(p, SyntheticSource(10000), RngSeed{static_cast<std::uint64_t>(s), 0});
    within += e.value > 8000.0 && e.value < 12000.0;
    EXPECT_LE(e.samples_used, 10000u + 341u);
  }
  EXPECT_GE(within, seeds * 9 / 10);
}

}  // namespace
}  // namespace cardest
