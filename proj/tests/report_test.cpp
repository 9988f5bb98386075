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

#include "cardest/report.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

namespace cardest {
namespace {

TEST(FormatDoubleTest, SeventeenSignificantDigits) {
  EXPECT_EQ(format_double(1.0), "1.0");
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1e300), "1.0000000000000001e+300");
  EXPECT_EQ(format_double(std::nan("")), "null");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "null");
}

TEST(FormatDoubleTest, RoundTripsExactly) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}

TEST(DumpJsonTest, SortedKeysAndStableBytes) {
  json j;
  j["zeta"] = 1;
  j["alpha"] = 0.25;
  j["mid"] = {{"b", true}, {"a", "text"}};
  EXPECT_EQ(dump_json(j),
            "{\n"
            "  \"alpha\": 0.25,\n"
            "  \"mid\": {\n"
            "    \"a\": \"text\",\n"
            "    \"b\": true\n"
            "  },\n"
            "  \"zeta\": 1\n"
            "}\n");
  EXPECT_EQ(json::parse(dump_json(j)), j);
}

TEST(BoundsJsonTest, FieldsWithAndWithoutN) {
  const Precision p(0.5, 0.5);
  const json with_n = bounds_json(p, 100);
  EXPECT_EQ(with_n["k_ceil"], 29);
  EXPECT_EQ(with_n["budget"], 129);
  EXPECT_EQ(with_n["hard_cap"], 129);
  EXPECT_NEAR(with_n["k_err"].get<double>(), 28.6681515076, 1e-9);
  const json no_n = bounds_json(Precision(0.1, 0.05), std::nullopt);
  EXPECT_EQ(no_n["k_ceil"], 1638);
  EXPECT_FALSE(no_n.contains("budget"));
  EXPECT_FALSE(no_n.contains("hard_cap"));
}

TEST(EstimateJsonTest, WideNumeratorBecomesString) {
  Estimate e;
  e.numerator = static_cast<uint128>(1) << 70;
  e.denominator = 3;
  e.value = 1.0;
  EXPECT_EQ(estimate_json(e, 0)["numerator"], "1180591620717411303424");
  e.numerator = 12;
  EXPECT_EQ(estimate_json(e, 0)["numerator"], 12);
}

TEST(SweepCsvTest, HeaderAndRowShape) {
  const auto outcomes = sweep({{100, 0.5, 0.5}, {100, 0.0, 0.5}}, 20, 0);
  const std::string csv = sweep_csv(outcomes);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "n,delta_err,p_err,trials,acc_fail_rate,budget_exceed_rate,joint_fail_rate,wilson99,"
            "mean_samples,max_samples,budget,hard_cap");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11) << line;
  }
  EXPECT_EQ(rows, 2);
  EXPECT_NE(csv.find("100,0.0,0.5,,,"), std::string::npos);
}

TEST(FlatCsvTest, HeaderMatchesSortedKeys) {
  const std::string csv = flat_csv(bounds_json(Precision(0.5, 0.5), 100));
  EXPECT_EQ(csv,
            "budget,delta_err,hard_cap,k_ceil,k_err,n,p_err\n"
            "129,0.5,129,29,28.668151507648879,100,0.5\n");
}

}  // namespace
}  // namespace cardest
