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

// Machine-readable reports. JSON objects are emitted with sorted keys and
// every floating-point value printed with 17 significant digits, so equal
// inputs produce byte-identical output.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cardest/bounds.hpp"
#include "cardest/estimator.hpp"
#include "cardest/harness.hpp"

namespace cardest {

using json = nlohmann::json;  // std::map-backed, so keys iterate sorted

inline std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

namespace detail {

inline void write_json(std::ostringstream& out, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out << ",\n";
        first = false;
        out << pad << json(key).dump() << ": ";
        write_json(out, value, depth + 1);
      }
      out << '\n' << close_pad << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i != 0) out << ",\n";
        out << pad;
        write_json(out, j[i], depth + 1);
      }
      out << '\n' << close_pad << ']';
      return;
    }
    case json::value_t::number_float:
      out << format_double(j.get<double>());
      return;
    default:
      out << j.dump();
  }
}

// Integers wider than 64 bits are written as decimal strings.
inline json wide_integer(uint128 v) {
  if (v <= std::numeric_limits<std::uint64_t>::max()) return static_cast<std::uint64_t>(v);
  return to_string(v);
}

}  // namespace detail

// Deterministic, 2-space indented JSON followed by a newline.
inline std::string dump_json(const json& j) {
  std::ostringstream out;
  detail::write_json(out, j, 0);
  out << '\n';
  return out.str();
}

inline json bounds_json(const Precision& p, std::optional<std::uint64_t> n) {
  const KErr k = compute_k_err(p);
  json j = {{"delta_err", p.delta_err()},
            {"p_err", p.p_err()},
            {"k_err", k.value()},
            {"k_ceil", k.ceil()}};
  if (n) {
    j["n"] = *n;
    j["budget"] = sample_budget(*n, k);
    j["hard_cap"] = hard_cap(*n, k);
  }
  return j;
}

inline json estimate_json(const Estimate& e, std::uint64_t seed) {
  return {{"estimate", e.value},
          {"numerator", detail::wide_integer(e.numerator)},
          {"denominator", e.denominator},
          {"samples_used", e.samples_used},
          {"distinct", e.distinct},
          {"seed", seed}};
}

inline json budget_exhausted_json(const BudgetExhausted& ex, std::uint64_t seed) {
  return {{"error", "budget_exhausted"},
          {"hard_cap", ex.cap()},
          {"samples_used", ex.partial().samples},
          {"distinct", ex.partial().distinct},
          {"weighted", detail::wide_integer(ex.partial().weighted)},
          {"seed", seed}};
}

inline json report_json(const VerificationReport& r) {
  return {{"n", r.n},
          {"precision", {{"delta_err", r.precision.delta_err()}, {"p_err", r.precision.p_err()}}},
          {"trials", r.trials},
          {"completed_trials", r.completed},
          {"seed", r.base_seed},
          {"k_err", r.k_err},
          {"k_ceil", r.k_ceil},
          {"budget", r.budget},
          {"hard_cap", r.hard_cap},
          {"accuracy_failures", r.accuracy_failures},
          {"overestimates", r.overestimates},
          {"underestimates", r.underestimates},
          {"budget_exceedances", r.budget_exceedances},
          {"joint_failures", r.joint_failures},
          {"hard_cap_violations", r.hard_cap_violations},
          {"accuracy_failure_rate", r.accuracy_failure_rate},
          {"overestimate_rate", r.overestimate_rate},
          {"underestimate_rate", r.underestimate_rate},
          {"budget_exceed_rate", r.budget_exceed_rate},
          {"joint_failure_rate", r.joint_failure_rate},
          {"wilson_95_upper", r.wilson_95_upper},
          {"wilson_99_upper", r.wilson_99_upper},
          {"mean_samples", r.mean_samples},
          {"min_samples", r.min_samples},
          {"max_samples", r.max_samples},
          {"passed", r.passed()}};
}

inline json sweep_json(const std::vector<SweepOutcome>& outcomes) {
  json arr = json::array();
  for (const auto& o : outcomes) {
    json j = {{"n", o.point.n}, {"delta_err", o.point.delta_err}, {"p_err", o.point.p_err},
              {"passed", o.passed()}};
    if (o.report) j["report"] = report_json(*o.report);
    if (!o.error.empty()) j["error"] = o.error;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline constexpr const char* kSweepCsvHeader =
    "n,delta_err,p_err,trials,acc_fail_rate,budget_exceed_rate,joint_fail_rate,wilson99,"
    "mean_samples,max_samples,budget,hard_cap";

// One CSV row; metric fields are left empty for a point that produced no report.
inline std::string sweep_csv_row(const GridPoint& g, const VerificationReport* r) {
  std::string row = std::to_string(g.n) + ',' + format_double(g.delta_err) + ',' +
                    format_double(g.p_err) + ',';
  if (r == nullptr) return row + ",,,,,,,,";
  row += std::to_string(r->trials) + ',' + format_double(r->accuracy_failure_rate) + ',' +
         format_double(r->budget_exceed_rate) + ',' + format_double(r->joint_failure_rate) + ',' +
         format_double(r->wilson_99_upper) + ',' + format_double(r->mean_samples) + ',' +
         std::to_string(r->max_samples) + ',' + std::to_string(r->budget) + ',' +
         std::to_string(r->hard_cap);
  return row;
}

inline std::string sweep_csv(const std::vector<SweepOutcome>& outcomes) {
  std::string out = std::string(kSweepCsvHeader) + '\n';
  for (const auto& o : outcomes) {
    out += sweep_csv_row(o.point, o.report ? &*o.report : nullptr);
    out += '\n';
  }
  return out;
}

// Flat object as a header line plus one value line, keys sorted.
inline std::string flat_csv(const json& j) {
  std::string header, values;
  for (const auto& [key, value] : j.items()) {
    if (!header.empty()) {
      header += ',';
      values += ',';
    }
    header += key;
    if (value.is_number_float()) {
      values += format_double(value.get<double>());
    } else if (value.is_string()) {
      values += value.get<std::string>();
    } else {
      values += value.dump();
    }
  }
  return header + '\n' + values + '\n';
}

}  // namespace cardest
