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

#pragma once

#include <concepts>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cardest/errors.hpp"
#include "cardest/estimator.hpp"
#include "cardest/random.hpp"

namespace cardest {

// A uniform sampling primitive over a fixed finite set. Sources hold no
// randomness of their own; the caller owns the generator, so one loaded
// source can serve any number of independent streams.
template <typename S>
concept SamplingSource = requires(const S& s, Rng& rng) {
  { s.next(rng) } -> std::same_as<SampleId>;
  { s.known_cardinality() } -> std::same_as<std::optional<std::uint64_t>>;
};

// Uniform over {0, ..., n-1}.
class SyntheticSource {
 public:
  explicit SyntheticSource(std::uint64_t n) : n_(n) {
    if (n == 0) throw ParameterError("synthetic source needs n >= 1");
  }

  SampleId next(Rng& rng) const { return SampleId{uniform_below(rng, n_)}; }
  std::optional<std::uint64_t> known_cardinality() const { return n_; }

 private:
  std::uint64_t n_;
};

enum class Identity { kPosition, kContent };

// Lines of a text file. With kPosition every line index is its own element.
// With kContent a line is identified by its text (the id of its first
// occurrence); draws are then uniform over distinct texts only when the
// file has no duplicate lines.
class FileSource {
 public:
  using WarningSink = std::function<void(std::string_view)>;

  FileSource(const std::string& path, Identity identity,
             const WarningSink& warn = [](std::string_view msg) { std::clog << msg << '\n'; })
      : identity_(identity) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
    }
    if (in.bad()) throw IoError("read error on '" + path + "'");
    if (lines.empty()) throw IoError("'" + path + "' holds no lines");

    line_count_ = lines.size();
    std::unordered_map<std::string_view, std::uint64_t> first_seen;
    ids_.reserve(lines.size());
    for (std::uint64_t i = 0; i < lines.size(); ++i) {
      const auto [it, fresh] = first_seen.try_emplace(lines[i], i);
      ids_.push_back(identity == Identity::kContent ? it->second : i);
      if (!fresh) ++duplicates_;
    }
    distinct_ = first_seen.size();

    if (identity == Identity::kContent && duplicates_ > 0 && warn) {
      warn("warning: '" + path + "' has " + std::to_string(duplicates_) +
           " duplicate line(s); content identity samples its " + std::to_string(distinct_) +
           " distinct lines non-uniformly and the accuracy guarantee does not apply");
    }
  }

  SampleId next(Rng& rng) const { return SampleId{ids_[uniform_below(rng, ids_.size())]}; }

  // Size of the set being sampled: line count, or distinct-line count.
  std::optional<std::uint64_t> known_cardinality() const {
    return identity_ == Identity::kContent ? distinct_ : line_count_;
  }

  Identity identity() const noexcept { return identity_; }
  std::uint64_t line_count() const noexcept { return line_count_; }
  std::uint64_t duplicate_count() const noexcept { return duplicates_; }

 private:
  Identity identity_;
  std::vector<std::uint64_t> ids_;
  std::uint64_t line_count_ = 0;
  std::uint64_t distinct_ = 0;
  std::uint64_t duplicates_ = 0;
};

// Estimator run against a source with a dedicated generator stream.
template <SamplingSource Source>
Estimate estimate(const Precision& precision, const Source& source, RngSeed seed,
                  std::optional<std::uint64_t> cap = std::nullopt) {
  Rng rng = make_rng(seed);
  return run(precision, [&] { return source.next(rng); }, cap);
}

}  // namespace cardest
