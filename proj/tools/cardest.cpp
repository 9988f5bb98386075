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

// cardest: bounds, one-shot estimation, Monte Carlo verification and sweeps.
//
// Exit codes:
//   0  success
//   2  argument or validation error
//   3  sample cap reached before the estimator terminated
//   4  I/O error
//   5  verification failed

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <CLI11.hpp>

#include "cardest/cardest.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kBudgetExhausted = 3,
  kIo = 4,
  kVerificationFailed = 5,
};

enum class Format { kDefault, kJson, kCsv };

struct CliConfig {
  double delta_err = 0.0;
  double p_err = 0.0;
  std::optional<std::uint64_t> n;
  std::optional<std::string> input_path;
  cardest::Identity identity = cardest::Identity::kPosition;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> hard_cap;
  Format format = Format::kDefault;
  std::optional<std::string> output_path;
  std::string grid_path;
  unsigned threads = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const CliConfig& cfg, const std::string& text) {
  if (!cfg.output_path) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(*cfg.output_path, std::ios::binary);
  if (!out) throw cardest::IoError("cannot open '" + *cfg.output_path + "' for writing");
  out << text;
  if (!out.flush()) throw cardest::IoError("write to '" + *cfg.output_path + "' failed");
}

std::string render(const CliConfig& cfg, const cardest::json& j) {
  return cfg.format == Format::kCsv ? cardest::flat_csv(j) : cardest::dump_json(j);
}

int cmd_bounds(const CliConfig& cfg) {
  const cardest::Precision p(cfg.delta_err, cfg.p_err);
  if (cfg.n && *cfg.n == 0) throw UsageError("--n must be at least 1");
  emit(cfg, render(cfg, cardest::bounds_json(p, cfg.n)));
  return kOk;
}

int cmd_estimate(const CliConfig& cfg) {
  const cardest::Precision p(cfg.delta_err, cfg.p_err);
  if (cfg.n.has_value() == cfg.input_path.has_value()) {
    throw UsageError("estimate needs exactly one of --n or --input");
  }
  const cardest::RngSeed seed{cfg.seed, 0};
  try {
    cardest::Estimate e;
    if (cfg.n) {
      e = cardest::estimate(p, cardest::SyntheticSource(*cfg.n), seed, cfg.hard_cap);
    } else {
      e = cardest::estimate(p, cardest::FileSource(*cfg.input_path, cfg.identity), seed,
                            cfg.hard_cap);
    }
    emit(cfg, render(cfg, cardest::estimate_json(e, cfg.seed)));
    return kOk;
  } catch (const cardest::BudgetExhausted& ex) {
    std::cerr << "cardest: " << ex.what() << '\n';
    emit(cfg, render(cfg, cardest::budget_exhausted_json(ex, cfg.seed)));
    return kBudgetExhausted;
  }
}

int cmd_verify(const CliConfig& cfg) {
  const cardest::Precision p(cfg.delta_err, cfg.p_err);
  if (cfg.n.has_value() == cfg.input_path.has_value()) {
    throw UsageError("verify needs a known cardinality: exactly one of --n or --input");
  }
  if (cfg.trials == 0) throw UsageError("--trials must be at least 1");
  cardest::VerificationReport report;
  int code = kOk;
  try {
    if (cfg.n) {
      report = cardest::run_trials(*cfg.n, p, cfg.trials, cfg.seed, cfg.threads);
    } else {
      report = cardest::run_trials(cardest::FileSource(*cfg.input_path, cfg.identity), p,
                                   cfg.trials, cfg.seed, cfg.threads);
    }
  } catch (const cardest::HarnessError& ex) {
    std::cerr << "cardest: " << ex.what() << '\n';
    report = ex.report();
    code = kVerificationFailed;
  }
  if (!report.passed()) code = kVerificationFailed;
  if (cfg.format == Format::kCsv) {
    const cardest::GridPoint g{report.n, p.delta_err(), p.p_err()};
    emit(cfg, std::string(cardest::kSweepCsvHeader) + '\n' + cardest::sweep_csv_row(g, &report) + '\n');
  } else {
    emit(cfg, cardest::dump_json(cardest::report_json(report)));
  }
  return code;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<cardest::GridPoint> read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cardest::IoError("cannot open grid file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || trim(line) != "n,delta_err,p_err") {
    throw UsageError("grid file '" + path + "' must start with the header n,delta_err,p_err");
  }
  std::vector<cardest::GridPoint> grid;
  std::vector<std::string> problems;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(trim(f));
    cardest::GridPoint g;
    const bool parsed = fields.size() == 3 && parse_number(fields[0], g.n) &&
                        parse_number(fields[1], g.delta_err) && parse_number(fields[2], g.p_err);
    if (!parsed) {
      problems.push_back("line " + std::to_string(line_no) + ": expected n,delta_err,p_err");
      continue;
    }
    if (g.n == 0) {
      problems.push_back("line " + std::to_string(line_no) + ": n must be at least 1");
      continue;
    }
    try {
      cardest::Precision(g.delta_err, g.p_err);
    } catch (const cardest::ParameterError& ex) {
      problems.push_back("line " + std::to_string(line_no) + ": " + ex.what());
      continue;
    }
    grid.push_back(g);
  }
  if (in.bad()) throw cardest::IoError("read error on grid file '" + path + "'");
  if (!problems.empty()) {
    std::string msg = "malformed grid rows in '" + path + "':";
    for (const auto& p : problems) msg += "\n  " + p;
    throw UsageError(msg);
  }
  if (grid.empty()) throw UsageError("grid file '" + path + "' has no rows");
  return grid;
}

int cmd_sweep(const CliConfig& cfg) {
  if (cfg.trials == 0) throw UsageError("--trials must be at least 1");
  const auto grid = read_grid(cfg.grid_path);
  const auto outcomes = cardest::sweep(grid, cfg.trials, cfg.seed, cfg.threads);
  bool all_passed = true;
  for (const auto& o : outcomes) {
    if (!o.error.empty()) {
      std::cerr << "cardest: n=" << o.point.n << " delta_err=" << o.point.delta_err
                << " p_err=" << o.point.p_err << ": " << o.error << '\n';
    }
    all_passed = all_passed && o.passed();
  }
  emit(cfg, cfg.format == Format::kJson ? cardest::dump_json(cardest::sweep_json(outcomes))
                                        : cardest::sweep_csv(outcomes));
  return all_passed ? kOk : kVerificationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimate set cardinality from uniform random samples and verify the guarantee"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  CliConfig cfg;
  std::string format_name;
  std::string identity_name = "position";

  auto add_precision = [&](CLI::App* sub) {
    sub->add_option("--delta", cfg.delta_err, "Relative accuracy delta_err, in (0, 1)")->required();
    sub->add_option("--p-err", cfg.p_err, "Total error probability p_err, in (0, 1)")->required();
  };
  auto add_output = [&](CLI::App* sub, const char* default_format) {
    sub->add_option("--format", format_name, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->default_str(default_format);
    sub->add_option("--output", cfg.output_path, "Write the report here")->default_str("stdout");
  };
  auto add_source = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.n, "Cardinality of a synthetic set {0..n-1}");
    sub->add_option("--input", cfg.input_path, "Newline-delimited file to sample lines from");
    sub->add_option("--identity", identity_name, "How file lines are identified")
        ->check(CLI::IsMember({"position", "content"}))
        ->capture_default_str();
  };
  auto add_run = [&](CLI::App* sub) {
    sub->add_option("--trials", cfg.trials, "Number of independent trials")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Base seed")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker threads, 0 = hardware concurrency")
        ->capture_default_str();
  };

  auto* bounds = app.add_subcommand("bounds", "Print k_err and, with --n, the sample budgets");
  add_precision(bounds);
  bounds->add_option("--n", cfg.n, "Set cardinality");
  add_output(bounds, "json");

  auto* estimate = app.add_subcommand("estimate", "Run the estimator once");
  add_precision(estimate);
  add_source(estimate);
  estimate->add_option("--seed", cfg.seed, "Seed")->capture_default_str();
  estimate->add_option("--hard-cap", cfg.hard_cap, "Abort after this many samples")
      ->default_str("none");
  add_output(estimate, "json");

  auto* verify = app.add_subcommand("verify", "Monte Carlo check of the accuracy guarantee");
  add_precision(verify);
  add_source(verify);
  add_run(verify);
  add_output(verify, "json");

  auto* sweep = app.add_subcommand("sweep", "Verify every point of a n,delta_err,p_err grid");
  sweep->add_option("--grid", cfg.grid_path, "CSV grid with header n,delta_err,p_err")->required();
  add_run(sweep);
  add_output(sweep, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (format_name == "json") cfg.format = Format::kJson;
  if (format_name == "csv") cfg.format = Format::kCsv;
  cfg.identity = identity_name == "content" ? cardest::Identity::kContent
                                            : cardest::Identity::kPosition;

  try {
    if (bounds->parsed()) return cmd_bounds(cfg);
    if (estimate->parsed()) return cmd_estimate(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    return cmd_sweep(cfg);
  } catch (const UsageError& e) {
    std::cerr << "cardest: " << e.what() << '\n';
    return kUsage;
  } catch (const cardest::ParameterError& e) {
    std::cerr << "cardest: " << e.what() << '\n';
    return kUsage;
  } catch (const cardest::IoError& e) {
    std::cerr << "cardest: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "cardest: " << e.what() << '\n';
    return kVerificationFailed;
  }
}
