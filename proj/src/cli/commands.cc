// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hora/commands.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "CLI11.hpp"
#include "hora/allocator.h"
#include "hora/config.h"
#include "hora/errors.h"
#include "hora/oracle.h"
#include "hora/random.h"

#ifndef HORA_VERSION
#define HORA_VERSION "dev"
#endif

namespace hora::cli {
namespace {

namespace fs = std::filesystem;

std::string ReadAll(const std::string& path, std::istream& in) {
  std::ostringstream buf;
  if (path == "-") {
    buf << in.rdbuf();
    return buf.str();
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot read " + path);
  buf << file.rdbuf();
  return buf.str();
}

void WriteTo(const std::string& path, const std::string& content,
             std::ostream& out) {
  if (path == "-") {
    out << content;
    return;
  }
  WriteFileAtomic(path, content);
}

std::string Pretty(const Json& j) { return j.dump(2) + "\n"; }

// --- allocate ---------------------------------------------------------------

struct AllocateArgs {
  std::string input = "-";
  std::string output = "-";
  std::string policy;
};

int CmdAllocate(const AllocateArgs& a, std::istream& in, std::ostream& out) {
  AllocateDocument doc = AllocateDocumentFromJson(ParseJsonText(ReadAll(a.input, in)));
  if (!a.policy.empty()) doc.policy = ParsePolicy(a.policy);
  const AllocationResult result = Allocate(doc.request, doc.policy);
  WriteTo(a.output, Pretty(ToJson(result)), out);
  return kExitOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string preset;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string output_dir;
  int threads = 1;
  bool list_presets = false;
  std::vector<std::string> argv;
};

fs::path ResolveOutputDir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "hora-out";
}

int CmdSimulate(const SimulateArgs& a, std::ostream& out) {
  if (a.list_presets) {
    for (const auto& name : PresetNames()) out << name << '\n';
    return kExitOk;
  }
  if (a.config.empty() == a.preset.empty()) {
    throw ValidationError("config",
                          "provide exactly one of a config path or --preset");
  }
  const auto start = std::chrono::steady_clock::now();
  SimConfig config = a.preset.empty() ? LoadSimConfigFile(a.config)
                                      : BuiltinPreset(a.preset);
  if (a.seed_given) config.seed = a.seed;
  config.Validate();

  const fs::path dir = ResolveOutputDir(a.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<TraceRow> trace;
  const ComparisonReport report = ComparePolicies(config, a.threads, &trace);

  std::vector<std::string> outputs;
  auto emit = [&](const std::string& name, const std::string& content) {
    WriteFileAtomic(dir / name, content);
    outputs.push_back(name);
  };
  emit("report.json", Pretty(ToJson(report)));
  {
    std::ostringstream csv;
    WriteTraceCsv(csv, trace);
    emit("trace.csv", csv.str());
  }
  for (const auto& p : report.policies) {
    std::ostringstream csv;
    WriteBucketSharesCsv(csv, p.bucket_shares);
    emit("bucket_shares_" + std::string(PolicyName(p.policy)) + ".csv",
         csv.str());
  }

  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  Json buckets = Json::array();
  for (const auto& b : config.ResolvedBuckets()) buckets.push_back(b.Label());
  Json manifest;
  manifest["command"] = "simulate";
  manifest["arguments"] = a.argv;
  manifest["engine_version"] = HORA_VERSION;
  manifest["root_seed"] = config.seed;
  manifest["config"] = ToJson(config);
  manifest["resolved_buckets"] = std::move(buckets);
  manifest["threads"] = a.threads;
  manifest["outputs"] = outputs;
  manifest["wall_clock_seconds"] = seconds;
  WriteFileAtomic(dir / "manifest.json", Pretty(manifest));

  for (const auto& p : report.policies) {
    out << PolicyName(p.policy)
        << " phase_b_expected_hits=" << FormatDouble(p.phase_b_expected_hits.mean)
        << " expected_coverage=" << FormatDouble(p.expected_coverage.mean)
        << " realized_hits=" << FormatDouble(p.realized_hits.mean) << '\n';
  }
  out << "wrote " << outputs.size() + 1 << " files to " << dir.string() << '\n';
  return kExitOk;
}

// --- oracle-check -----------------------------------------------------------

struct OracleArgs {
  OracleCheckOptions options;
  std::string replay;
  std::string failure_out;
};

Json CheckToJson(const OracleInstance& instance, const InstanceCheck& check) {
  return Json{{"instance", ToJson(instance)},
              {"greedy_deltas", check.greedy_deltas},
              {"greedy", check.greedy},
              {"dp", check.dp},
              {"enumerate", check.enumerate},
              {"exchange_holds", check.exchange_holds},
              {"passed", check.passed}};
}

int ReportFailure(const OracleArgs& a, const OracleInstance& instance,
                  std::ostream& err) {
  const InstanceCheck check =
      CheckOracleInstance(instance, a.options.inject_fault);
  const Json doc{{"mismatch", CheckToJson(instance, check)}};
  err << doc.dump() << '\n';
  if (!a.failure_out.empty()) WriteFileAtomic(a.failure_out, Pretty(ToJson(instance)));
  return kExitOracleMismatch;
}

int CmdOracleCheck(const OracleArgs& a, std::istream& in, std::ostream& out,
                   std::ostream& err) {
  if (!a.replay.empty()) {
    const OracleInstance instance =
        OracleInstanceFromJson(ParseJsonText(ReadAll(a.replay, in)));
    const InstanceCheck check =
        CheckOracleInstance(instance, a.options.inject_fault);
    out << Pretty(CheckToJson(instance, check));
    return check.passed ? kExitOk : ReportFailure(a, instance, err);
  }
  const OracleCheckSummary summary = RunOracleCheck(a.options);
  out << Pretty(Json{{"instances", a.options.instances},
                     {"checked", summary.checked},
                     {"mismatches", summary.mismatches},
                     {"max_dp_gap", summary.max_dp_gap},
                     {"max_enumerate_gap", summary.max_enumerate_gap},
                     {"seed", a.options.seed}});
  if (summary.first_failure) {
    return ReportFailure(a, *summary.first_failure, err);
  }
  return kExitOk;
}

// --- passk ------------------------------------------------------------------

struct PassKArgs {
  std::string pool;
  std::vector<int> k_values;
  std::string output = "-";
};

int CmdPassK(const PassKArgs& a, std::istream& in, std::ostream& out) {
  std::istringstream text(ReadAll(a.pool, in));
  const EvalPool pool = ParsePoolCsv(text);
  for (std::size_t i = 0; i < a.k_values.size(); ++i) {
    const int k = a.k_values[i];
    if (k < 1 || k > pool.pool_size) {
      throw ValidationError("k[" + std::to_string(i) + "]",
                            "K must lie in [1, N]");
    }
  }
  std::ostringstream csv;
  WritePassKCsv(csv, PassKDataset(pool, a.k_values));
  WriteTo(a.output, csv.str(), out);
  return kExitOk;
}

}  // namespace

// --- oracle-check library surface --------------------------------------------

OracleInstance GenerateOracleInstance(std::uint64_t seed, std::uint32_t index,
                                      int max_prompts,
                                      std::int64_t max_budget) {
  RandomStream rng(seed, {index, 0, StreamPhase::kInstance, 0});
  const auto n = 1 + rng.Below(static_cast<std::uint64_t>(max_prompts));
  OracleInstance instance;
  instance.budget = static_cast<std::int64_t>(
      rng.Below(static_cast<std::uint64_t>(max_budget) + 1));
  const int g0 = static_cast<int>(rng.Below(9));
  const BetaParams prior(0.5 + 2.5 * rng.Uniform(), 0.5 + 2.5 * rng.Uniform());
  for (std::uint64_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(rng.Below(static_cast<std::uint64_t>(g0) + 1));
    instance.posteriors.push_back(PosteriorFromCounts(
        prior, {static_cast<std::int64_t>(i), g0, c}));
  }
  return instance;
}

InstanceCheck CheckOracleInstance(const OracleInstance& instance,
                                  bool inject_fault) {
  std::vector<BetaParams> seen = instance.posteriors;
  if (inject_fault) {
    seen[0] = BetaParams(seen[0].alpha(), 8.0 * seen[0].beta() + 8.0);
  }
  InstanceCheck check;
  check.greedy_deltas = GreedyDeltas(seen, instance.budget);
  check.greedy = TotalHitUtility(instance.posteriors, check.greedy_deltas);
  check.dp = DpOptimal(instance.posteriors, instance.budget).optimum;
  check.enumerate = EnumerateOptimal(instance.posteriors, instance.budget).optimum;
  check.exchange_holds =
      VerifyExchangeProperty(instance.posteriors, check.greedy_deltas).holds;
  check.passed = std::abs(check.greedy - check.dp) <= 1e-9 &&
                 std::abs(check.greedy - check.enumerate) <= 1e-12 &&
                 std::abs(check.dp - check.enumerate) <= 1e-12 &&
                 check.exchange_holds;
  return check;
}

OracleCheckSummary RunOracleCheck(const OracleCheckOptions& options) {
  if (options.instances < 0) {
    throw ValidationError("instances", "must be >= 0");
  }
  if (options.max_prompts < 1) {
    throw ValidationError("max_prompts", "must be >= 1");
  }
  if (options.max_budget < 0 || options.max_budget > kDefaultDpBudgetCap) {
    throw ValidationError("max_budget", "must lie in [0, DP cap]");
  }
  if (CompositionCount(static_cast<std::size_t>(options.max_prompts),
                       options.max_budget) > kDefaultCompositionCap) {
    throw ValidationError("max_budget",
                          "caps exceed the enumeration oracle's limit");
  }
  OracleCheckSummary summary;
  for (int k = 0; k < options.instances; ++k) {
    const OracleInstance instance =
        GenerateOracleInstance(options.seed, static_cast<std::uint32_t>(k),
                               options.max_prompts, options.max_budget);
    const InstanceCheck check =
        CheckOracleInstance(instance, options.inject_fault);
    ++summary.checked;
    summary.max_dp_gap =
        std::max(summary.max_dp_gap, std::abs(check.greedy - check.dp));
    summary.max_enumerate_gap = std::max(summary.max_enumerate_gap,
                                         std::abs(check.greedy - check.enumerate));
    if (!check.passed) {
      ++summary.mismatches;
      if (!summary.first_failure) summary.first_failure = instance;
    }
  }
  return summary;
}

// --- file formats -------------------------------------------------------------

EvalPool ParsePoolCsv(std::istream& in) {
  EvalPool pool;
  std::string line;
  int line_no = 0;
  bool have_n = false;
  bool have_header = false;
  auto where = [&] { return "line " + std::to_string(line_no); };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_n) {
      const std::string prefix = "# N=";
      if (line.rfind(prefix, 0) != 0) {
        throw ValidationError("N", "first line must be '# N=<pool size>'");
      }
      try {
        std::size_t used = 0;
        pool.pool_size = std::stoi(line.substr(prefix.size()), &used);
        if (used != line.size() - prefix.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ValidationError("N", "pool size must be an integer");
      }
      have_n = true;
      continue;
    }
    if (!have_header) {
      if (line != "prompt_id,correct_count") {
        throw ValidationError(where(), "expected header prompt_id,correct_count");
      }
      have_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError(where(), "expected prompt_id,correct_count");
    }
    try {
      std::size_t used = 0;
      const std::string count = line.substr(comma + 1);
      const int c = std::stoi(count, &used);
      if (used != count.size()) throw std::invalid_argument("");
      pool.correct_counts.push_back(c);
    } catch (const std::exception&) {
      throw ValidationError(where(), "correct_count must be an integer");
    }
  }
  if (!have_n) throw ValidationError("N", "missing '# N=<pool size>' line");
  pool.Validate();
  return pool;
}

void WriteTraceCsv(std::ostream& out, std::span<const TraceRow> rows) {
  out << "replication,step,policy,prompt_id,p,c,delta,hits\n";
  for (const TraceRow& r : rows) {
    out << r.replication << ',' << r.step << ',' << PolicyName(r.policy) << ','
        << r.prompt_id << ',' << FormatDouble(r.p) << ',' << r.correct << ','
        << r.delta << ',' << r.hits << '\n';
  }
}

void WriteFileAtomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write " + tmp.string());
    file << content;
    file.flush();
    if (!file) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place");
  }
}

// --- entry point ----------------------------------------------------------------

int Run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  CLI::App app{"Hit-utility rollout allocation engine and simulator", "hora"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HORA_VERSION);

  AllocateArgs alloc;
  auto* allocate = app.add_subcommand(
      "allocate", "Allocate a Phase-B rollout budget for one batch");
  allocate->add_option("-i,--input", alloc.input,
                       "Request JSON document ('-' reads stdin)");
  allocate->add_option("-o,--output", alloc.output,
                       "Result JSON destination ('-' writes stdout)");
  allocate->add_option("--policy", alloc.policy,
                       "Override the document's policy");

  SimulateArgs sim;
  sim.argv = args;
  auto* simulate = app.add_subcommand(
      "simulate", "Compare allocation policies on a synthetic population");
  simulate->add_option("config", sim.config, "YAML simulation config");
  simulate->add_option("--preset", sim.preset, "Bundled config name");
  auto* seed_opt =
      simulate->add_option("--seed", sim.seed, "Override the root seed");
  simulate->add_option("-o,--output-dir", sim.output_dir,
                       std::string("Output directory (default $") +
                           kOutputDirEnv + " or ./hora-out)");
  simulate->add_option("--threads", sim.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--list-presets", sim.list_presets,
                     "Print bundled preset names");

  OracleArgs oracle;
  auto* oracle_check = app.add_subcommand(
      "oracle-check", "Check greedy against the DP and enumeration oracles");
  oracle_check->add_option("--instances", oracle.options.instances,
                           "Number of random instances");
  oracle_check->add_option("--max-prompts", oracle.options.max_prompts,
                           "Largest batch size");
  oracle_check->add_option("--max-budget", oracle.options.max_budget,
                           "Largest Phase-B budget");
  oracle_check->add_option("--seed", oracle.options.seed, "Instance seed");
  oracle_check->add_option("--replay", oracle.replay,
                           "Re-check one serialized instance");
  oracle_check->add_option("--failure-out", oracle.failure_out,
                           "Write the first failing instance here");
  oracle_check->add_flag("--inject-fault", oracle.options.inject_fault)
      ->group("");

  PassKArgs passk;
  auto* passk_cmd =
      app.add_subcommand("passk", "Unbiased Pass@K over an evaluation pool");
  passk_cmd->add_option("--pool", passk.pool, "Pool CSV ('-' reads stdin)")
      ->required();
  passk_cmd->add_option("-k,--k", passk.k_values, "Comma-separated K values")
      ->delimiter(',')
      ->required();
  passk_cmd->add_option("-o,--output", passk.output,
                        "CSV destination ('-' writes stdout)");

  std::vector<const char*> argv;
  argv.push_back("hora");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }
  sim.seed_given = seed_opt->count() > 0;

  try {
    if (allocate->parsed()) return CmdAllocate(alloc, in, out);
    if (simulate->parsed()) return CmdSimulate(sim, out);
    if (oracle_check->parsed()) return CmdOracleCheck(oracle, in, out, err);
    if (passk_cmd->parsed()) return CmdPassK(passk, in, out);
  } catch (const ValidationError& e) {
    err << ErrorDocument("validation", e.field(), e.message()).dump() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << ErrorDocument("io", "", e.what()).dump() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace hora::cli
