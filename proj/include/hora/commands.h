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

#ifndef HORA_COMMANDS_H_
#define HORA_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hora/json_io.h"
#include "hora/metrics.h"
#include "hora/simulator.h"

namespace hora::cli {

// Stable exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitOracleMismatch = 4;

// Overrides the default output directory of `simulate`.
inline constexpr const char* kOutputDirEnv = "HORA_OUTPUT_DIR";

// Entry point shared by the `hora` binary and the tests. args excludes the
// program name.
int Run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err);

// --- oracle-check -----------------------------------------------------------

struct OracleCheckOptions {
  int instances = 1000;
  int max_prompts = 6;
  std::int64_t max_budget = 20;
  std::uint64_t seed = 1;
  // Test-only negative control: greedy sees a distorted marginal sequence
  // for prompt 0 while DP and enumeration see the true one.
  bool inject_fault = false;
};

struct InstanceCheck {
  double greedy = 0.0;
  double dp = 0.0;
  double enumerate = 0.0;
  std::vector<std::int64_t> greedy_deltas;
  bool exchange_holds = true;
  bool passed = true;
};

// Random instance `index`: 1..max_prompts prompts, budget 0..max_budget,
// posteriors from PosteriorFromCounts with random prior, G0 and counts.
OracleInstance GenerateOracleInstance(std::uint64_t seed, std::uint32_t index,
                                      int max_prompts, std::int64_t max_budget);

// greedy == DP within 1e-9, greedy == enumeration and DP == enumeration
// within 1e-12, and the greedy output satisfies the exchange condition.
InstanceCheck CheckOracleInstance(const OracleInstance& instance,
                                  bool inject_fault = false);

struct OracleCheckSummary {
  int checked = 0;
  int mismatches = 0;
  double max_dp_gap = 0.0;
  double max_enumerate_gap = 0.0;
  std::optional<OracleInstance> first_failure;
};

OracleCheckSummary RunOracleCheck(const OracleCheckOptions& options);

// --- file formats -------------------------------------------------------------

// Pool file:
//   # N=<pool size>
//   prompt_id,correct_count
//   0,17
//   ...
EvalPool ParsePoolCsv(std::istream& in);

// replication,step,policy,prompt_id,p,c,delta,hits
void WriteTraceCsv(std::ostream& out, std::span<const TraceRow> rows);

// Writes to a sibling temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace hora::cli

#endif  // HORA_COMMANDS_H_
