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

#ifndef HORA_ALLOCATOR_H_
#define HORA_ALLOCATOR_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hora/posterior.h"

namespace hora {

enum class Policy { kHora, kUniform, kHardFirst, kPlugin };

// "hora", "uniform", "hard_first", "plugin".
std::string_view PolicyName(Policy policy);
// Inverse of PolicyName; throws ValidationError("policy", ...) otherwise.
Policy ParsePolicy(std::string_view name);

// One training step's worth of Phase-A evidence plus the allocation knobs.
// Every evidence entry carries the same pre_rollouts G0, and the Phase-B
// budget is evidence.size() * (group_size - G0).
struct AllocationRequest {
  std::vector<PromptEvidence> evidence;
  BetaParams prior;
  int group_size = 32;
  int shards = 1;
  // Empty, or one optional estimate per evidence entry. A present entry
  // replaces `prior` for that prompt.
  std::vector<std::optional<PriorEstimate>> prior_overrides;

  void Validate() const;
  int PreRollouts() const;
  std::int64_t Budget() const;
  // Per-prompt posteriors, aligned with `evidence`.
  std::vector<BetaParams> Posteriors() const;

  friend bool operator==(const AllocationRequest&,
                         const AllocationRequest&) = default;
};

struct AllocationResult {
  std::vector<std::int64_t> deltas;
  // Sum of posterior hit utilities at `deltas`, whatever the policy.
  double objective = 0.0;
  Policy policy = Policy::kHora;
  std::vector<std::int64_t> per_shard_budgets;

  std::int64_t TotalDelta() const;

  friend bool operator==(const AllocationResult&,
                         const AllocationResult&) = default;
};

// Half-open index range [begin, end) of one allocation shard.
struct ShardRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

// Contiguous shards; the first (count % shards) shards hold one extra prompt.
std::vector<ShardRange> PartitionShards(std::size_t count, int shards);

// Greedy maximization of sum_i HitUtility(posteriors[i], deltas[i]) subject
// to sum deltas = budget. Max-heap over recurrence cursors, O(budget log n).
// Ties go to the lowest index.
std::vector<std::int64_t> GreedyDeltas(std::span<const BetaParams> posteriors,
                                       std::int64_t budget);

double TotalHitUtility(std::span<const BetaParams> posteriors,
                       std::span<const std::int64_t> deltas);

// Phase-B greedy over the whole batch. Requires request.shards == 1.
AllocationResult AllocateGreedy(const AllocationRequest& request);
// Greedy run independently per contiguous shard, each with budget
// (shard size) * (G - G0).
AllocationResult AllocateSharded(const AllocationRequest& request);
// Delta_i = G - G0 for every prompt.
AllocationResult AllocateUniform(const AllocationRequest& request);
// Whole budget spread evenly over prompts with c_i = 0, remainder to the
// lowest indices. Falls back to uniform when no prompt has c_i = 0.
AllocationResult AllocateHardFirst(const AllocationRequest& request);
// Greedy on plug-in marginals p(1 - p)^l with p = c_i / G0. Once every
// remaining marginal is zero the residual budget goes round-robin from
// index 0.
AllocationResult AllocatePlugin(const AllocationRequest& request);
// The plug-in loop for an arbitrary budget; G0 is taken from evidence[0].
std::vector<std::int64_t> PluginDeltas(std::span<const PromptEvidence> evidence,
                                       std::int64_t budget);

// Dispatch by policy. kHora uses AllocateSharded when shards > 1.
AllocationResult Allocate(const AllocationRequest& request, Policy policy);

struct ExchangeViolation {
  std::size_t i = 0;  // prompt whose last assigned marginal is too small
  std::size_t j = 0;  // prompt whose next marginal beats it
  double assigned_marginal = 0.0;
  double next_marginal = 0.0;
};

struct ExchangeCheck {
  bool holds = true;
  std::optional<ExchangeViolation> violation;
};

// Checks M_i(delta_i - 1) >= M_j(delta_j) - slack for every i with
// delta_i > 0 and every j. Reports the first violating pair in (i, j)
// lexicographic order.
ExchangeCheck VerifyExchangeProperty(std::span<const BetaParams> posteriors,
                                     std::span<const std::int64_t> deltas,
                                     double slack = 1e-12);

}  // namespace hora

#endif  // HORA_ALLOCATOR_H_
