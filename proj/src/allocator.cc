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

#include "hora/allocator.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "hora/errors.h"

namespace hora {
namespace {

struct HeapEntry {
  double marginal;
  std::size_t index;
};

// Max-heap order: larger marginal first, then lower index.
struct HeapLess {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.marginal != b.marginal) return a.marginal < b.marginal;
    return a.index > b.index;
  }
};

using MarginalHeap =
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLess>;

std::string Indexed(const char* name, std::size_t i) {
  return std::string(name) + "[" + std::to_string(i) + "]";
}

AllocationResult Finish(const AllocationRequest& request, Policy policy,
                        std::vector<std::int64_t> deltas,
                        std::vector<std::int64_t> shard_budgets) {
  AllocationResult result;
  const auto posteriors = request.Posteriors();
  result.objective = TotalHitUtility(posteriors, deltas);
  result.deltas = std::move(deltas);
  result.policy = policy;
  result.per_shard_budgets = std::move(shard_budgets);
  return result;
}

}  // namespace

std::string_view PolicyName(Policy policy) {
  switch (policy) {
    case Policy::kHora:
      return "hora";
    case Policy::kUniform:
      return "uniform";
    case Policy::kHardFirst:
      return "hard_first";
    case Policy::kPlugin:
      return "plugin";
  }
  return "unknown";
}

Policy ParsePolicy(std::string_view name) {
  for (Policy p : {Policy::kHora, Policy::kUniform, Policy::kHardFirst,
                   Policy::kPlugin}) {
    if (PolicyName(p) == name) return p;
  }
  throw ValidationError("policy", "unknown policy '" + std::string(name) +
                                      "' (expected hora, uniform, "
                                      "hard_first or plugin)");
}

void AllocationRequest::Validate() const {
  if (evidence.empty()) {
    throw ValidationError("evidence", "batch must contain at least one prompt");
  }
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    evidence[i].Validate(Indexed("evidence", i));
    if (evidence[i].pre_rollouts != evidence[0].pre_rollouts) {
      throw ValidationError(Indexed("evidence", i) + ".pre_rollouts",
                            "must equal evidence[0].pre_rollouts");
    }
  }
  if (group_size < 1) {
    throw ValidationError("group_size", "must be >= 1");
  }
  if (evidence[0].pre_rollouts > group_size) {
    throw ValidationError("group_size", "must be >= pre_rollouts");
  }
  if (shards < 1) {
    throw ValidationError("shards", "must be >= 1");
  }
  if (static_cast<std::size_t>(shards) > evidence.size()) {
    throw ValidationError("shards", "exceeds the number of prompts");
  }
  if (!prior_overrides.empty()) {
    if (prior_overrides.size() != evidence.size()) {
      throw ValidationError("prior_overrides",
                            "must be empty or match evidence length");
    }
    for (std::size_t i = 0; i < prior_overrides.size(); ++i) {
      const auto& o = prior_overrides[i];
      if (!o) continue;
      if (!(o->p_hat > 0.0 && o->p_hat < 1.0)) {
        throw ValidationError(Indexed("prior_overrides", i) + ".p_hat",
                              "must lie in (0, 1)");
      }
      if (std::isnan(o->s) || !(o->s > 0.0)) {
        throw ValidationError(Indexed("prior_overrides", i) + ".s",
                              "must be positive");
      }
    }
  }
}

int AllocationRequest::PreRollouts() const {
  return evidence.empty() ? 0 : evidence[0].pre_rollouts;
}

std::int64_t AllocationRequest::Budget() const {
  return static_cast<std::int64_t>(evidence.size()) *
         (group_size - PreRollouts());
}

std::vector<BetaParams> AllocationRequest::Posteriors() const {
  std::vector<BetaParams> out;
  out.reserve(evidence.size());
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    if (!prior_overrides.empty() && prior_overrides[i]) {
      out.push_back(PosteriorFromPriorEstimate(*prior_overrides[i],
                                               evidence[i]));
    } else {
      out.push_back(PosteriorFromCounts(prior, evidence[i]));
    }
  }
  return out;
}

std::int64_t AllocationResult::TotalDelta() const {
  return std::accumulate(deltas.begin(), deltas.end(), std::int64_t{0});
}

std::vector<ShardRange> PartitionShards(std::size_t count, int shards) {
  if (shards < 1) throw ValidationError("shards", "must be >= 1");
  const auto s = static_cast<std::size_t>(shards);
  if (s > count) throw ValidationError("shards", "exceeds the number of prompts");
  const std::size_t base = count / s;
  const std::size_t extra = count % s;
  std::vector<ShardRange> out;
  out.reserve(s);
  std::size_t begin = 0;
  for (std::size_t k = 0; k < s; ++k) {
    const std::size_t size = base + (k < extra ? 1 : 0);
    out.push_back({begin, begin + size});
    begin += size;
  }
  return out;
}

std::vector<std::int64_t> GreedyDeltas(std::span<const BetaParams> posteriors,
                                       std::int64_t budget) {
  std::vector<std::int64_t> deltas(posteriors.size(), 0);
  if (posteriors.empty() || budget <= 0) return deltas;

  std::vector<MarginalCursor> cursors;
  cursors.reserve(posteriors.size());
  std::vector<HeapEntry> entries;
  entries.reserve(posteriors.size());
  for (std::size_t i = 0; i < posteriors.size(); ++i) {
    cursors.emplace_back(posteriors[i]);
    entries.push_back({cursors.back().value(), i});
  }
  MarginalHeap heap(HeapLess{}, std::move(entries));

  for (std::int64_t b = 0; b < budget; ++b) {
    const std::size_t i = heap.top().index;
    heap.pop();
    ++deltas[i];
    cursors[i].Advance();
    heap.push({cursors[i].value(), i});
  }
  return deltas;
}

double TotalHitUtility(std::span<const BetaParams> posteriors,
                       std::span<const std::int64_t> deltas) {
  double total = 0.0;
  for (std::size_t i = 0; i < posteriors.size(); ++i) {
    total += HitUtility(posteriors[i], deltas[i]);
  }
  return total;
}

AllocationResult AllocateGreedy(const AllocationRequest& request) {
  request.Validate();
  if (request.shards != 1) {
    throw ValidationError("shards",
                          "unsharded greedy requires shards == 1");
  }
  const auto posteriors = request.Posteriors();
  const std::int64_t budget = request.Budget();
  return Finish(request, Policy::kHora, GreedyDeltas(posteriors, budget),
                {budget});
}

AllocationResult AllocateSharded(const AllocationRequest& request) {
  request.Validate();
  const auto posteriors = request.Posteriors();
  const std::int64_t per_prompt = request.group_size - request.PreRollouts();
  std::vector<std::int64_t> deltas;
  deltas.reserve(posteriors.size());
  std::vector<std::int64_t> budgets;
  for (const ShardRange& shard :
       PartitionShards(posteriors.size(), request.shards)) {
    const std::int64_t budget =
        static_cast<std::int64_t>(shard.size()) * per_prompt;
    budgets.push_back(budget);
    const auto part = GreedyDeltas(
        std::span(posteriors).subspan(shard.begin, shard.size()), budget);
    deltas.insert(deltas.end(), part.begin(), part.end());
  }
  return Finish(request, Policy::kHora, std::move(deltas), std::move(budgets));
}

AllocationResult AllocateUniform(const AllocationRequest& request) {
  request.Validate();
  const std::int64_t per_prompt = request.group_size - request.PreRollouts();
  return Finish(request, Policy::kUniform,
                std::vector<std::int64_t>(request.evidence.size(), per_prompt),
                {request.Budget()});
}

AllocationResult AllocateHardFirst(const AllocationRequest& request) {
  request.Validate();
  std::vector<std::size_t> hard;
  for (std::size_t i = 0; i < request.evidence.size(); ++i) {
    if (request.evidence[i].correct == 0) hard.push_back(i);
  }
  const std::int64_t budget = request.Budget();
  std::vector<std::int64_t> deltas(request.evidence.size(), 0);
  if (hard.empty()) {
    std::fill(deltas.begin(), deltas.end(),
              request.group_size - request.PreRollouts());
  } else {
    const auto n = static_cast<std::int64_t>(hard.size());
    const std::int64_t share = budget / n;
    const std::int64_t remainder = budget % n;
    for (std::int64_t k = 0; k < n; ++k) {
      deltas[hard[k]] = share + (k < remainder ? 1 : 0);
    }
  }
  return Finish(request, Policy::kHardFirst, std::move(deltas), {budget});
}

std::vector<std::int64_t> PluginDeltas(std::span<const PromptEvidence> evidence,
                                       std::int64_t budget) {
  const std::size_t n = evidence.size();
  std::vector<std::int64_t> deltas(n, 0);
  if (n == 0 || budget <= 0) return deltas;
  const int g0 = evidence[0].pre_rollouts;
  if (g0 <= 0) {
    throw ValidationError("evidence[0].pre_rollouts",
                          "plug-in estimate needs pre_rollouts > 0");
  }
  std::vector<double> keep(n);
  std::vector<HeapEntry> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = static_cast<double>(evidence[i].correct) / g0;
    keep[i] = 1.0 - p;
    entries.push_back({p, i});
  }
  MarginalHeap heap(HeapLess{}, std::move(entries));

  std::int64_t spent = 0;
  while (spent < budget && heap.top().marginal > 0.0) {
    HeapEntry top = heap.top();
    heap.pop();
    ++deltas[top.index];
    ++spent;
    top.marginal *= keep[top.index];
    heap.push(top);
  }
  for (std::size_t k = 0; spent < budget; ++spent, k = (k + 1) % n) {
    ++deltas[k];
  }
  return deltas;
}

AllocationResult AllocatePlugin(const AllocationRequest& request) {
  request.Validate();
  const std::int64_t budget = request.Budget();
  if (request.PreRollouts() == 0) {
    throw ValidationError("evidence[0].pre_rollouts",
                          "plug-in estimate needs pre_rollouts > 0");
  }
  return Finish(request, Policy::kPlugin,
                PluginDeltas(request.evidence, budget), {budget});
}

AllocationResult Allocate(const AllocationRequest& request, Policy policy) {
  switch (policy) {
    case Policy::kHora:
      return request.shards > 1 ? AllocateSharded(request)
                                : AllocateGreedy(request);
    case Policy::kUniform:
      return AllocateUniform(request);
    case Policy::kHardFirst:
      return AllocateHardFirst(request);
    case Policy::kPlugin:
      return AllocatePlugin(request);
  }
  throw ValidationError("policy", "unknown policy");
}

ExchangeCheck VerifyExchangeProperty(std::span<const BetaParams> posteriors,
                                     std::span<const std::int64_t> deltas,
                                     double slack) {
  if (posteriors.size() != deltas.size()) {
    throw ValidationError("deltas", "length must match posteriors");
  }
  const std::size_t n = posteriors.size();
  std::vector<double> next(n);
  std::vector<double> last(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (deltas[i] < 0) {
      throw ValidationError(Indexed("deltas", i), "must be nonnegative");
    }
    MarginalCursor cursor(posteriors[i]);
    while (cursor.ell() < deltas[i]) {
      last[i] = cursor.value();
      cursor.Advance();
    }
    next[i] = cursor.value();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (deltas[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (last[i] < next[j] - slack) {
        return {false, ExchangeViolation{i, j, last[i], next[j]}};
      }
    }
  }
  return {};
}

}  // namespace hora
