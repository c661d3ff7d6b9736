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

#ifndef HORA_SIMULATOR_H_
#define HORA_SIMULATOR_H_

#include <cstdint>
#include <span>
#include <vector>

#include "hora/allocator.h"
#include "hora/metrics.h"
#include "hora/posterior.h"

namespace hora {

// Synthetic stand-in for the policy model: every prompt has a latent success
// probability p_i and a rollout is a Bernoulli(p_i) draw.
//
// Randomness is addressed, not sequenced. Under one root seed each
// (replication, step, phase, prompt) tuple owns a RandomStream, so
//   * every policy in a replication sees the same latent p and the same
//     Phase-A outcomes,
//   * Phase-B rollout k of prompt i is the same draw for every policy, so a
//     policy granting more rollouts observes a superset of outcomes,
//   * results do not depend on how replications are scheduled on threads.

enum class DistributionKind { kPoint, kBeta, kUniform };

struct LatentDistribution {
  DistributionKind kind = DistributionKind::kPoint;
  // kPoint: first = p. kBeta: (a, b). kUniform: (lo, hi).
  double first = 0.5;
  double second = 0.0;

  static LatentDistribution Point(double p) {
    return {DistributionKind::kPoint, p, 0.0};
  }
  static LatentDistribution Beta(double a, double b) {
    return {DistributionKind::kBeta, a, b};
  }
  static LatentDistribution Uniform(double lo, double hi) {
    return {DistributionKind::kUniform, lo, hi};
  }

  friend bool operator==(const LatentDistribution&,
                         const LatentDistribution&) = default;
};

struct PopulationComponent {
  double weight = 1.0;
  LatentDistribution distribution;

  friend bool operator==(const PopulationComponent&,
                         const PopulationComponent&) = default;
};

// Mixture over latent success probabilities plus the batch size Gamma.
struct PopulationSpec {
  std::vector<PopulationComponent> components;
  int size = 1;

  void Validate(const std::string& path = "population") const;

  friend bool operator==(const PopulationSpec&,
                         const PopulationSpec&) = default;
};

struct SimConfig {
  PopulationSpec population;
  int group_size = 32;
  int pre_rollouts = 8;
  BetaParams prior;
  std::vector<Policy> policies = {Policy::kHora, Policy::kUniform};
  int replications = 200;
  std::uint64_t seed = 0;
  int shards = 1;
  // Optional linear drift of every p_i per step; 0 keeps p static.
  int steps = 1;
  double drift_per_step = 0.0;
  // Empty selects DefaultBuckets(pre_rollouts).
  std::vector<CountBucket> buckets;

  void Validate() const;
  std::vector<CountBucket> ResolvedBuckets() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct StepReport {
  Policy policy = Policy::kHora;
  // Prompts with at least one correct rollout among all G_i.
  int realized_hits = 0;
  // sum_i 1 - (1 - p_i)^{G_i} at the true p.
  double expected_coverage = 0.0;
  // sum_i 1 - (1 - p_i)^{Delta_i} at the true p.
  double phase_b_expected_hits = 0.0;
  BucketShares bucket_shares;
  std::vector<PromptEvidence> evidence;
  std::vector<std::int64_t> deltas;
  // Correct rollouts per prompt across both phases.
  std::vector<int> correct_total;
  std::int64_t total_rollouts = 0;
};

// Gamma independent draws of latent p_i for one replication.
std::vector<double> SamplePopulation(const PopulationSpec& spec,
                                     std::uint64_t seed,
                                     std::uint32_t replication = 0);

// c_i ~ Binomial(G0, p_i), one substream per prompt.
std::vector<PromptEvidence> RunPhaseA(std::span<const double> p, int g0,
                                      std::uint64_t seed,
                                      std::uint32_t replication = 0,
                                      std::uint32_t step = 0);

// Phase A, allocation under `policy`, Phase-B draws and metrics for one step.
StepReport RunStep(const SimConfig& config, Policy policy,
                   std::span<const double> p, std::uint64_t seed,
                   std::uint32_t replication = 0, std::uint32_t step = 0);

struct MetricSummary {
  double mean = 0.0;
  double standard_error = 0.0;
};

struct PolicySummary {
  Policy policy = Policy::kHora;
  MetricSummary realized_hits;
  MetricSummary expected_coverage;
  MetricSummary phase_b_expected_hits;
  // Identical for every step by construction; Gamma * G.
  std::int64_t rollouts_per_step = 0;
  // Mean over all (replication, step) observations.
  BucketShares bucket_shares;
};

// Per-observation differences (policy - baseline) on shared draws.
struct PairedDifference {
  Policy policy = Policy::kHora;
  Policy baseline = Policy::kUniform;
  MetricSummary realized_hits;
  MetricSummary expected_coverage;
  MetricSummary phase_b_expected_hits;
};

struct ComparisonReport {
  SimConfig config;
  std::int64_t observations = 0;
  std::vector<PolicySummary> policies;
  Policy baseline = Policy::kUniform;
  std::vector<PairedDifference> paired;
};

struct TraceRow {
  std::uint32_t replication = 0;
  std::uint32_t step = 0;
  Policy policy = Policy::kHora;
  std::int64_t prompt_id = 0;
  double p = 0.0;
  int correct = 0;
  std::int64_t delta = 0;
  int hits = 0;
};

// Runs every policy over config.replications x config.steps observations.
// `threads` only affects wall-clock time. When `trace` is non-null it
// receives one row per (replication, step, policy, prompt) in that order.
ComparisonReport ComparePolicies(const SimConfig& config, int threads = 1,
                                 std::vector<TraceRow>* trace = nullptr);

MetricSummary Summarize(std::span<const double> values);

}  // namespace hora

#endif  // HORA_SIMULATOR_H_
