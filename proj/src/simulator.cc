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

#include "hora/simulator.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "hora/errors.h"
#include "hora/random.h"

namespace hora {
namespace {

std::string Indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double DrawLatent(const LatentDistribution& d, RandomStream& rng) {
  switch (d.kind) {
    case DistributionKind::kPoint:
      return d.first;
    case DistributionKind::kBeta:
      return rng.Beta(d.first, d.second);
    case DistributionKind::kUniform:
      return d.first + (d.second - d.first) * rng.Uniform();
  }
  return d.first;
}

double AtLeastOne(double p, std::int64_t n) {
  return 1.0 - std::pow(1.0 - p, static_cast<double>(n));
}

struct ReplicationResult {
  // [step][policy]
  std::vector<std::vector<StepReport>> steps;
  std::vector<std::vector<double>> latent;  // [step][prompt]
};

ReplicationResult RunReplication(const SimConfig& config,
                                 std::uint32_t replication) {
  ReplicationResult out;
  const auto base = SamplePopulation(config.population, config.seed,
                                     replication);
  for (int t = 0; t < config.steps; ++t) {
    std::vector<double> p(base);
    if (config.drift_per_step != 0.0) {
      for (double& x : p) {
        x = std::clamp(x + config.drift_per_step * t, 0.0, 1.0);
      }
    }
    std::vector<StepReport> per_policy;
    for (Policy policy : config.policies) {
      per_policy.push_back(RunStep(config, policy, p, config.seed, replication,
                                   static_cast<std::uint32_t>(t)));
    }
    out.steps.push_back(std::move(per_policy));
    out.latent.push_back(std::move(p));
  }
  return out;
}

}  // namespace

void PopulationSpec::Validate(const std::string& path) const {
  if (size < 1) throw ValidationError(path + ".size", "must be >= 1");
  if (components.empty()) {
    throw ValidationError(path + ".components", "must be nonempty");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto& c = components[k];
    const std::string where = Indexed(path + ".components", k);
    if (!std::isfinite(c.weight) || c.weight < 0.0) {
      throw ValidationError(where + ".weight", "must be finite and >= 0");
    }
    total += c.weight;
    const auto& d = c.distribution;
    switch (d.kind) {
      case DistributionKind::kPoint:
        if (!(d.first >= 0.0 && d.first <= 1.0)) {
          throw ValidationError(where + ".p", "must lie in [0, 1]");
        }
        break;
      case DistributionKind::kBeta:
        if (!std::isfinite(d.first) || !(d.first > 0.0)) {
          throw ValidationError(where + ".a", "must be finite and > 0");
        }
        if (!std::isfinite(d.second) || !(d.second > 0.0)) {
          throw ValidationError(where + ".b", "must be finite and > 0");
        }
        break;
      case DistributionKind::kUniform:
        if (!(d.first >= 0.0 && d.first <= d.second && d.second <= 1.0)) {
          throw ValidationError(where, "requires 0 <= lo <= hi <= 1");
        }
        break;
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError(path + ".components", "weights must sum to 1");
  }
}

void SimConfig::Validate() const {
  population.Validate();
  if (group_size < 1) throw ValidationError("group_size", "must be >= 1");
  if (pre_rollouts < 0) {
    throw ValidationError("pre_rollouts", "must be >= 0");
  }
  if (pre_rollouts > group_size) {
    throw ValidationError("pre_rollouts", "must not exceed group_size");
  }
  if (policies.empty()) throw ValidationError("policies", "must be nonempty");
  for (std::size_t i = 0; i < policies.size(); ++i) {
    if (std::count(policies.begin(), policies.end(), policies[i]) > 1) {
      throw ValidationError(Indexed("policies", i), "duplicate policy");
    }
    if (policies[i] == Policy::kPlugin && pre_rollouts == 0) {
      throw ValidationError(Indexed("policies", i),
                            "plugin requires pre_rollouts > 0");
    }
  }
  if (replications < 1) {
    throw ValidationError("replications", "must be >= 1");
  }
  if (shards < 1 || shards > population.size) {
    throw ValidationError("shards", "must lie in [1, population.size]");
  }
  if (steps < 1) throw ValidationError("steps", "must be >= 1");
  if (!std::isfinite(drift_per_step)) {
    throw ValidationError("drift_per_step", "must be finite");
  }
  if (!buckets.empty()) ValidateBucketPartition(buckets, pre_rollouts);
}

std::vector<CountBucket> SimConfig::ResolvedBuckets() const {
  return buckets.empty() ? DefaultBuckets(pre_rollouts) : buckets;
}

std::vector<double> SamplePopulation(const PopulationSpec& spec,
                                     std::uint64_t seed,
                                     std::uint32_t replication) {
  spec.Validate();
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(spec.size));
  for (int i = 0; i < spec.size; ++i) {
    RandomStream rng(seed, {replication, 0, StreamPhase::kPopulation,
                            static_cast<std::uint32_t>(i)});
    const double u = rng.Uniform();
    double cumulative = 0.0;
    std::size_t k = 0;
    for (; k + 1 < spec.components.size(); ++k) {
      cumulative += spec.components[k].weight;
      if (u < cumulative) break;
    }
    p.push_back(DrawLatent(spec.components[k].distribution, rng));
  }
  return p;
}

std::vector<PromptEvidence> RunPhaseA(std::span<const double> p, int g0,
                                      std::uint64_t seed,
                                      std::uint32_t replication,
                                      std::uint32_t step) {
  if (g0 < 0) throw ValidationError("pre_rollouts", "must be >= 0");
  std::vector<PromptEvidence> evidence;
  evidence.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    RandomStream rng(seed, {replication, step, StreamPhase::kPreRollout,
                            static_cast<std::uint32_t>(i)});
    int correct = 0;
    for (int j = 0; j < g0; ++j) correct += rng.Bernoulli(p[i]) ? 1 : 0;
    evidence.push_back({static_cast<std::int64_t>(i), g0, correct});
  }
  return evidence;
}

StepReport RunStep(const SimConfig& config, Policy policy,
                   std::span<const double> p, std::uint64_t seed,
                   std::uint32_t replication, std::uint32_t step) {
  if (std::find(config.policies.begin(), config.policies.end(), policy) ==
      config.policies.end()) {
    throw ValidationError("policy", std::string(PolicyName(policy)) +
                                        " is not among config.policies");
  }
  if (p.empty()) throw ValidationError("p", "must be nonempty");

  AllocationRequest request;
  request.evidence = RunPhaseA(p, config.pre_rollouts, seed, replication, step);
  request.prior = config.prior;
  request.group_size = config.group_size;
  request.shards = config.shards;
  const AllocationResult allocation = Allocate(request, policy);

  StepReport report;
  report.policy = policy;
  report.correct_total.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::int64_t delta = allocation.deltas[i];
    RandomStream rng(seed, {replication, step, StreamPhase::kAdditionalRollout,
                            static_cast<std::uint32_t>(i)});
    int extra = 0;
    for (std::int64_t k = 0; k < delta; ++k) extra += rng.Bernoulli(p[i]) ? 1 : 0;
    const int total_correct = request.evidence[i].correct + extra;
    report.correct_total[i] = total_correct;
    if (total_correct > 0) ++report.realized_hits;
    report.expected_coverage += AtLeastOne(p[i], config.pre_rollouts + delta);
    report.phase_b_expected_hits += AtLeastOne(p[i], delta);
    report.total_rollouts += config.pre_rollouts + delta;
  }
  const auto buckets = config.ResolvedBuckets();
  report.bucket_shares =
      ComputeBucketShares(request.evidence, allocation.deltas, buckets);
  report.evidence = std::move(request.evidence);
  report.deltas = allocation.deltas;
  return report;
}

MetricSummary Summarize(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.standard_error = std::sqrt(ss / (n - 1.0) / n);
  return s;
}

ComparisonReport ComparePolicies(const SimConfig& config, int threads,
                                 std::vector<TraceRow>* trace) {
  config.Validate();
  const auto reps = static_cast<std::size_t>(config.replications);
  std::vector<ReplicationResult> results(reps);

  // Work-stealing over replication indices; each slot is written once.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        results[r] = RunReplication(config, static_cast<std::uint32_t>(r));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto workers = static_cast<std::size_t>(
      std::clamp<int>(threads, 1, static_cast<int>(reps)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ComparisonReport report;
  report.config = config;
  report.observations =
      static_cast<std::int64_t>(reps) * static_cast<std::int64_t>(config.steps);
  const auto baseline_it = std::find(config.policies.begin(),
                                     config.policies.end(), Policy::kUniform);
  const std::size_t baseline = baseline_it == config.policies.end()
                                   ? 0
                                   : static_cast<std::size_t>(
                                         baseline_it - config.policies.begin());
  report.baseline = config.policies[baseline];

  const std::size_t np = config.policies.size();
  std::vector<std::vector<double>> hits(np), coverage(np), phase_b(np);
  std::vector<BucketShares> share_sums(np);
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t t = 0; t < results[r].steps.size(); ++t) {
      const auto& step = results[r].steps[t];
      for (std::size_t k = 0; k < np; ++k) {
        const StepReport& s = step[k];
        hits[k].push_back(s.realized_hits);
        coverage[k].push_back(s.expected_coverage);
        phase_b[k].push_back(s.phase_b_expected_hits);
        BucketShares& acc = share_sums[k];
        if (acc.buckets.empty()) {
          acc.buckets = s.bucket_shares.buckets;
          acc.input_fraction.assign(acc.buckets.size(), 0.0);
          acc.budget_share.assign(acc.buckets.size(), 0.0);
        }
        for (std::size_t b = 0; b < acc.buckets.size(); ++b) {
          acc.input_fraction[b] += s.bucket_shares.input_fraction[b];
          acc.budget_share[b] += s.bucket_shares.budget_share[b];
        }
        if (trace) {
          for (std::size_t i = 0; i < s.deltas.size(); ++i) {
            trace->push_back({static_cast<std::uint32_t>(r),
                              static_cast<std::uint32_t>(t), s.policy,
                              s.evidence[i].prompt_id, results[r].latent[t][i],
                              s.evidence[i].correct, s.deltas[i],
                              s.correct_total[i]});
          }
        }
      }
    }
  }

  const double n = static_cast<double>(report.observations);
  for (std::size_t k = 0; k < np; ++k) {
    PolicySummary summary;
    summary.policy = config.policies[k];
    summary.realized_hits = Summarize(hits[k]);
    summary.expected_coverage = Summarize(coverage[k]);
    summary.phase_b_expected_hits = Summarize(phase_b[k]);
    summary.rollouts_per_step =
        static_cast<std::int64_t>(config.population.size) * config.group_size;
    summary.bucket_shares = share_sums[k];
    for (double& v : summary.bucket_shares.input_fraction) v /= n;
    for (double& v : summary.bucket_shares.budget_share) v /= n;
    report.policies.push_back(std::move(summary));
  }

  auto diff = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return Summarize(d);
  };
  for (std::size_t k = 0; k < np; ++k) {
    if (k == baseline) continue;
    PairedDifference pd;
    pd.policy = config.policies[k];
    pd.baseline = report.baseline;
    pd.realized_hits = diff(hits[k], hits[baseline]);
    pd.expected_coverage = diff(coverage[k], coverage[baseline]);
    pd.phase_b_expected_hits = diff(phase_b[k], phase_b[baseline]);
    report.paired.push_back(pd);
  }
  return report;
}

}  // namespace hora
