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

#include "hora/metrics.h"

#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>

#include "hora/errors.h"

namespace hora {

void EvalPool::Validate() const {
  if (pool_size < 1) throw ValidationError("pool_size", "must be >= 1");
  if (correct_counts.empty()) {
    throw ValidationError("correct_counts", "pool must contain a prompt");
  }
  for (std::size_t q = 0; q < correct_counts.size(); ++q) {
    const int c = correct_counts[q];
    if (c < 0 || c > pool_size) {
      throw ValidationError("correct_counts[" + std::to_string(q) + "]",
                            "must lie in [0, pool_size]");
    }
  }
}

double PassKUnbiased(int n, int c, int k) {
  if (n < 1) throw ValidationError("N", "must be >= 1");
  if (k < 1) throw ValidationError("K", "must be >= 1");
  if (k > n) throw ValidationError("K", "must not exceed N");
  if (c < 0 || c > n) throw ValidationError("c", "must lie in [0, N]");
  if (n - c < k) return 1.0;
  double miss = 1.0;
  for (int j = 0; j < k; ++j) {
    miss *= static_cast<double>(n - c - j) / static_cast<double>(n - j);
  }
  return 1.0 - miss;
}

PassKReport PassKDataset(const EvalPool& pool, std::span<const int> k_values,
                         bool keep_per_prompt) {
  pool.Validate();
  PassKReport report;
  report.k_values.assign(k_values.begin(), k_values.end());
  report.estimates.assign(k_values.size(), 0.0);
  if (keep_per_prompt) {
    report.per_prompt.assign(pool.correct_counts.size(),
                             std::vector<double>(k_values.size(), 0.0));
  }
  const double count = static_cast<double>(pool.correct_counts.size());
  for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
    double sum = 0.0;
    for (std::size_t q = 0; q < pool.correct_counts.size(); ++q) {
      const double v =
          PassKUnbiased(pool.pool_size, pool.correct_counts[q], k_values[ki]);
      if (keep_per_prompt) report.per_prompt[q][ki] = v;
      sum += v;
    }
    report.estimates[ki] = sum / count;
  }
  return report;
}

double PassKAnalytic(double p, int k) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p", "must lie in [0, 1]");
  if (k < 1) throw ValidationError("K", "must be >= 1");
  return 1.0 - std::pow(1.0 - p, k);
}

std::string CountBucket::Label() const {
  return lo == hi ? std::to_string(lo)
                  : std::to_string(lo) + "-" + std::to_string(hi);
}

std::vector<CountBucket> AllocationFigureBuckets() {
  return {{0, 0}, {1, 3}, {4, 7}, {8, 8}};
}

std::vector<CountBucket> PerCountBuckets(int g0) {
  std::vector<CountBucket> out;
  for (int c = 0; c <= g0; ++c) out.push_back({c, c});
  return out;
}

std::vector<CountBucket> DefaultBuckets(int g0) {
  return g0 == 8 ? AllocationFigureBuckets() : PerCountBuckets(g0);
}

void ValidateBucketPartition(std::span<const CountBucket> buckets, int g0) {
  int expected = 0;
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    if (buckets[b].lo != expected || buckets[b].hi < buckets[b].lo) {
      throw ValidationError("buckets[" + std::to_string(b) + "]",
                            "buckets must tile 0..G0 in ascending order");
    }
    expected = buckets[b].hi + 1;
  }
  if (expected != g0 + 1) {
    throw ValidationError("buckets", "buckets must cover 0.." +
                                         std::to_string(g0) + " exactly");
  }
}

BucketShares ComputeBucketShares(std::span<const PromptEvidence> evidence,
                                 std::span<const std::int64_t> deltas,
                                 std::span<const CountBucket> buckets) {
  if (evidence.size() != deltas.size()) {
    throw ValidationError("deltas", "length must match evidence");
  }
  if (evidence.empty()) throw ValidationError("evidence", "must be nonempty");
  ValidateBucketPartition(buckets, evidence[0].pre_rollouts);

  BucketShares shares;
  shares.buckets.assign(buckets.begin(), buckets.end());
  std::vector<std::int64_t> prompts(buckets.size(), 0);
  std::vector<std::int64_t> budget(buckets.size(), 0);
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    std::size_t b = 0;
    while (b < buckets.size() && !buckets[b].Contains(evidence[i].correct)) ++b;
    if (b == buckets.size()) {
      throw ValidationError("evidence[" + std::to_string(i) + "].correct",
                            "outside the bucket partition");
    }
    ++prompts[b];
    budget[b] += deltas[i];
  }
  const double n = static_cast<double>(evidence.size());
  const auto total = std::accumulate(budget.begin(), budget.end(),
                                     std::int64_t{0});
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    shares.input_fraction.push_back(static_cast<double>(prompts[b]) / n);
    shares.budget_share.push_back(
        total == 0 ? 0.0
                   : static_cast<double>(budget[b]) /
                         static_cast<double>(total));
  }
  return shares;
}

std::string FormatDouble(double value) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

void WritePassKCsv(std::ostream& out, const PassKReport& report) {
  out << "k,estimate\n";
  for (std::size_t i = 0; i < report.k_values.size(); ++i) {
    out << report.k_values[i] << ',' << FormatDouble(report.estimates[i])
        << '\n';
  }
}

void WriteBucketSharesCsv(std::ostream& out, const BucketShares& shares) {
  out << "bucket,input_fraction,budget_share\n";
  for (std::size_t b = 0; b < shares.buckets.size(); ++b) {
    out << shares.buckets[b].Label() << ','
        << FormatDouble(shares.input_fraction[b]) << ','
        << FormatDouble(shares.budget_share[b]) << '\n';
  }
}

}  // namespace hora
