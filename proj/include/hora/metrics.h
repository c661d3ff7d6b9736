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

#ifndef HORA_METRICS_H_
#define HORA_METRICS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hora/posterior.h"

namespace hora {

// N samples per prompt, c(q) of them correct.
struct EvalPool {
  int pool_size = 0;
  std::vector<int> correct_counts;

  void Validate() const;
};

struct PassKReport {
  std::vector<int> k_values;
  // Dataset means, aligned with k_values.
  std::vector<double> estimates;
  // Optional; per_prompt[q][k] when requested.
  std::vector<std::vector<double>> per_prompt;
};

// 1 - C(N - c, K) / C(N, K) through prod_{j<K} (N - c - j) / (N - j).
// Exactly 1 when N - c < K, exactly 0 when c == 0.
double PassKUnbiased(int n, int c, int k);

PassKReport PassKDataset(const EvalPool& pool, std::span<const int> k_values,
                         bool keep_per_prompt = false);

// 1 - (1 - p)^K.
double PassKAnalytic(double p, int k);

// Inclusive range of Phase-A correct counts.
struct CountBucket {
  int lo = 0;
  int hi = 0;

  std::string Label() const;
  bool Contains(int c) const { return lo <= c && c <= hi; }

  friend bool operator==(const CountBucket&, const CountBucket&) = default;
};

// {0}, {1..3}, {4..7}, {8}.
std::vector<CountBucket> AllocationFigureBuckets();
// {0}, {1}, ..., {g0}.
std::vector<CountBucket> PerCountBuckets(int g0);
// AllocationFigureBuckets() when g0 == 8, PerCountBuckets(g0) otherwise.
std::vector<CountBucket> DefaultBuckets(int g0);

// Throws ValidationError("buckets", ...) unless the buckets, in order,
// tile {0, ..., g0} exactly.
void ValidateBucketPartition(std::span<const CountBucket> buckets, int g0);

struct BucketShares {
  std::vector<CountBucket> buckets;
  std::vector<double> input_fraction;
  // All zeros when the total budget is zero.
  std::vector<double> budget_share;
};

BucketShares ComputeBucketShares(std::span<const PromptEvidence> evidence,
                                 std::span<const std::int64_t> deltas,
                                 std::span<const CountBucket> buckets);

// Shortest round-trip decimal; locale independent.
std::string FormatDouble(double value);

// "k,estimate" rows.
void WritePassKCsv(std::ostream& out, const PassKReport& report);
// "bucket,input_fraction,budget_share" rows.
void WriteBucketSharesCsv(std::ostream& out, const BucketShares& shares);

}  // namespace hora

#endif  // HORA_METRICS_H_
