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

#ifndef HORA_ORACLE_H_
#define HORA_ORACLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "hora/posterior.h"

namespace hora {

// Exact and statistical references for the allocator and posterior code.
// Nothing here is meant for production allocation.

enum class OracleMethod { kDp, kEnumerate };

struct OracleReport {
  double optimum = 0.0;
  std::vector<std::int64_t> argmax;
  OracleMethod method = OracleMethod::kDp;
};

inline constexpr std::int64_t kDefaultDpBudgetCap = 10'000;
inline constexpr std::uint64_t kDefaultCompositionCap = 1'000'000;

// Exact optimum of max sum_i U_i(d_i) s.t. sum d_i = budget via
//   f(i, b) = max_{0 <= d <= b} f(i - 1, b - d) + U_i(d),
// O(n * budget^2) time, one rolling row plus an n x (budget + 1) parent
// table. Among maximizers, the later prompt takes the smallest d.
OracleReport DpOptimal(std::span<const BetaParams> posteriors,
                       std::int64_t budget,
                       std::int64_t budget_cap = kDefaultDpBudgetCap);

// C(budget + n - 1, n - 1), saturating at UINT64_MAX.
std::uint64_t CompositionCount(std::size_t n, std::int64_t budget);

// Brute force over every composition of `budget` into n parts, visited in
// lexicographic order; keeps the first maximizer.
OracleReport EnumerateOptimal(
    std::span<const BetaParams> posteriors, std::int64_t budget,
    std::uint64_t composition_cap = kDefaultCompositionCap);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

// Sample mean and standard error of 1 - (1 - P)^delta over `samples`
// independent P ~ Beta(alpha, beta). samples >= 1000.
MonteCarloEstimate McHitUtility(const BetaParams& posterior,
                                std::int64_t delta, std::int64_t samples,
                                std::uint64_t seed);

// Log-beta evaluations in extended precision, independent of the
// recurrences in posterior.h:
//   M(ell) = exp(lnB(a + 1, b + ell) - lnB(a, b))
//   U(delta) = 1 - exp(lnB(a, b + delta) - lnB(a, b))
double LogBetaMarginal(const BetaParams& posterior, std::int64_t ell);
double LogBetaHitUtility(const BetaParams& posterior, std::int64_t delta);

}  // namespace hora

#endif  // HORA_ORACLE_H_
