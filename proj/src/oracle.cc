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

#include "hora/oracle.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "hora/errors.h"
#include "hora/random.h"

namespace hora {
namespace {

std::vector<std::vector<double>> UtilityTables(
    std::span<const BetaParams> posteriors, std::int64_t budget) {
  std::vector<std::vector<double>> tables;
  tables.reserve(posteriors.size());
  for (const BetaParams& p : posteriors) {
    tables.push_back(HitUtilityTable(p, static_cast<int>(budget)));
  }
  return tables;
}

void CheckCommon(std::span<const BetaParams> posteriors, std::int64_t budget) {
  if (posteriors.empty()) {
    throw ValidationError("posteriors", "must be nonempty");
  }
  if (budget < 0) throw ValidationError("budget", "must be >= 0");
}

struct Enumerator {
  const std::vector<std::vector<double>>& tables;
  std::vector<std::int64_t> current;
  std::vector<std::int64_t> best;
  double best_value = -std::numeric_limits<double>::infinity();

  void Visit(std::size_t i, std::int64_t remaining, double partial) {
    if (i + 1 == tables.size()) {
      current[i] = remaining;
      const double value = partial + tables[i][remaining];
      if (value > best_value) {
        best_value = value;
        best = current;
      }
      return;
    }
    for (std::int64_t d = 0; d <= remaining; ++d) {
      current[i] = d;
      Visit(i + 1, remaining - d, partial + tables[i][d]);
    }
  }
};

long double LogBeta(long double a, long double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

OracleReport DpOptimal(std::span<const BetaParams> posteriors,
                       std::int64_t budget, std::int64_t budget_cap) {
  CheckCommon(posteriors, budget);
  if (budget > budget_cap) {
    throw ValidationError("budget", "exceeds the DP oracle cap of " +
                                        std::to_string(budget_cap));
  }
  const auto tables = UtilityTables(posteriors, budget);
  const std::size_t n = posteriors.size();
  const auto width = static_cast<std::size_t>(budget) + 1;
  constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

  // row[b] = best value of the prompts seen so far using exactly b units.
  std::vector<double> row(width, kInfeasible);
  row[0] = 0.0;
  std::vector<std::int32_t> parent(n * width, 0);
  std::vector<double> next(width);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < width; ++b) {
      double best = kInfeasible;
      std::int32_t arg = 0;
      for (std::size_t d = 0; d <= b; ++d) {
        if (row[b - d] == kInfeasible) continue;
        const double value = row[b - d] + tables[i][d];
        if (value > best) {
          best = value;
          arg = static_cast<std::int32_t>(d);
        }
      }
      next[b] = best;
      parent[i * width + b] = arg;
    }
    row.swap(next);
  }

  OracleReport report;
  report.method = OracleMethod::kDp;
  report.optimum = row[width - 1];
  report.argmax.assign(n, 0);
  std::size_t b = width - 1;
  for (std::size_t i = n; i-- > 0;) {
    const auto d = static_cast<std::size_t>(parent[i * width + b]);
    report.argmax[i] = static_cast<std::int64_t>(d);
    b -= d;
  }
  return report;
}

std::uint64_t CompositionCount(std::size_t n, std::int64_t budget) {
  if (n == 0) return budget == 0 ? 1 : 0;
  // C(budget + k, k) built up k = 1..n-1; each partial product is an exact
  // binomial coefficient.
  std::uint64_t count = 1;
  const auto top = static_cast<std::uint64_t>(budget);
  for (std::uint64_t k = 1; k < n; ++k) {
    // count * (top + k) / k is exact; cancel the gcd first so the product
    // only overflows when the result does.
    const std::uint64_t g = std::gcd(count, k);
    const std::uint64_t factor = (top + k) / (k / g);
    const std::uint64_t reduced = count / g;
    if (factor != 0 &&
        reduced > std::numeric_limits<std::uint64_t>::max() / factor) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    count = reduced * factor;
  }
  return count;
}

OracleReport EnumerateOptimal(std::span<const BetaParams> posteriors,
                              std::int64_t budget,
                              std::uint64_t composition_cap) {
  CheckCommon(posteriors, budget);
  if (budget > kDefaultDpBudgetCap) {
    throw ValidationError("budget", "exceeds the enumeration cap of " +
                                        std::to_string(kDefaultDpBudgetCap));
  }
  if (CompositionCount(posteriors.size(), budget) > composition_cap) {
    throw ValidationError("budget",
                          "instance has more than " +
                              std::to_string(composition_cap) +
                              " feasible allocations");
  }
  const auto tables = UtilityTables(posteriors, budget);
  Enumerator e{tables, std::vector<std::int64_t>(posteriors.size(), 0), {}};
  e.Visit(0, budget, 0.0);
  return {e.best_value, std::move(e.best), OracleMethod::kEnumerate};
}

MonteCarloEstimate McHitUtility(const BetaParams& posterior,
                                std::int64_t delta, std::int64_t samples,
                                std::uint64_t seed) {
  if (samples < 1000) throw ValidationError("samples", "must be >= 1000");
  if (delta < 0) throw ValidationError("delta", "must be >= 0");
  RandomStream rng(seed, {0, 0, StreamPhase::kMonteCarlo, 0});
  // Welford over the survival term (1 - P)^delta, which keeps precision
  // when nearly every draw hits.
  double mean = 0.0;
  double m2 = 0.0;
  const double exponent = static_cast<double>(delta);
  for (std::int64_t k = 1; k <= samples; ++k) {
    const double p = rng.Beta(posterior.alpha(), posterior.beta());
    const double y = delta == 0 ? 1.0 : std::pow(1.0 - p, exponent);
    const double d = y - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (y - mean);
  }
  const double n = static_cast<double>(samples);
  const double variance = m2 / (n - 1.0);
  return {1.0 - mean, std::sqrt(variance / n)};
}

double LogBetaMarginal(const BetaParams& posterior, std::int64_t ell) {
  const long double a = posterior.alpha();
  const long double b = posterior.beta();
  const long double l = static_cast<long double>(ell);
  return static_cast<double>(
      std::exp(LogBeta(a + 1.0L, b + l) - LogBeta(a, b)));
}

double LogBetaHitUtility(const BetaParams& posterior, std::int64_t delta) {
  const long double a = posterior.alpha();
  const long double b = posterior.beta();
  const long double d = static_cast<long double>(delta);
  return static_cast<double>(1.0L -
                             std::exp(LogBeta(a, b + d) - LogBeta(a, b)));
}

}  // namespace hora
