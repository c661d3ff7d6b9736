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

#include "hora/posterior.h"

#include <algorithm>
#include <cmath>

#include "hora/errors.h"

namespace hora {

BetaParams::BetaParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    throw ValidationError("alpha", "must be finite and > 0");
  }
  if (!std::isfinite(beta) || !(beta > 0.0)) {
    throw ValidationError("beta", "must be finite and > 0");
  }
}

void PromptEvidence::Validate(const std::string& path) const {
  if (prompt_id < 0) {
    throw ValidationError(path + ".prompt_id", "must be nonnegative");
  }
  if (pre_rollouts < 0) {
    throw ValidationError(path + ".pre_rollouts", "must be nonnegative");
  }
  if (correct < 0) {
    throw ValidationError(path + ".correct", "must be nonnegative");
  }
  if (correct > pre_rollouts) {
    throw ValidationError(path + ".correct", "exceeds pre_rollouts");
  }
}

BetaParams PosteriorFromCounts(const BetaParams& prior,
                               const PromptEvidence& evidence) {
  evidence.Validate();
  return BetaParams(prior.alpha() + evidence.correct,
                    prior.beta() + (evidence.pre_rollouts - evidence.correct));
}

BetaParams PosteriorFromPriorEstimate(const PriorEstimate& estimate,
                                      const PromptEvidence& evidence,
                                      const ConcentrationClamp& clamp) {
  evidence.Validate();
  if (!(estimate.p_hat > 0.0 && estimate.p_hat < 1.0)) {
    throw ValidationError("p_hat", "must lie in (0, 1)");
  }
  if (std::isnan(estimate.s) || !(estimate.s > 0.0)) {
    throw ValidationError("s", "must be positive");
  }
  if (!(clamp.lo > 0.0 && clamp.lo <= clamp.hi)) {
    throw ValidationError("clamp", "requires 0 < lo <= hi");
  }
  const double s = std::clamp(estimate.s, clamp.lo, clamp.hi);
  return BetaParams(s * estimate.p_hat + evidence.correct,
                    s * (1.0 - estimate.p_hat) +
                        (evidence.pre_rollouts - evidence.correct));
}

double HitUtility(const BetaParams& posterior, std::int64_t delta) {
  const double a = posterior.alpha();
  const double b = posterior.beta();
  double survival = 1.0;
  for (std::int64_t l = 0; l < delta; ++l) {
    const double dl = static_cast<double>(l);
    survival *= (b + dl) / (a + b + dl);
    if (survival == 0.0) return 1.0;
  }
  return 1.0 - survival;
}

std::vector<double> HitUtilityTable(const BetaParams& posterior,
                                    int max_delta) {
  const double a = posterior.alpha();
  const double b = posterior.beta();
  std::vector<double> table(static_cast<std::size_t>(std::max(max_delta, 0)) +
                            1);
  double survival = 1.0;
  table[0] = 0.0;
  for (int l = 0; l < max_delta; ++l) {
    survival *= (b + l) / (a + b + l);
    table[l + 1] = survival == 0.0 ? 1.0 : 1.0 - survival;
  }
  return table;
}

double MarginalGain(const BetaParams& posterior, std::int64_t ell) {
  MarginalCursor cursor(posterior);
  while (cursor.ell() < ell) cursor.Advance();
  return cursor.value();
}

std::vector<double> MarginalSequence(const BetaParams& posterior, int length) {
  if (length < 1) throw ValidationError("length", "must be >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(length));
  MarginalCursor cursor(posterior);
  for (int i = 0; i < length; ++i) {
    out.push_back(cursor.value());
    cursor.Advance();
  }
  return out;
}

}  // namespace hora
