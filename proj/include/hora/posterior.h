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

#ifndef HORA_POSTERIOR_H_
#define HORA_POSTERIOR_H_

#include <cstdint>
#include <string>
#include <vector>

namespace hora {

// Shape pair of a Beta distribution over a prompt's success probability.
// Both shapes are finite and strictly positive; the constructor enforces it.
class BetaParams {
 public:
  // Uniform prior Beta(1, 1).
  BetaParams() = default;
  BetaParams(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double Mean() const { return alpha_ / (alpha_ + beta_); }

  friend bool operator==(const BetaParams&, const BetaParams&) = default;

 private:
  double alpha_ = 1.0;
  double beta_ = 1.0;
};

// Phase-A observation for one prompt: `correct` successes out of
// `pre_rollouts` draws.
struct PromptEvidence {
  std::int64_t prompt_id = 0;
  int pre_rollouts = 0;
  int correct = 0;

  // Throws ValidationError naming `<path>.correct` etc.
  void Validate(const std::string& path = "evidence") const;

  friend bool operator==(const PromptEvidence&,
                         const PromptEvidence&) = default;
};

// Externally supplied prior mean and concentration for one prompt.
struct PriorEstimate {
  double p_hat = 0.5;
  double s = 2.0;

  friend bool operator==(const PriorEstimate&, const PriorEstimate&) = default;
};

// Range the concentration s is clamped into before it is combined with
// evidence.
struct ConcentrationClamp {
  double lo = 0.25;
  double hi = 16.0;
};

// Conjugate update: (alpha0 + c, beta0 + G0 - c).
BetaParams PosteriorFromCounts(const BetaParams& prior,
                               const PromptEvidence& evidence);

// (s * p_hat + c, s * (1 - p_hat) + G0 - c), with s clamped to `clamp`.
// p_hat must lie in the open unit interval and s must be positive; neither
// is silently repaired.
BetaParams PosteriorFromPriorEstimate(const PriorEstimate& estimate,
                                      const PromptEvidence& evidence,
                                      const ConcentrationClamp& clamp = {});

// Posterior probability that at least one of `delta` further rollouts
// succeeds: 1 - B(alpha, beta + delta) / B(alpha, beta). Evaluated through
// the survival product prod_{l < delta} (beta + l) / (alpha + beta + l);
// returns exactly 1 once that product underflows.
double HitUtility(const BetaParams& posterior, std::int64_t delta);

// [HitUtility(0), ..., HitUtility(max_delta)] in O(max_delta).
std::vector<double> HitUtilityTable(const BetaParams& posterior,
                                    int max_delta);

// Marginal hit utility M(ell) = HitUtility(ell + 1) - HitUtility(ell)
// = B(alpha + 1, beta + ell) / B(alpha, beta), by the linear recurrence.
double MarginalGain(const BetaParams& posterior, std::int64_t ell);

// [M(0), ..., M(length - 1)]. length >= 1.
std::vector<double> MarginalSequence(const BetaParams& posterior, int length);

// Recurrence state (M(ell), ell) for one prompt:
//   M(0) = alpha / (alpha + beta)
//   M(ell + 1) = M(ell) * (beta + ell) / (alpha + beta + ell + 1)
class MarginalCursor {
 public:
  explicit MarginalCursor(const BetaParams& posterior)
      : alpha_(posterior.alpha()),
        beta_(posterior.beta()),
        value_(posterior.Mean()) {}

  double value() const { return value_; }
  std::int64_t ell() const { return ell_; }

  void Advance() {
    const double l = static_cast<double>(ell_);
    value_ *= (beta_ + l) / (alpha_ + beta_ + l + 1.0);
    ++ell_;
  }

 private:
  double alpha_;
  double beta_;
  double value_;
  std::int64_t ell_ = 0;
};

}  // namespace hora

#endif  // HORA_POSTERIOR_H_
