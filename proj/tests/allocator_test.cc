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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <numeric>
#include <set>
#include <span>
#include <vector>

#include "hora/allocator.h"
#include "hora/errors.h"
#include "hora/oracle.h"
#include "hora/posterior.h"
#include "hora/random.h"

namespace hora {
namespace {

using Deltas = std::vector<std::int64_t>;

AllocationRequest MakeRequest(const std::vector<int>& correct, int g0, int g,
                              int shards = 1) {
  AllocationRequest r;
  for (std::size_t i = 0; i < correct.size(); ++i) {
    r.evidence.push_back({static_cast<std::int64_t>(i), g0, correct[i]});
  }
  r.group_size = g;
  r.shards = shards;
  return r;
}

// Survival product written out directly.
double RefUtility(const BetaParams& p, std::int64_t d) {
  double s = 1.0;
  for (std::int64_t l = 0; l < d; ++l) {
    s *= (p.beta() + l) / (p.alpha() + p.beta() + l);
  }
  return 1.0 - s;
}

struct Best {
  double value = -1.0;
  Deltas argmax;
  int visited = 0;
};

// Recursive walk over every composition of `budget`.
Best BruteForce(const std::vector<BetaParams>& post, std::int64_t budget) {
  Best best;
  Deltas cur(post.size(), 0);
  std::function<void(std::size_t, std::int64_t, double)> rec =
      [&](std::size_t i, std::int64_t left, double acc) {
        if (i + 1 == post.size()) {
          cur[i] = left;
          const double v = acc + RefUtility(post[i], left);
          ++best.visited;
          if (v > best.value) {
            best.value = v;
            best.argmax = cur;
          }
          return;
        }
        for (std::int64_t d = 0; d <= left; ++d) {
          cur[i] = d;
          rec(i + 1, left - d, acc + RefUtility(post[i], d));
        }
      };
  rec(0, budget, 0.0);
  return best;
}

struct RandomInstance {
  AllocationRequest request;
  std::vector<BetaParams> posteriors;
};

RandomInstance DrawInstance(RandomStream& rng, int max_prompts, int max_g) {
  const int n = 1 + static_cast<int>(rng.Below(max_prompts));
  const int g0 = static_cast<int>(rng.Below(9));
  const int g = std::max(1, g0 + static_cast<int>(rng.Below(max_g + 1)));
  std::vector<int> c(n);
  for (int& ci : c) ci = static_cast<int>(rng.Below(g0 + 1));
  RandomInstance out{MakeRequest(c, g0, g), {}};
  out.request.prior = BetaParams(0.5 + 2.5 * rng.Uniform(), 0.5 + 2.5 * rng.Uniform());
  out.posteriors = out.request.Posteriors();
  return out;
}

TEST_CASE("policy names round-trip") {
  for (Policy p : {Policy::kHora, Policy::kUniform, Policy::kHardFirst,
                   Policy::kPlugin}) {
    CHECK(ParsePolicy(PolicyName(p)) == p);
  }
  CHECK(PolicyName(Policy::kHardFirst) == "hard_first");
  CHECK_THROWS_AS(ParsePolicy("greedy"), ValidationError);
}

TEST_CASE("greedy examples") {
  // Posteriors (1,9) and (9,1).
  AllocationRequest r = MakeRequest({0, 8}, 8, 9);
  const auto post = r.Posteriors();
  REQUIRE(post[0] == BetaParams(1, 9));
  REQUIRE(post[1] == BetaParams(9, 1));

  SUBCASE("budget 2") {
    const Best oracle = BruteForce(post, 2);
    CHECK(oracle.visited == 3);
    CHECK(oracle.argmax == Deltas{1, 1});
    const AllocationResult res = AllocateGreedy(r);
    CHECK(res.deltas == Deltas{1, 1});
    CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(res.objective == doctest::Approx(oracle.value).epsilon(1e-15));
    CHECK(res.policy == Policy::kHora);
    CHECK(res.per_shard_budgets == Deltas{2});
  }
  SUBCASE("budget 1") {
    std::vector<BetaParams> p(post.begin(), post.end());
    CHECK(BruteForce(p, 1).argmax == Deltas{0, 1});
    CHECK(GreedyDeltas(p, 1) == Deltas{0, 1});
  }
  SUBCASE("zero budget") {
    const AllocationResult res = AllocateGreedy(MakeRequest({1, 3, 8}, 8, 8));
    CHECK(res.deltas == Deltas{0, 0, 0});
    CHECK(res.objective == 0.0);
  }
}

TEST_CASE("request validation") {
  CHECK_THROWS_AS(AllocateGreedy(MakeRequest({}, 8, 32)), ValidationError);
  CHECK_THROWS_AS(AllocateGreedy(MakeRequest({0}, 8, 7)), ValidationError);
  CHECK_THROWS_AS(AllocateGreedy(MakeRequest({9}, 8, 32)), ValidationError);
  CHECK_THROWS_AS(AllocateGreedy(MakeRequest({0, 1}, 8, 32, 2)),
                  ValidationError);
  CHECK_THROWS_AS(AllocateSharded(MakeRequest({0, 1}, 8, 32, 3)),
                  ValidationError);

  AllocationRequest mixed = MakeRequest({0, 1}, 8, 32);
  mixed.evidence[1].pre_rollouts = 4;
  try {
    mixed.Validate();
    FAIL("mixed G0 accepted");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "evidence[1].pre_rollouts");
  }
  AllocationRequest bad = MakeRequest({0, 9}, 8, 32);
  try {
    bad.Validate();
    FAIL("c > G0 accepted");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "evidence[1].correct");
  }
}

TEST_CASE("sharding") {
  SUBCASE("divisible batch") {
    AllocationRequest r = MakeRequest(std::vector<int>(60, 2), 8, 32, 4);
    const auto shards = PartitionShards(60, 4);
    REQUIRE(shards.size() == 4);
    for (const auto& s : shards) CHECK(s.size() == 15);
    const AllocationResult res = AllocateSharded(r);
    CHECK(res.per_shard_budgets == Deltas{360, 360, 360, 360});
    CHECK(res.TotalDelta() == 1440);
  }
  SUBCASE("remainder goes to earlier shards") {
    const auto shards = PartitionShards(5, 2);
    REQUIRE(shards.size() == 2);
    CHECK(shards[0].begin == 0);
    CHECK(shards[0].end == 3);
    CHECK(shards[1].begin == 3);
    CHECK(shards[1].end == 5);
    const AllocationResult res =
        AllocateSharded(MakeRequest({0, 1, 2, 3, 4}, 4, 10, 2));
    CHECK(res.per_shard_budgets == Deltas{18, 12});
  }
  SUBCASE("single shard matches unsharded greedy") {
    RandomStream rng(7, {});
    for (int t = 0; t < 50; ++t) {
      RandomInstance inst = DrawInstance(rng, 12, 24);
      CHECK(AllocateSharded(inst.request) == AllocateGreedy(inst.request));
    }
  }
  SUBCASE("dispatch") {
    AllocationRequest r = MakeRequest({0, 1, 2, 3}, 4, 8, 2);
    CHECK(Allocate(r, Policy::kHora) == AllocateSharded(r));
    CHECK_THROWS_AS(PartitionShards(3, 4), ValidationError);
    CHECK_THROWS_AS(PartitionShards(3, 0), ValidationError);
  }
}

TEST_CASE("uniform examples") {
  AllocationResult res = AllocateUniform(MakeRequest({0, 3, 8, 5}, 8, 32));
  CHECK(res.deltas == Deltas{24, 24, 24, 24});
  CHECK(res.policy == Policy::kUniform);
  CHECK(AllocateUniform(MakeRequest({0, 8}, 8, 8)).deltas == Deltas{0, 0});
  res = AllocateUniform(MakeRequest({0, 1, 1}, 1, 4));
  CHECK(res.deltas == Deltas{3, 3, 3});
  CHECK(res.TotalDelta() == 9);
  // Objective is the posterior hit utility of the allocation.
  const auto post = MakeRequest({0, 1, 1}, 1, 4).Posteriors();
  double want = 0.0;
  for (const auto& p : post) want += RefUtility(p, 3);
  CHECK(res.objective == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("hard-first examples") {
  // Budget 3 * (11 - 8) = 9.
  AllocationResult res = AllocateHardFirst(MakeRequest({0, 0, 5}, 8, 11));
  CHECK(res.deltas == Deltas{5, 4, 0});
  CHECK(res.policy == Policy::kHardFirst);
  // No zero-count prompt: uniform fallback, budget 6.
  res = AllocateHardFirst(MakeRequest({3, 5}, 8, 11));
  CHECK(res.deltas == Deltas{3, 3});
  res = AllocateHardFirst(MakeRequest({0}, 8, 20));
  CHECK(res.deltas == Deltas{12});
  res = AllocateHardFirst(MakeRequest({4, 0, 2, 0, 0}, 8, 10));
  CHECK(res.deltas == Deltas{0, 4, 0, 3, 3});
}

TEST_CASE("plug-in examples") {
  // Marginals: 0 for c=0 against 0.5, 0.25, 0.125 for c=2.
  const std::vector<PromptEvidence> ev{{0, 4, 0}, {1, 4, 2}};
  CHECK(PluginDeltas(ev, 3) == Deltas{0, 3});
  // The same loop inside a request, whose budget is a multiple of Gamma.
  AllocationResult res = AllocatePlugin(MakeRequest({0, 2, 0}, 4, 5));
  CHECK(res.deltas == Deltas{0, 3, 0});
  CHECK(res.policy == Policy::kPlugin);

  res = AllocatePlugin(MakeRequest({0, 0}, 4, 6));
  CHECK(res.deltas == Deltas{2, 2});
  res = AllocatePlugin(MakeRequest({4}, 4, 6));
  CHECK(res.deltas == Deltas{2});
  CHECK_THROWS_AS(AllocatePlugin(MakeRequest({0, 0}, 0, 4)), ValidationError);
}

TEST_CASE("exchange condition examples") {
  const std::vector<BetaParams> post{BetaParams(1, 9), BetaParams(9, 1)};
  CHECK(VerifyExchangeProperty(post, Deltas{1, 1}).holds);
  const ExchangeCheck bad = VerifyExchangeProperty(post, Deltas{2, 0});
  CHECK_FALSE(bad.holds);
  REQUIRE(bad.violation.has_value());
  CHECK(bad.violation->i == 0);
  CHECK(bad.violation->j == 1);
  CHECK(bad.violation->assigned_marginal ==
        doctest::Approx(0.1 * 9.0 / 11.0).epsilon(1e-14));
  CHECK(bad.violation->next_marginal == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(VerifyExchangeProperty(post, Deltas{0, 0}).holds);
}

TEST_CASE("property: every policy conserves the budget") {
  RandomStream rng(201, {});
  for (int t = 0; t < 500; ++t) {
    RandomInstance inst = DrawInstance(rng, 20, 40);
    if (inst.request.PreRollouts() == 0) inst.request.evidence[0].correct = 0;
    const std::int64_t budget = inst.request.Budget();
    for (Policy p : {Policy::kHora, Policy::kUniform, Policy::kHardFirst,
                     Policy::kPlugin}) {
      if (p == Policy::kPlugin && inst.request.PreRollouts() == 0) continue;
      const AllocationResult res = Allocate(inst.request, p);
      REQUIRE(res.deltas.size() == inst.request.evidence.size());
      for (auto d : res.deltas) REQUIRE(d >= 0);
      REQUIRE(res.TotalDelta() == budget);
      REQUIRE(std::isfinite(res.objective));
      REQUIRE(res.objective >= 0.0);
      REQUIRE(res.objective <= static_cast<double>(res.deltas.size()));
    }
  }
}

TEST_CASE("property: greedy matches brute force and the DP oracle") {
  RandomStream rng(202, {});
  for (int t = 0; t < 300; ++t) {
    const int n = 1 + static_cast<int>(rng.Below(5));
    std::vector<BetaParams> post;
    for (int i = 0; i < n; ++i) {
      const int g0 = static_cast<int>(rng.Below(9));
      const int c = static_cast<int>(rng.Below(g0 + 1));
      post.push_back(PosteriorFromCounts(BetaParams(), {i, g0, c}));
    }
    const std::int64_t budget = rng.Below(13);
    const Deltas greedy = GreedyDeltas(post, budget);
    const double value = TotalHitUtility(post, greedy);
    const Best oracle = BruteForce(post, budget);
    CAPTURE(t);
    REQUIRE(std::abs(value - oracle.value) <= 1e-12);
    REQUIRE(std::abs(value - DpOptimal(post, budget).optimum) <= 1e-9);
    REQUIRE(VerifyExchangeProperty(post, greedy).holds);
  }
}

TEST_CASE("property: greedy output satisfies the exchange condition") {
  RandomStream rng(203, {});
  for (int t = 0; t < 300; ++t) {
    RandomInstance inst = DrawInstance(rng, 30, 40);
    const AllocationResult res = AllocateGreedy(inst.request);
    REQUIRE(VerifyExchangeProperty(inst.posteriors, res.deltas).holds);
  }
}

TEST_CASE("property: permutation equivariance with distinct marginals") {
  RandomStream rng(204, {});
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    // Continuous priors per prompt make marginal ties essentially
    // impossible; the set check below confirms it.
    const int n = 2 + static_cast<int>(rng.Below(8));
    std::vector<BetaParams> post;
    for (int i = 0; i < n; ++i) {
      post.emplace_back(0.5 + 8 * rng.Uniform(), 0.5 + 8 * rng.Uniform());
    }
    const std::int64_t budget = rng.Below(60);
    std::set<double> seen;
    bool distinct = true;
    for (const auto& p : post) {
      for (auto m : MarginalSequence(p, static_cast<std::int64_t>(budget) + 1)) {
        distinct = distinct && seen.insert(m).second;
      }
    }
    if (!distinct) continue;
    ++checked;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.Below(i + 1)]);
    }
    std::vector<BetaParams> permuted;
    for (auto k : perm) permuted.push_back(post[k]);
    const Deltas base = GreedyDeltas(post, budget);
    const Deltas moved = GreedyDeltas(permuted, budget);
    for (int i = 0; i < n; ++i) REQUIRE(moved[i] == base[perm[i]]);
  }
  CHECK(checked > 150);
}

TEST_CASE("property: repeated allocation is bitwise identical") {
  RandomStream rng(205, {});
  for (int t = 0; t < 100; ++t) {
    RandomInstance inst = DrawInstance(rng, 40, 40);
    const AllocationResult a = AllocateGreedy(inst.request);
    const AllocationResult b = AllocateGreedy(inst.request);
    REQUIRE(a.deltas == b.deltas);
    REQUIRE(std::memcmp(&a.objective, &b.objective, sizeof(double)) == 0);
  }
}

TEST_CASE("property: sharded budgets conserve and each shard is exchange-optimal") {
  RandomStream rng(206, {});
  for (int t = 0; t < 200; ++t) {
    RandomInstance inst = DrawInstance(rng, 40, 30);
    const int n = static_cast<int>(inst.request.evidence.size());
    inst.request.shards = 1 + static_cast<int>(rng.Below(n));
    const AllocationResult res = AllocateSharded(inst.request);
    const auto ranges = PartitionShards(n, inst.request.shards);
    REQUIRE(res.per_shard_budgets.size() == ranges.size());
    std::int64_t total = 0;
    for (std::size_t s = 0; s < ranges.size(); ++s) {
      const auto& rg = ranges[s];
      const std::int64_t g = inst.request.group_size - inst.request.PreRollouts();
      REQUIRE(res.per_shard_budgets[s] == static_cast<std::int64_t>(rg.size()) * g);
      total += res.per_shard_budgets[s];
      std::span<const BetaParams> sub(inst.posteriors.data() + rg.begin, rg.size());
      std::span<const std::int64_t> dsub(res.deltas.data() + rg.begin, rg.size());
      std::int64_t used = 0;
      for (auto d : dsub) used += d;
      REQUIRE(used == res.per_shard_budgets[s]);
      REQUIRE(VerifyExchangeProperty(sub, dsub).holds);
    }
    REQUIRE(total == inst.request.Budget());
  }
}

// Number of strictly positive plug-in marginals p(1-p)^l summed over prompts,
// counted independently of the allocator.
std::int64_t PositivePluginMarginals(const std::vector<int>& c, int g0,
                                     std::int64_t cap) {
  std::int64_t count = 0;
  for (int ci : c) {
    const double p = static_cast<double>(ci) / g0;
    double m = p;
    for (std::int64_t l = 0; l < cap && m > 0.0; ++l) {
      ++count;
      m *= 1 - p;
    }
  }
  return count;
}

TEST_CASE("property: plug-in never funds zero-count prompts while others remain") {
  int instances = 0;
  for (int g0 = 1; g0 <= 4; ++g0) {
    for (int n = 2; n <= 4; ++n) {
      std::vector<int> c(n, 0);
      std::function<void(int)> rec = [&](int i) {
        if (i == n) {
          const bool has_zero = std::count(c.begin(), c.end(), 0) > 0;
          const bool has_mid = std::any_of(c.begin(), c.end(), [&](int x) {
            return x > 0 && x < g0;
          });
          if (!has_zero || !has_mid) return;
          std::vector<PromptEvidence> ev;
          for (int k = 0; k < n; ++k) ev.push_back({k, g0, c[k]});
          for (std::int64_t budget = 0; budget <= 6; ++budget) {
            if (budget > PositivePluginMarginals(c, g0, budget)) continue;
            ++instances;
            const Deltas d = PluginDeltas(ev, budget);
            for (int k = 0; k < n; ++k) {
              if (c[k] == 0) REQUIRE(d[k] == 0);
            }
          }
          return;
        }
        for (int v = 0; v <= g0; ++v) {
          c[i] = v;
          rec(i + 1);
        }
      };
      rec(0);
    }
  }
  CHECK(instances > 100);
}

}  // namespace
}  // namespace hora
