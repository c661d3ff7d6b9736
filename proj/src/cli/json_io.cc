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

#include "hora/json_io.h"

#include <initializer_list>
#include <limits>
#include <string_view>

namespace hora {
namespace {

std::string Child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string Element(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void ExpectObject(const Json& j, const std::string& path,
                  std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) {
    throw ValidationError(path.empty() ? "$" : path, "expected an object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || item.key() == a;
    if (!known) throw ValidationError(Child(path, item.key()), "unknown field");
  }
}

const Json& Field(const Json& j, const std::string& path,
                  std::string_view key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(Child(path, key), "is required");
  return *it;
}

std::int64_t AsInt(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    throw ValidationError(path, "expected an integer");
  }
  if (j.is_number_unsigned() &&
      j.get<std::uint64_t>() >
          static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw ValidationError(path, "integer out of range");
  }
  return j.get<std::int64_t>();
}

int AsInt32(const Json& j, const std::string& path) {
  const std::int64_t v = AsInt(j, path);
  if (v < std::numeric_limits<int>::min() ||
      v > std::numeric_limits<int>::max()) {
    throw ValidationError(path, "integer out of range");
  }
  return static_cast<int>(v);
}

double AsDouble(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, "expected a number");
  return j.get<double>();
}

const Json& AsArray(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array");
  return j;
}

std::string AsString(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError(path, "expected a string");
  return j.get<std::string>();
}

Policy PolicyFromJson(const Json& j, const std::string& path) {
  try {
    return ParsePolicy(AsString(j, path));
  } catch (const ValidationError& e) {
    throw ValidationError(path, e.message());
  }
}

// Re-roots errors raised by domain constructors ("alpha") under a path.
template <typename F>
auto Rooted(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(Child(path, e.field()), e.message());
  }
}

Json ToJson(const MetricSummary& s) {
  return Json{{"mean", s.mean}, {"standard_error", s.standard_error}};
}

Json ToJson(const LatentDistribution& d, double weight) {
  Json j{{"weight", weight}};
  switch (d.kind) {
    case DistributionKind::kPoint:
      j["kind"] = "point";
      j["p"] = d.first;
      break;
    case DistributionKind::kBeta:
      j["kind"] = "beta";
      j["a"] = d.first;
      j["b"] = d.second;
      break;
    case DistributionKind::kUniform:
      j["kind"] = "uniform";
      j["lo"] = d.first;
      j["hi"] = d.second;
      break;
  }
  return j;
}

PopulationComponent ComponentFromJson(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
  const std::string kind = AsString(Field(j, path, "kind"), Child(path, "kind"));
  PopulationComponent c;
  c.weight = AsDouble(Field(j, path, "weight"), Child(path, "weight"));
  auto num = [&](std::string_view key) {
    return AsDouble(Field(j, path, key), Child(path, key));
  };
  if (kind == "point") {
    ExpectObject(j, path, {"weight", "kind", "p"});
    c.distribution = LatentDistribution::Point(num("p"));
  } else if (kind == "beta") {
    ExpectObject(j, path, {"weight", "kind", "a", "b"});
    c.distribution = LatentDistribution::Beta(num("a"), num("b"));
  } else if (kind == "uniform") {
    ExpectObject(j, path, {"weight", "kind", "lo", "hi"});
    c.distribution = LatentDistribution::Uniform(num("lo"), num("hi"));
  } else {
    throw ValidationError(Child(path, "kind"),
                          "expected point, beta or uniform");
  }
  return c;
}

std::vector<std::int64_t> IntArray(const Json& j, const std::string& path) {
  std::vector<std::int64_t> out;
  const Json& a = AsArray(j, path);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.push_back(AsInt(a[i], Element(path, i)));
  }
  return out;
}

}  // namespace

Json ToJson(const BetaParams& params) {
  return Json{{"alpha", params.alpha()}, {"beta", params.beta()}};
}

BetaParams BetaParamsFromJson(const Json& j, const std::string& path) {
  ExpectObject(j, path, {"alpha", "beta"});
  const double a = AsDouble(Field(j, path, "alpha"), Child(path, "alpha"));
  const double b = AsDouble(Field(j, path, "beta"), Child(path, "beta"));
  return Rooted(path, [&] { return BetaParams(a, b); });
}

Json ToJson(const AllocationRequest& request) {
  Json j;
  j["prior"] = ToJson(request.prior);
  j["group_size"] = request.group_size;
  j["shards"] = request.shards;
  Json evidence = Json::array();
  for (const auto& e : request.evidence) {
    evidence.push_back(Json{{"prompt_id", e.prompt_id},
                            {"pre_rollouts", e.pre_rollouts},
                            {"correct", e.correct}});
  }
  j["evidence"] = std::move(evidence);
  if (!request.prior_overrides.empty()) {
    Json overrides = Json::array();
    for (const auto& o : request.prior_overrides) {
      overrides.push_back(o ? Json{{"p_hat", o->p_hat}, {"s", o->s}}
                            : Json(nullptr));
    }
    j["prior_overrides"] = std::move(overrides);
  }
  return j;
}

namespace {

AllocationRequest RequestFields(const Json& j) {
  AllocationRequest r;
  if (j.contains("prior")) r.prior = BetaParamsFromJson(j["prior"], "prior");
  r.group_size = AsInt32(Field(j, "", "group_size"), "group_size");
  if (j.contains("shards")) r.shards = AsInt32(j["shards"], "shards");
  const Json& ev = AsArray(Field(j, "", "evidence"), "evidence");
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const std::string p = Element("evidence", i);
    ExpectObject(ev[i], p, {"prompt_id", "pre_rollouts", "correct"});
    PromptEvidence e;
    e.prompt_id = ev[i].contains("prompt_id")
                      ? AsInt(ev[i]["prompt_id"], Child(p, "prompt_id"))
                      : static_cast<std::int64_t>(i);
    e.pre_rollouts =
        AsInt32(Field(ev[i], p, "pre_rollouts"), Child(p, "pre_rollouts"));
    e.correct = AsInt32(Field(ev[i], p, "correct"), Child(p, "correct"));
    r.evidence.push_back(e);
  }
  if (j.contains("prior_overrides")) {
    const Json& ov = AsArray(j["prior_overrides"], "prior_overrides");
    for (std::size_t i = 0; i < ov.size(); ++i) {
      const std::string p = Element("prior_overrides", i);
      if (ov[i].is_null()) {
        r.prior_overrides.emplace_back();
        continue;
      }
      ExpectObject(ov[i], p, {"p_hat", "s"});
      r.prior_overrides.push_back(PriorEstimate{
          AsDouble(Field(ov[i], p, "p_hat"), Child(p, "p_hat")),
          AsDouble(Field(ov[i], p, "s"), Child(p, "s"))});
    }
  }
  r.Validate();
  return r;
}

}  // namespace

AllocationRequest AllocationRequestFromJson(const Json& j) {
  ExpectObject(j, "",
               {"prior", "group_size", "shards", "evidence", "prior_overrides"});
  return RequestFields(j);
}

Json ToJson(const AllocateDocument& doc) {
  Json j = ToJson(doc.request);
  j["policy"] = PolicyName(doc.policy);
  return j;
}

AllocateDocument AllocateDocumentFromJson(const Json& j) {
  ExpectObject(j, "", {"prior", "group_size", "shards", "evidence",
                       "prior_overrides", "policy"});
  AllocateDocument doc;
  doc.request = RequestFields(j);
  if (j.contains("policy")) doc.policy = PolicyFromJson(j["policy"], "policy");
  return doc;
}

Json ToJson(const AllocationResult& result) {
  return Json{{"deltas", result.deltas},
              {"objective", result.objective},
              {"policy", PolicyName(result.policy)},
              {"per_shard_budgets", result.per_shard_budgets}};
}

AllocationResult AllocationResultFromJson(const Json& j) {
  ExpectObject(j, "", {"deltas", "objective", "policy", "per_shard_budgets"});
  AllocationResult r;
  r.deltas = IntArray(Field(j, "", "deltas"), "deltas");
  r.objective = AsDouble(Field(j, "", "objective"), "objective");
  r.policy = PolicyFromJson(Field(j, "", "policy"), "policy");
  r.per_shard_budgets =
      IntArray(Field(j, "", "per_shard_budgets"), "per_shard_budgets");
  return r;
}

Json ToJson(const SimConfig& config) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json components = Json::array();
  for (const auto& c : config.population.components) {
    components.push_back(ToJson(c.distribution, c.weight));
  }
  j["population"] = Json{{"size", config.population.size},
                         {"components", std::move(components)}};
  j["group_size"] = config.group_size;
  j["pre_rollouts"] = config.pre_rollouts;
  j["prior"] = ToJson(config.prior);
  Json policies = Json::array();
  for (Policy p : config.policies) policies.push_back(PolicyName(p));
  j["policies"] = std::move(policies);
  j["replications"] = config.replications;
  j["seed"] = config.seed;
  j["shards"] = config.shards;
  j["steps"] = config.steps;
  j["drift_per_step"] = config.drift_per_step;
  Json buckets = Json::array();
  for (const auto& b : config.buckets) {
    buckets.push_back(Json{{"lo", b.lo}, {"hi", b.hi}});
  }
  j["buckets"] = std::move(buckets);
  return j;
}

SimConfig SimConfigFromJson(const Json& j) {
  ExpectObject(j, "",
               {"schema_version", "population", "group_size", "pre_rollouts",
                "prior", "policies", "replications", "seed", "shards", "steps",
                "drift_per_step", "buckets"});
  const std::int64_t version =
      AsInt(Field(j, "", "schema_version"), "schema_version");
  if (version != kSchemaVersion) {
    throw ValidationError("schema_version",
                          "unsupported version " + std::to_string(version));
  }
  SimConfig c;
  const Json& pop = Field(j, "", "population");
  ExpectObject(pop, "population", {"size", "components"});
  c.population.size =
      AsInt32(Field(pop, "population", "size"), "population.size");
  const Json& comps = AsArray(Field(pop, "population", "components"),
                              "population.components");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    c.population.components.push_back(
        ComponentFromJson(comps[i], Element("population.components", i)));
  }
  if (j.contains("group_size")) {
    c.group_size = AsInt32(j["group_size"], "group_size");
  }
  if (j.contains("pre_rollouts")) {
    c.pre_rollouts = AsInt32(j["pre_rollouts"], "pre_rollouts");
  }
  if (j.contains("prior")) c.prior = BetaParamsFromJson(j["prior"], "prior");
  if (j.contains("policies")) {
    c.policies.clear();
    const Json& ps = AsArray(j["policies"], "policies");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      c.policies.push_back(PolicyFromJson(ps[i], Element("policies", i)));
    }
  }
  if (j.contains("replications")) {
    c.replications = AsInt32(j["replications"], "replications");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() ||
        (!j["seed"].is_number_unsigned() && j["seed"].get<std::int64_t>() < 0)) {
      throw ValidationError("seed", "expected a nonnegative integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("shards")) c.shards = AsInt32(j["shards"], "shards");
  if (j.contains("steps")) c.steps = AsInt32(j["steps"], "steps");
  if (j.contains("drift_per_step")) {
    c.drift_per_step = AsDouble(j["drift_per_step"], "drift_per_step");
  }
  if (j.contains("buckets")) {
    const Json& bs = AsArray(j["buckets"], "buckets");
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const std::string p = Element("buckets", i);
      ExpectObject(bs[i], p, {"lo", "hi"});
      c.buckets.push_back({AsInt32(Field(bs[i], p, "lo"), Child(p, "lo")),
                           AsInt32(Field(bs[i], p, "hi"), Child(p, "hi"))});
    }
  }
  c.Validate();
  return c;
}

Json ToJson(const BucketShares& shares) {
  Json labels = Json::array();
  for (const auto& b : shares.buckets) labels.push_back(b.Label());
  return Json{{"buckets", std::move(labels)},
              {"input_fraction", shares.input_fraction},
              {"budget_share", shares.budget_share}};
}

Json ToJson(const ComparisonReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = ToJson(report.config);
  j["observations"] = report.observations;
  j["baseline"] = PolicyName(report.baseline);
  Json policies = Json::array();
  for (const auto& p : report.policies) {
    policies.push_back(Json{
        {"policy", PolicyName(p.policy)},
        {"rollouts_per_step", p.rollouts_per_step},
        {"realized_hits", ToJson(p.realized_hits)},
        {"expected_coverage", ToJson(p.expected_coverage)},
        {"phase_b_expected_hits", ToJson(p.phase_b_expected_hits)},
        {"bucket_shares", ToJson(p.bucket_shares)}});
  }
  j["policies"] = std::move(policies);
  Json paired = Json::array();
  for (const auto& d : report.paired) {
    paired.push_back(Json{
        {"policy", PolicyName(d.policy)},
        {"baseline", PolicyName(d.baseline)},
        {"realized_hits", ToJson(d.realized_hits)},
        {"expected_coverage", ToJson(d.expected_coverage)},
        {"phase_b_expected_hits", ToJson(d.phase_b_expected_hits)}});
  }
  j["paired_differences"] = std::move(paired);
  return j;
}

Json ToJson(const OracleInstance& instance) {
  Json posteriors = Json::array();
  for (const auto& p : instance.posteriors) posteriors.push_back(ToJson(p));
  return Json{{"posteriors", std::move(posteriors)},
              {"budget", instance.budget}};
}

OracleInstance OracleInstanceFromJson(const Json& j) {
  ExpectObject(j, "", {"posteriors", "budget"});
  OracleInstance instance;
  const Json& ps = AsArray(Field(j, "", "posteriors"), "posteriors");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    instance.posteriors.push_back(
        BetaParamsFromJson(ps[i], Element("posteriors", i)));
  }
  if (instance.posteriors.empty()) {
    throw ValidationError("posteriors", "must be nonempty");
  }
  instance.budget = AsInt(Field(j, "", "budget"), "budget");
  if (instance.budget < 0) throw ValidationError("budget", "must be >= 0");
  return instance;
}

Json ErrorDocument(const std::string& kind, const std::string& field,
                   const std::string& message) {
  return Json{{"error",
               Json{{"kind", kind}, {"field", field}, {"message", message}}}};
}

Json ParseJsonText(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("$", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace hora
