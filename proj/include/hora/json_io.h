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

#ifndef HORA_JSON_IO_H_
#define HORA_JSON_IO_H_

#include <string>
#include <vector>

#include "hora/allocator.h"
#include "hora/errors.h"
#include "hora/posterior.h"
#include "hora/simulator.h"
#include "json.hpp"

namespace hora {

// Insertion-ordered so serialized documents have a stable field order.
using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Parsers throw ValidationError whose field() is the JSON path of the
// offending value, e.g. "evidence[1].correct".

Json ToJson(const BetaParams& params);
BetaParams BetaParamsFromJson(const Json& j, const std::string& path);

Json ToJson(const AllocationRequest& request);
AllocationRequest AllocationRequestFromJson(const Json& j);

// The `allocate` input document: a request plus a policy name.
struct AllocateDocument {
  AllocationRequest request;
  Policy policy = Policy::kHora;
};
Json ToJson(const AllocateDocument& doc);
AllocateDocument AllocateDocumentFromJson(const Json& j);

Json ToJson(const AllocationResult& result);
AllocationResult AllocationResultFromJson(const Json& j);

Json ToJson(const SimConfig& config);
SimConfig SimConfigFromJson(const Json& j);

Json ToJson(const BucketShares& shares);
Json ToJson(const ComparisonReport& report);

// Oracle-check replay instance.
struct OracleInstance {
  std::vector<BetaParams> posteriors;
  std::int64_t budget = 0;

  friend bool operator==(const OracleInstance&,
                         const OracleInstance&) = default;
};
Json ToJson(const OracleInstance& instance);
OracleInstance OracleInstanceFromJson(const Json& j);

// {"error": {"kind": ..., "field": ..., "message": ...}}
Json ErrorDocument(const std::string& kind, const std::string& field,
                   const std::string& message);

// Parses text, mapping syntax errors to ValidationError("$", ...).
Json ParseJsonText(const std::string& text);

}  // namespace hora

#endif  // HORA_JSON_IO_H_
