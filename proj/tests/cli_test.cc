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

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hora/commands.h"
#include "hora/json_io.h"

namespace hora::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome Invoke(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  Outcome o;
  o.code = Run(args, in, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

// Fresh, empty scratch directory per call.
fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hora_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void Spit(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

const char* kSmallConfig = R"(schema_version: 1
population:
  size: 20
  components:
    - {weight: 0.3, kind: beta, a: 0.5, b: 10}
    - {weight: 0.7, kind: uniform, lo: 0.2, hi: 1.0}
group_size: 16
pre_rollouts: 4
policies: [hora, uniform, hard_first, plugin]
replications: 12
seed: 5
steps: 2
)";

TEST_CASE("allocate") {
  SUBCASE("hora example") {
    const Outcome o = Invoke({"allocate"}, R"({"prior": {"alpha": 1, "beta": 1},
      "group_size": 9, "shards": 1, "policy": "hora",
      "evidence": [{"prompt_id": 0, "pre_rollouts": 8, "correct": 0},
                   {"prompt_id": 1, "pre_rollouts": 8, "correct": 8}]})");
    REQUIRE(o.code == kExitOk);
    const Json j = ParseJsonText(o.out);
    CHECK(j["deltas"] == Json::array({1, 1}));
    CHECK(j["policy"] == "hora");
    CHECK(j["objective"].get<double>() == doctest::Approx(1.0));
    CHECK(j["per_shard_budgets"] == Json::array({2}));
    CHECK(o.err.empty());
  }
  SUBCASE("uniform through the policy flag and files") {
    const fs::path dir = Scratch("allocate");
    Spit(dir / "req.json", R"({"group_size": 32,
      "evidence": [{"pre_rollouts": 8, "correct": 1}, {"pre_rollouts": 8, "correct": 5},
                   {"pre_rollouts": 8, "correct": 8}]})");
    const Outcome o = Invoke({"allocate", "-i", (dir / "req.json").string(), "-o",
                              (dir / "res.json").string(), "--policy", "uniform"});
    REQUIRE(o.code == kExitOk);
    const Json j = ParseJsonText(Slurp(dir / "res.json"));
    CHECK(j["deltas"] == Json::array({24, 24, 24}));
    CHECK(j["policy"] == "uniform");
  }
  SUBCASE("validation failure names the field") {
    const Outcome o = Invoke({"allocate"}, R"({"group_size": 9,
      "evidence": [{"pre_rollouts": 8, "correct": 9}]})");
    CHECK(o.code == kExitValidation);
    const Json e = ParseJsonText(o.err);
    CHECK(e["error"]["kind"] == "validation");
    CHECK(e["error"]["field"] == "evidence[0].correct");
    CHECK(o.out.empty());
  }
  SUBCASE("malformed json and bad flags") {
    CHECK(Invoke({"allocate"}, "{").code == kExitValidation);
    CHECK(Invoke({"allocate", "--policy", "best"},
                 R"({"group_size": 9, "evidence": [{"pre_rollouts": 8, "correct": 1}]})")
              .code == kExitValidation);
  }
  SUBCASE("missing input file") {
    const Outcome o = Invoke({"allocate", "-i", "/nonexistent/req.json"});
    CHECK(o.code == kExitIo);
    CHECK(ParseJsonText(o.err)["error"]["kind"] == "io");
  }
}

TEST_CASE("simulate writes the full output set") {
  const fs::path dir = Scratch("simulate");
  Spit(dir / "small.yaml", kSmallConfig);
  const fs::path out = dir / "nested" / "out";
  const Outcome o = Invoke({"simulate", (dir / "small.yaml").string(), "-o", out.string()});
  REQUIRE(o.code == kExitOk);
  for (const char* name : {"report.json", "trace.csv", "manifest.json",
                           "bucket_shares_hora.csv", "bucket_shares_uniform.csv",
                           "bucket_shares_hard_first.csv", "bucket_shares_plugin.csv"}) {
    CAPTURE(name);
    CHECK(fs::exists(out / name));
  }
  for (const auto& entry : fs::directory_iterator(out)) {
    CHECK(entry.path().extension() != ".tmp");
  }
  const Json report = ParseJsonText(Slurp(out / "report.json"));
  CHECK(report["schema_version"] == 1);
  CHECK(report["observations"] == 24);
  CHECK(report["policies"].size() == 4);
  CHECK(report["policies"][0]["rollouts_per_step"] == 320);

  const Json manifest = ParseJsonText(Slurp(out / "manifest.json"));
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["root_seed"] == 5);
  CHECK(manifest["engine_version"].is_string());
  CHECK(manifest["config"] == report["config"]);
  CHECK(manifest["outputs"].size() == 6);
  CHECK(manifest["wall_clock_seconds"].get<double>() >= 0.0);

  std::istringstream trace(Slurp(out / "trace.csv"));
  std::string line;
  std::getline(trace, line);
  CHECK(line == "replication,step,policy,prompt_id,p,c,delta,hits");
  int rows = 0;
  while (std::getline(trace, line)) ++rows;
  CHECK(rows == 12 * 2 * 4 * 20);

  const std::string shares = Slurp(out / "bucket_shares_hora.csv");
  CHECK(shares.rfind("bucket,input_fraction,budget_share\n0,", 0) == 0);
}

TEST_CASE("simulate seed override and determinism") {
  const fs::path dir = Scratch("determinism");
  Spit(dir / "small.yaml", kSmallConfig);
  const std::string cfg = (dir / "small.yaml").string();
  auto run = [&](const std::string& name, std::vector<std::string> extra) {
    std::vector<std::string> args{"simulate", cfg, "-o", (dir / name).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    REQUIRE(Invoke(args).code == kExitOk);
    return dir / name;
  };
  const fs::path a = run("a", {});
  const fs::path b = run("b", {"--threads", "4"});
  const fs::path c = run("c", {"--seed", "6"});
  const fs::path d = run("d", {"--seed", "6", "--threads", "3"});
  for (const char* name : {"report.json", "trace.csv", "bucket_shares_hora.csv",
                           "bucket_shares_plugin.csv"}) {
    CAPTURE(name);
    CHECK(Slurp(a / name) == Slurp(b / name));
    CHECK(Slurp(c / name) == Slurp(d / name));
  }
  CHECK(Slurp(a / "trace.csv") != Slurp(c / "trace.csv"));
  CHECK(ParseJsonText(Slurp(c / "manifest.json"))["root_seed"] == 6);
  CHECK(ParseJsonText(Slurp(c / "report.json"))["config"]["seed"] == 6);
}

TEST_CASE("simulate honours the output directory variable") {
  const fs::path dir = Scratch("env");
  Spit(dir / "small.yaml", kSmallConfig);
  const fs::path target = dir / "from_env";
  ::setenv(kOutputDirEnv, target.string().c_str(), 1);
  const Outcome o = Invoke({"simulate", (dir / "small.yaml").string()});
  ::unsetenv(kOutputDirEnv);
  REQUIRE(o.code == kExitOk);
  CHECK(fs::exists(target / "report.json"));
}

TEST_CASE("simulate failures") {
  const fs::path dir = Scratch("simulate_errors");
  Spit(dir / "bad.yaml", "schema_version: 1\npopulation: {size: 0, components: []}\n");
  Outcome o = Invoke({"simulate", (dir / "bad.yaml").string(), "-o", (dir / "x").string()});
  CHECK(o.code == kExitValidation);
  CHECK(ParseJsonText(o.err)["error"]["field"] == "population.size");

  o = Invoke({"simulate", (dir / "missing.yaml").string(), "-o", (dir / "x").string()});
  CHECK(o.code == kExitIo);

  Spit(dir / "small.yaml", kSmallConfig);
  Spit(dir / "blocker", "");
  o = Invoke({"simulate", (dir / "small.yaml").string(), "-o", (dir / "blocker" / "sub").string()});
  CHECK(o.code == kExitIo);

  CHECK(Invoke({"simulate"}).code == kExitValidation);
  CHECK(Invoke({"simulate", "--preset", "nope", "-o", (dir / "x").string()}).code ==
        kExitValidation);
  o = Invoke({"simulate", "--list-presets"});
  CHECK(o.code == kExitOk);
  CHECK(o.out == "heterogeneous-default\nbimodal\nhomogeneous\n");
}

TEST_CASE("heterogeneous preset runs quickly") {
  const fs::path dir = Scratch("preset");
  const auto start = std::chrono::steady_clock::now();
  const Outcome o = Invoke({"simulate", "--preset", "heterogeneous-default", "-o", dir.string()});
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(o.code == kExitOk);
  CHECK(seconds < 60.0);
  const Json report = ParseJsonText(Slurp(dir / "report.json"));
  CHECK(report["policies"].size() == 4);
}

TEST_CASE("oracle-check") {
  Outcome o = Invoke({"oracle-check"});
  REQUIRE(o.code == kExitOk);
  const Json summary = ParseJsonText(o.out);
  CHECK(summary["checked"] == 1000);
  CHECK(summary["mismatches"] == 0);

  o = Invoke({"oracle-check", "--instances", "0"});
  CHECK(o.code == kExitOk);
  CHECK(ParseJsonText(o.out)["checked"] == 0);

  const fs::path dir = Scratch("oracle");
  const std::string saved = (dir / "failure.json").string();
  o = Invoke({"oracle-check", "--inject-fault", "--failure-out", saved});
  CHECK(o.code == kExitOracleMismatch);
  const Json mismatch = ParseJsonText(o.err);
  CHECK(mismatch["mismatch"]["passed"] == false);
  REQUIRE(fs::exists(saved));

  // The saved instance replays: clean with the true marginals, failing
  // again under the fault.
  CHECK(Invoke({"oracle-check", "--replay", saved}).code == kExitOk);
  CHECK(Invoke({"oracle-check", "--replay", saved, "--inject-fault"}).code ==
        kExitOracleMismatch);

  CHECK(Invoke({"oracle-check", "--max-prompts", "12", "--max-budget", "20"}).code ==
        kExitValidation);
  CHECK(Invoke({"oracle-check", "--instances", "-1"}).code == kExitValidation);
  CHECK(Invoke({"oracle-check", "--replay", (dir / "none.json").string()}).code == kExitIo);
}

TEST_CASE("passk") {
  Outcome o = Invoke({"passk", "--pool", "-", "-k", "2"}, "# N=4\nprompt_id,correct_count\n0,2\n");
  REQUIRE(o.code == kExitOk);
  CHECK(o.out == "k,estimate\n2,0.8333333333333334\n");

  std::string pool = "# N=1024\nprompt_id,correct_count\n";
  for (int i = 0; i < 30; ++i) pool += std::to_string(i) + "," + std::to_string(i * i) + "\n";
  o = Invoke({"passk", "--pool", "-", "-k", "8,16,32,64,128,256,512,1024"}, pool);
  REQUIRE(o.code == kExitOk);
  std::istringstream rows(o.out);
  std::string line;
  int count = 0;
  while (std::getline(rows, line)) ++count;
  CHECK(count == 9);

  const fs::path dir = Scratch("passk");
  Spit(dir / "pool.csv", "# N=4\nprompt_id,correct_count\n0,2\n1,0\n");
  o = Invoke({"passk", "--pool", (dir / "pool.csv").string(), "-k", "1,4", "-o",
              (dir / "out.csv").string()});
  REQUIRE(o.code == kExitOk);
  CHECK(Slurp(dir / "out.csv") == "k,estimate\n1,0.25\n4,0.5\n");

  CHECK(Invoke({"passk", "--pool", "-", "-k", "5"}, "# N=4\nprompt_id,correct_count\n0,2\n")
            .code == kExitValidation);
  o = Invoke({"passk", "--pool", "-", "-k", "2"}, "# N=4\nprompt_id,correct_count\n0,5\n");
  CHECK(o.code == kExitValidation);
  CHECK(Invoke({"passk", "--pool", "-", "-k", "2"}, "prompt_id,correct_count\n0,1\n").code ==
        kExitValidation);
  CHECK(Invoke({"passk", "--pool", (dir / "none.csv").string(), "-k", "2"}).code == kExitIo);
  CHECK(Invoke({"passk", "--pool", "-"}).code == kExitValidation);
}

TEST_CASE("top-level parsing") {
  CHECK(Invoke({}).code == kExitValidation);
  CHECK(Invoke({"frobnicate"}).code == kExitValidation);
  const Outcome v = Invoke({"--version"});
  CHECK(v.code == kExitOk);
  CHECK_FALSE(v.out.empty());
  CHECK(Invoke({"simulate", "--help"}).code == kExitOk);
}

}  // namespace
}  // namespace hora::cli
