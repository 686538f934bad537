// Copyright 2026 The netupdate authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"
#include "netupdate/bench.hpp"
#include "support.hpp"

using namespace netupdate;
using namespace netupdate::testing;

TEST_CASE("bench instances are deterministic byte for byte") {
  BenchParams params;
  params.total_nodes = 60;
  params.updating_nodes = 5;
  params.seed = 7;
  BenchInstance a = bench_generate(params);
  BenchInstance b = bench_generate(params);
  CHECK(network_to_json(a.net) == network_to_json(b.net));
  CHECK(a.spec_text == b.spec_text);

  params.seed = 8;
  BenchInstance c = bench_generate(params);
  CHECK(network_to_json(a.net) != network_to_json(c.net));
}

TEST_CASE("bench instances are well-formed and hit the diff count") {
  for (std::uint64_t seed : {0ULL, 3ULL, 11ULL}) {
    for (std::uint64_t m : {3ULL, 8ULL}) {
      BenchParams params;
      params.total_nodes = 60;
      params.updating_nodes = m;
      params.seed = seed;
      BenchInstance inst = bench_generate(params);
      CAPTURE(seed);
      CAPTURE(m);
      CHECK(validate_topology(inst.net.topo, inst.net.space).empty());
      CHECK(inst.net.topo.switches.size() == params.total_nodes);
      const NetworkPolicy& initial = inst.net.policies.at("initial");
      const NetworkPolicy& final_policy = inst.net.policies.at("final");
      CHECK(diff_switches(initial, final_policy).size() == m);
      CHECK(has_loops(inst.net.topo, initial, inst.net.space).ok);
      CHECK(has_loops(inst.net.topo, final_policy, inst.net.space).ok);

      // Delivery: every (ingress, dst) trace ends at WORLD in both policies.
      LtlPtr spec = parse_ltl(inst.spec_text);
      CHECK(model_check(inst.net.topo, initial, *spec, inst.net.space).ok);
      CHECK(model_check(inst.net.topo, final_policy, *spec, inst.net.space).ok);
      for (const LassoTrace& t :
           enumerate_traces(inst.net.topo, initial, inst.net.space)) {
        CHECK(t.states.back().port == "WORLD");
      }
    }
  }
}

TEST_CASE("impossible instances drop at gateways and defeat every order") {
  BenchParams params;
  params.total_nodes = 20;
  params.updating_nodes = 3;
  params.impossible = true;
  params.seed = 5;
  BenchInstance inst = bench_generate(params);
  const NetworkPolicy& initial = inst.net.policies.at("initial");
  const NetworkPolicy& final_policy = inst.net.policies.at("final");
  CHECK(diff_switches(initial, final_policy).size() == 3);
  CHECK(has_loops(inst.net.topo, final_policy, inst.net.space).ok);

  LtlPtr spec = parse_ltl(inst.spec_text);
  CHECK(model_check(inst.net.topo, initial, *spec, inst.net.space).ok);
  CHECK_FALSE(model_check(inst.net.topo, final_policy, *spec, inst.net.space).ok);

  auto [result, stats] = order_update(inst.net.topo, initial, final_policy,
                                      *spec, inst.net.space);
  CHECK(result.outcome == SynthOutcome::kInfeasible);

  // Confirmed by brute-force permutation search at this size.
  OracleResult oracle = permutation_oracle(inst.net.topo, initial, final_policy,
                                           *spec, inst.net.space);
  CHECK(oracle.outcome == OracleOutcome::kInfeasible);
}

TEST_CASE("bench rejects unrealizable parameters") {
  BenchParams params;
  params.total_nodes = 10;
  params.updating_nodes = 12;
  CHECK_THROWS_AS(bench_generate(params), ModelError);

  params.total_nodes = 7;
  params.updating_nodes = 2;
  CHECK_THROWS_AS(bench_generate(params), ModelError);  // no room for fringes

  params.total_nodes = 40;
  params.updating_nodes = 2;
  params.impossible = true;  // needs at least ingress_count updating switches
  CHECK_THROWS_AS(bench_generate(params), ModelError);
}

TEST_CASE("a solvable bench instance synthesizes end to end") {
  BenchParams params;
  params.total_nodes = 40;
  params.updating_nodes = 4;
  params.seed = 2;
  BenchInstance inst = bench_generate(params);
  LtlPtr spec = parse_ltl(inst.spec_text);
  auto [result, stats] = order_update(inst.net.topo, inst.net.policies.at("initial"),
                                      inst.net.policies.at("final"), *spec,
                                      inst.net.space);
  REQUIRE(result.outcome == SynthOutcome::kPlan);
  CHECK(validate_plan(inst.net.topo, inst.net.policies.at("initial"), result.plan,
                      *spec, inst.net.space, &inst.net.policies.at("final"))
            .ok);
  CHECK(stats.configs_visited <= (1ULL << 4));
}
