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

#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace netupdate;
using namespace netupdate::testing;

namespace {

UpdateStatus status_of(const std::vector<SwitchId>& diff,
                       const std::set<SwitchId>& updated) {
  UpdateStatus st;
  for (const SwitchId& sw : diff) st.updated.push_back(updated.count(sw) != 0);
  return st;
}

NetworkPolicy policy_for_status(const Topology& topo, const PacketSpace& space,
                                const NetworkPolicy& initial,
                                const NetworkPolicy& final_policy,
                                const std::vector<SwitchId>& diff,
                                const UpdateStatus& st) {
  NetworkPolicy current = initial;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (st.updated[i]) {
      current = apply_update(topo, space, current,
                             UpdateCmd{diff[i], final_policy.at(diff[i])});
    }
  }
  return current;
}

}  // namespace

TEST_CASE("next_policies enumerates unupdated diff switches in order") {
  NetworkFile fw = reduce_network(load_firewall());
  const NetworkPolicy& initial = fw.policies.at("initial");
  const NetworkPolicy& final_policy = fw.policies.at("final");
  std::vector<SwitchId> diff = diff_switches(initial, final_policy);
  REQUIRE(diff == std::vector<SwitchId>{"F2#other", "I#auth", "I#guest"});

  auto all = next_policies(fw.topo, fw.space, initial, status_of(diff, {}),
                           final_policy, diff);
  REQUIRE(all.size() == 3);
  CHECK(all[0].second == "F2#other");
  CHECK(all[1].second == "I#auth");
  CHECK(all[2].second == "I#guest");
  CHECK(all[1].first.at("I#auth") == final_policy.at("I#auth"));

  auto two = next_policies(fw.topo, fw.space, all[1].first,
                           status_of(diff, {"I#auth"}), final_policy, diff);
  REQUIRE(two.size() == 2);
  CHECK(two[0].second == "F2#other");
  CHECK(two[1].second == "I#guest");

  CHECK(next_policies(fw.topo, fw.space, final_policy,
                      status_of(diff, {"F2#other", "I#auth", "I#guest"}),
                      final_policy, diff)
            .empty());
}

TEST_CASE("analyze_cex projects onto traversed diff switches") {
  std::vector<SwitchId> diff = {"A", "B", "C"};
  Counterexample cex;
  cex.kind = CexKind::kPropertyViolation;
  cex.traversed_switches = {"A", "B", "X"};
  UpdateStatus st = status_of(diff, {"A"});

  CexCube cube = analyze_cex(cex, st, diff);
  REQUIRE(cube.constraints.size() == 2);
  CHECK(cube.constraints[0] == std::pair<SwitchId, bool>{"A", true});
  CHECK(cube.constraints[1] == std::pair<SwitchId, bool>{"B", false});

  // Degenerate fallback: nothing traversed intersects the diff set.
  cex.traversed_switches = {"X", "Y"};
  CexCube snapshot = analyze_cex(cex, st, diff);
  REQUIRE(snapshot.constraints.size() == 3);
  CHECK(snapshot.constraints[0] == std::pair<SwitchId, bool>{"A", true});
  CHECK(snapshot.constraints[1] == std::pair<SwitchId, bool>{"B", false});
  CHECK(snapshot.constraints[2] == std::pair<SwitchId, bool>{"C", false});
}

TEST_CASE("matches_wrong") {
  std::vector<SwitchId> diff = {"A", "B"};
  UpdateStatus st = status_of(diff, {"A"});
  CHECK_FALSE(matches_wrong(st, {}, diff));

  CexCube a_true{{{"A", true}}};
  CHECK(matches_wrong(st, {a_true}, diff));

  CexCube mismatch{{{"A", true}, {"B", true}}};
  CHECK_FALSE(matches_wrong(st, {mismatch}, diff));
  CHECK(matches_wrong(status_of(diff, {"A", "B"}), {mismatch, a_true}, diff));
}

TEST_CASE("order_update solves the firewall with the paper's order") {
  NetworkFile fw = reduce_network(load_firewall());
  LtlPtr spec = firewall_spec();
  auto [result, stats] = order_update(fw.topo, fw.policies.at("initial"),
                                      fw.policies.at("final"), *spec, fw.space);
  REQUIRE(result.outcome == SynthOutcome::kPlan);
  CHECK(result.update_order ==
        std::vector<SwitchId>{"I#auth", "F2#other", "I#guest"});
  REQUIRE(result.plan.size() == 5);
  CHECK(result.plan[1].is_wait());
  CHECK(result.plan[3].is_wait());
  CHECK_FALSE(result.plan[4].is_wait());  // no trailing wait
  CHECK(validate_plan(fw.topo, fw.policies.at("initial"), result.plan, *spec,
                      fw.space, &fw.policies.at("final"))
            .ok);
  CHECK(stats.configs_visited <= 8);
}

TEST_CASE("order_update ring: infeasible at switch granularity, solvable reduced") {
  NetworkFile ring = load_ring();
  LtlPtr spec = ring_spec();
  auto [coarse, coarse_stats] = order_update(
      ring.topo, ring.policies.at("initial"), ring.policies.at("final"), *spec,
      ring.space);
  CHECK(coarse.outcome == SynthOutcome::kInfeasible);

  NetworkFile reduced = reduce_network(ring);
  auto [fine, fine_stats] = order_update(reduced.topo, reduced.policies.at("initial"),
                                         reduced.policies.at("final"), *spec,
                                         reduced.space);
  REQUIRE(fine.outcome == SynthOutcome::kPlan);
  CHECK(validate_plan(reduced.topo, reduced.policies.at("initial"), fine.plan,
                      *spec, reduced.space, &reduced.policies.at("final"))
            .ok);
}

TEST_CASE("order_update with equal endpoints returns the empty plan") {
  NetworkFile fw = load_firewall();
  auto [result, stats] = order_update(fw.topo, fw.policies.at("initial"),
                                      fw.policies.at("initial"),
                                      *firewall_spec(), fw.space);
  REQUIRE(result.outcome == SynthOutcome::kPlan);
  CHECK(result.plan.empty());
  CHECK(stats.model_check_calls == 1);  // the shared endpoint still gets checked

  // Equal endpoints that violate the invariant yield no plan at all.
  auto [bad, bad_stats] = order_update(fw.topo, fw.policies.at("initial"),
                                       fw.policies.at("initial"),
                                       *parse_ltl("G port = I_0"), fw.space);
  CHECK(bad.outcome == SynthOutcome::kInfeasible);
}

TEST_CASE("order_update reports loopy endpoints as a precondition failure") {
  NetworkFile fw = load_firewall();
  NetworkPolicy loopy = fw.policies.at("initial");
  // I forwards to F2 and F2 forwards back into I_0? I_0 is ingress; instead
  // make F2 forward to F2_0 itself through I... simplest: a self-cycle via
  // the existing ports is not expressible here, so use the ring reversed
  // mid-way as the loopy endpoint instead.
  NetworkFile ring = load_ring();
  NetworkPolicy mixed = apply_update(ring.topo, ring.space, ring.policies.at("initial"),
                                     UpdateCmd{"A", ring.policies.at("final").at("A")});
  auto [result, stats] = order_update(ring.topo, mixed, ring.policies.at("final"),
                                      *ring_spec(), ring.space);
  CHECK(result.outcome == SynthOutcome::kPreconditionFailure);
  CHECK(result.reason.find("Loops in initial or final configuration.") == 0);
}

TEST_CASE("order_update respects the visited budget") {
  NetworkFile ring = reduce_network(load_ring());
  SynthOptions opts;
  opts.max_visited = 2;
  auto [result, stats] = order_update(ring.topo, ring.policies.at("initial"),
                                      ring.policies.at("final"), *ring_spec(),
                                      ring.space, opts);
  CHECK(result.outcome == SynthOutcome::kPreconditionFailure);
  CHECK(result.reason.find("budget") != std::string::npos);
}

TEST_CASE("learned cubes only exclude genuinely violating configurations") {
  // For every cube learned on small instances, every configuration matching
  // the cube must itself fail the loop check or the model check.
  int instances = 0, cubes_checked = 0;
  for (std::uint64_t seed = 0; instances < 40; ++seed) {
    REQUIRE(seed < 2000);
    RandomInstance inst = make_random_instance(seed);
    std::vector<SwitchId> diff = diff_switches(inst.initial, inst.final_policy);
    if (diff.empty() || diff.size() > 4) continue;
    ++instances;

    std::vector<CexCube> learned;
    SynthOptions opts;
    opts.on_learn = [&](const CexCube& cube, const UpdateStatus&) {
      learned.push_back(cube);
    };
    order_update(inst.topo, inst.initial, inst.final_policy, *inst.spec,
                 inst.space, opts);

    for (const CexCube& cube : learned) {
      std::map<SwitchId, bool> required(cube.constraints.begin(),
                                        cube.constraints.end());
      // Enumerate every status matching the cube.
      for (std::uint64_t bits = 0; bits < (1ULL << diff.size()); ++bits) {
        UpdateStatus st;
        bool matches = true;
        for (std::size_t i = 0; i < diff.size(); ++i) {
          bool bit = (bits >> i) & 1;
          st.updated.push_back(bit);
          auto it = required.find(diff[i]);
          if (it != required.end() && it->second != bit) matches = false;
        }
        if (!matches) continue;
        NetworkPolicy config = policy_for_status(inst.topo, inst.space,
                                                 inst.initial, inst.final_policy,
                                                 diff, st);
        bool violating = !has_loops(inst.topo, config, inst.space).ok ||
                         !model_check(inst.topo, config, *inst.spec, inst.space).ok;
        CHECK(violating);
        ++cubes_checked;
      }
    }
  }
  CHECK(cubes_checked > 0);
}

TEST_CASE("soundness and completeness against the permutation oracle") {
  int plans = 0, infeasible = 0, preconditions = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    RandomInstance inst = make_random_instance(seed);
    auto [result, stats] = order_update(inst.topo, inst.initial,
                                        inst.final_policy, *inst.spec, inst.space);
    OracleResult oracle = permutation_oracle(inst.topo, inst.initial,
                                             inst.final_policy, *inst.spec,
                                             inst.space);
    switch (result.outcome) {
      case SynthOutcome::kPlan: {
        ++plans;
        CHECK(oracle.outcome == OracleOutcome::kPlan);
        // The emitted order must be one of the oracle's valid permutations.
        CHECK(std::find(oracle.valid_orders.begin(), oracle.valid_orders.end(),
                        result.update_order) != oracle.valid_orders.end());
        CHECK(validate_plan(inst.topo, inst.initial, result.plan, *inst.spec,
                            inst.space, &inst.final_policy)
                  .ok);
        break;
      }
      case SynthOutcome::kInfeasible:
        ++infeasible;
        CHECK(oracle.outcome == OracleOutcome::kInfeasible);
        break;
      case SynthOutcome::kPreconditionFailure:
        ++preconditions;
        CHECK(oracle.outcome == OracleOutcome::kPrecondition);
        break;
    }
  }
  // All three outcomes occur across the seeds.
  CHECK(plans > 0);
  CHECK(infeasible > 0);
  CHECK(preconditions > 0);
}

TEST_CASE("pruning changes call counts but never the verdict") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    RandomInstance inst = make_random_instance(seed);
    SynthOptions with;
    SynthOptions without;
    without.cex_learning = false;
    auto [on, on_stats] = order_update(inst.topo, inst.initial, inst.final_policy,
                                       *inst.spec, inst.space, with);
    auto [off, off_stats] = order_update(inst.topo, inst.initial,
                                         inst.final_policy, *inst.spec,
                                         inst.space, without);
    CHECK(on.outcome == off.outcome);
    CHECK(on_stats.model_check_calls <= off_stats.model_check_calls);
    CHECK(off_stats.configs_pruned_by_cex == 0);
    if (on.outcome == SynthOutcome::kPlan) {
      CHECK(on.update_order == off.update_order);
    }
  }
}

TEST_CASE("synthesis is deterministic") {
  NetworkFile ring = reduce_network(load_ring());
  LtlPtr spec = ring_spec();
  auto [r1, s1] = order_update(ring.topo, ring.policies.at("initial"),
                               ring.policies.at("final"), *spec, ring.space);
  auto [r2, s2] = order_update(ring.topo, ring.policies.at("initial"),
                               ring.policies.at("final"), *spec, ring.space);
  CHECK(r1.update_order == r2.update_order);
  CHECK(s1.model_check_calls == s2.model_check_calls);
  CHECK(s1.loop_check_calls == s2.loop_check_calls);
  CHECK(s1.configs_visited == s2.configs_visited);
  CHECK(s1.configs_pruned_by_cex == s2.configs_pruned_by_cex);
}

TEST_CASE("config_pairs on the firewall verifies mid-flight flips") {
  NetworkFile fw = reduce_network(load_firewall());
  LtlPtr spec = firewall_spec();
  auto [result, stats] = config_pairs(fw.topo, fw.policies.at("initial"),
                                      fw.policies.at("final"), *spec, fw.space);
  REQUIRE(result.outcome == SynthOutcome::kPlan);
  // Wait-free plan: updates only.
  for (const Command& cmd : result.plan) CHECK_FALSE(cmd.is_wait());
  // Independent re-verification under the same discipline.
  CHECK(hybrid_plan_valid(fw.topo, fw.policies.at("initial"), result.update_order,
                          fw.policies.at("final"), *spec, fw.space));

  // Equal endpoints come back as an empty plan.
  auto [trivial, trivial_stats] =
      config_pairs(fw.topo, fw.policies.at("initial"), fw.policies.at("initial"),
                   *spec, fw.space);
  REQUIRE(trivial.outcome == SynthOutcome::kPlan);
  CHECK(trivial.plan.empty());
}

TEST_CASE("config_pairs plans, wait-separated, pass validate_plan or carry a witness") {
  int plans = 0, divergences = 0;
  for (std::uint64_t seed = 0; plans < 30; ++seed) {
    REQUIRE(seed < 2000);
    RandomInstance inst = make_random_instance(seed);
    auto [result, stats] = config_pairs(inst.topo, inst.initial, inst.final_policy,
                                        *inst.spec, inst.space);
    if (result.outcome != SynthOutcome::kPlan) continue;
    ++plans;
    CHECK(hybrid_plan_valid(inst.topo, inst.initial, result.update_order,
                            inst.final_policy, *inst.spec, inst.space));
    CommandSequence with_waits;
    for (const SwitchId& sw : result.update_order) {
      if (!with_waits.empty()) with_waits.push_back(Command::wait());
      with_waits.push_back(Command::make_update(sw, inst.final_policy.at(sw)));
    }
    PlanCheck check = validate_plan(inst.topo, inst.initial, with_waits,
                                    *inst.spec, inst.space);
    if (!check.ok) {
      // The transition-checking discipline tolerates configurations whose
      // loops no ingress packet can reach; the careful discipline does not.
      ++divergences;
      CHECK(check.reason.find("loop") != std::string::npos);
    }
  }
  CHECK(plans == 30);
  CHECK(divergences <= plans / 2);
}

TEST_CASE("check_update_step catches flip hazards directly") {
  NetworkFile fw = reduce_network(load_firewall());
  LtlPtr spec = firewall_spec();
  const NetworkPolicy& initial = fw.policies.at("initial");
  const NetworkPolicy& final_policy = fw.policies.at("final");

  // Flipping F2#other first: Auth traffic still rides through F2 and a
  // mid-flight flip drops it.
  NetworkPolicy after = apply_update(fw.topo, fw.space, initial,
                                     UpdateCmd{"F2#other", final_policy.at("F2#other")});
  Verdict bad = check_update_step(fw.topo, fw.space, initial, after, *spec);
  CHECK_FALSE(bad.ok);

  // Flipping I#auth first is harmless under every flip point.
  NetworkPolicy auth_first = apply_update(fw.topo, fw.space, initial,
                                          UpdateCmd{"I#auth", final_policy.at("I#auth")});
  CHECK(check_update_step(fw.topo, fw.space, initial, auth_first, *spec).ok);
}

TEST_CASE("refine solves the firewall and agrees on infeasibility") {
  NetworkFile fw = reduce_network(load_firewall());
  LtlPtr spec = firewall_spec();
  auto [result, stats] = refine(fw.topo, fw.policies.at("initial"),
                                fw.policies.at("final"), *spec, fw.space);
  REQUIRE(result.outcome == SynthOutcome::kPlan);
  // Wait-separated plan accepted by the validator.
  CHECK(validate_plan(fw.topo, fw.policies.at("initial"), result.plan, *spec,
                      fw.space, &fw.policies.at("final"))
            .ok);

  auto [trivial, trivial_stats] = refine(fw.topo, fw.policies.at("initial"),
                                         fw.policies.at("initial"), *spec, fw.space);
  REQUIRE(trivial.outcome == SynthOutcome::kPlan);
  CHECK(trivial.plan.empty());

  NetworkFile ring = load_ring();
  auto [ring_result, ring_stats] = refine(ring.topo, ring.policies.at("initial"),
                                          ring.policies.at("final"), *ring_spec(),
                                          ring.space);
  CHECK(ring_result.outcome == SynthOutcome::kInfeasible);
}

TEST_CASE("refine verdicts track order_update on small instances") {
  int compared = 0, plan_agreements = 0;
  for (std::uint64_t seed = 0; compared < 40; ++seed) {
    REQUIRE(seed < 2000);
    RandomInstance inst = make_random_instance(seed);
    std::vector<SwitchId> diff = diff_switches(inst.initial, inst.final_policy);
    if (diff.size() > 5) continue;
    ++compared;
    auto [ord, ord_stats] = order_update(inst.topo, inst.initial,
                                         inst.final_policy, *inst.spec, inst.space);
    auto [ref, ref_stats] = refine(inst.topo, inst.initial, inst.final_policy,
                                   *inst.spec, inst.space);
    if (ord.outcome == SynthOutcome::kPreconditionFailure) {
      CHECK(ref.outcome == SynthOutcome::kPreconditionFailure);
      continue;
    }
    if (ref.outcome == SynthOutcome::kPlan) {
      CHECK(hybrid_plan_valid(inst.topo, inst.initial, ref.update_order,
                              inst.final_policy, *inst.spec, inst.space));
    }
    if (ord.outcome == ref.outcome) ++plan_agreements;
    // Disagreements are legitimate only when the disagreeing side's plan
    // verifies under its own discipline.
    if (ord.outcome == SynthOutcome::kPlan && ref.outcome != SynthOutcome::kPlan) {
      CHECK(validate_plan(inst.topo, inst.initial, ord.plan, *inst.spec,
                          inst.space)
                .ok);
    }
  }
  CHECK(plan_agreements > compared / 2);
}
