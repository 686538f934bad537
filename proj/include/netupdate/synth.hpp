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
//
// Update-order synthesis. Three engines share the problem statement: find a
// sequence of per-switch updates from an initial to a final configuration
// such that an LTL invariant over single-packet paths holds throughout.
//
//  - order_update: depth-first search over simple, careful sequences with a
//    wait barrier after every update; per-configuration model checking with
//    counterexample-cube pruning.
//  - config_pairs: the same search, but every candidate step is verified by
//    enumerating hybrid traces in which the switch may flip mid-flight; the
//    emitted plan carries no waits.
//  - refine: counterexample-guided refinement over update orders with at
//    most one switch flipping per tracked packet; violating orders are
//    excluded by prefix until the search stabilizes.

#ifndef NETUPDATE_SYNTH_HPP_
#define NETUPDATE_SYNTH_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "netupdate/checker.hpp"
#include "netupdate/ltl.hpp"
#include "netupdate/model.hpp"

namespace netupdate {

// One bit per differing switch, positional over the sorted diff list;
// true = already updated to its final policy.
struct UpdateStatus {
  std::vector<bool> updated;

  bool all() const;
  std::uint64_t count() const;
};

// Counterexample-derived pruning constraint: required update status for the
// differing switches a violating trace traversed. Any configuration agreeing
// with every entry reproduces the violation and can be skipped unchecked.
struct CexCube {
  std::vector<std::pair<SwitchId, bool>> constraints;  // sorted by switch
};

enum class SynthOutcome { kPlan, kInfeasible, kPreconditionFailure };

struct SynthResult {
  SynthOutcome outcome;
  CommandSequence plan;               // only for kPlan
  std::vector<SwitchId> update_order; // only for kPlan
  std::string reason;                 // only for failures
};

struct SynthStats {
  std::uint64_t model_check_calls = 0;
  std::uint64_t loop_check_calls = 0;
  std::uint64_t configs_visited = 0;
  std::uint64_t configs_pruned_by_cex = 0;
  double wall_time_ms = 0.0;
};

struct SynthOptions {
  bool cex_learning = true;
  std::uint64_t max_visited = 0;  // 0 = unbounded
  // Test hook, called whenever a cube is learned (before it prunes anything).
  std::function<void(const CexCube&, const UpdateStatus&)> on_learn;
};

// One successor per not-yet-updated differing switch, in sorted ID order.
std::vector<std::pair<NetworkPolicy, SwitchId>> next_policies(
    const Topology& topo, const PacketSpace& space,
    const NetworkPolicy& current, const UpdateStatus& status,
    const NetworkPolicy& final_policy, const std::vector<SwitchId>& diff);

// Projects the counterexample onto the differing switches it traversed. A
// counterexample touching no differing switch degenerates to a full snapshot
// of the current status (anything weaker would over-prune).
CexCube analyze_cex(const Counterexample& cex, const UpdateStatus& status,
                    const std::vector<SwitchId>& diff);

bool matches_wrong(const UpdateStatus& status,
                   const std::vector<CexCube>& cubes,
                   const std::vector<SwitchId>& diff);

std::pair<SynthResult, SynthStats> order_update(
    const Topology& topo, const NetworkPolicy& initial,
    const NetworkPolicy& final_policy, const LtlFormula& f,
    const PacketSpace& space, const SynthOptions& opts = {});

std::pair<SynthResult, SynthStats> config_pairs(
    const Topology& topo, const NetworkPolicy& initial,
    const NetworkPolicy& final_policy, const LtlFormula& f,
    const PacketSpace& space, const SynthOptions& opts = {});

std::pair<SynthResult, SynthStats> refine(
    const Topology& topo, const NetworkPolicy& initial,
    const NetworkPolicy& final_policy, const LtlFormula& f,
    const PacketSpace& space, const SynthOptions& opts = {});

// Hybrid-trace verification of one update step: for every (ingress, packet)
// and every flip point k, the trace that follows `before` for its first k
// moves and `after` from then on must stay within the port bound and satisfy
// `f`. Shared by config_pairs, refine, and their cross-checking tests.
Verdict check_update_step(const Topology& topo, const PacketSpace& space,
                          const NetworkPolicy& before,
                          const NetworkPolicy& after, const LtlFormula& f);

}  // namespace netupdate

#endif  // NETUPDATE_SYNTH_HPP_
