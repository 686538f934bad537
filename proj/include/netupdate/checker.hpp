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
// Per-configuration verification: forwarding-loop detection, exhaustive
// one-packet trace enumeration, LTL model checking with counterexamples,
// command-sequence validation, and an independent transition-system
// simulation used to cross-check the validator on small instances.

#ifndef NETUPDATE_CHECKER_HPP_
#define NETUPDATE_CHECKER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "netupdate/ltl.hpp"
#include "netupdate/model.hpp"

namespace netupdate {

enum class CexKind { kPropertyViolation, kLoop };

// A violating complete one-packet trace, or for loop counterexamples the
// offending packet walk (for a cycle, one full turn). `traversed_switches`
// lists the switches reading the trace's ports, in first-visit order.
struct Counterexample {
  CexKind kind;
  LassoTrace trace;
  std::vector<SwitchId> traversed_switches;
};

struct Verdict {
  bool ok;
  std::optional<Counterexample> cex;

  static Verdict pass() { return Verdict{true, std::nullopt}; }
  static Verdict fail(Counterexample c) { return Verdict{false, std::move(c)}; }
};

std::vector<SwitchId> switches_on_trace(const Topology& topo,
                                        const LassoTrace& trace);

// Loop-freedom of a configuration: no packet, started at any port with any
// header, may revisit a port or be processed by the same switch twice. The
// check walks the deterministic (port, packet) step graph, so a reported
// walk is realizable by a concrete packet. Verdicts are deterministic: start
// states are explored in (port, packet) order.
Verdict has_loops(const Topology& topo, const NetworkPolicy& policy,
                  const PacketSpace& space);

// Same verdict as has_loops when the pre-update policy was loop-free (any
// violation not involving `changed` would predate the update). Witness
// search starts at the changed switch's ports so reported walks name it
// whenever possible.
Verdict has_new_loops(const Topology& topo, const NetworkPolicy& policy,
                      const PacketSpace& space, const SwitchId& changed);

// Calls `fn` with the complete one-packet trace of every (ingress, packet)
// pair, ingress ports in sorted order and packets in field-domain order.
// Stops early when `fn` returns false. Requires a loop-free policy; a trace
// exceeding |ports|+1 states raises ModelError.
void for_each_trace(const Topology& topo, const NetworkPolicy& policy,
                    const PacketSpace& space,
                    const std::function<bool(const LassoTrace&)>& fn);

std::vector<LassoTrace> enumerate_traces(const Topology& topo,
                                         const NetworkPolicy& policy,
                                         const PacketSpace& space);

// ok iff every complete one-packet trace satisfies `f`; otherwise the first
// violating trace in enumeration order.
Verdict model_check(const Topology& topo, const NetworkPolicy& policy,
                    const LtlFormula& f, const PacketSpace& space);

struct PlanCheck {
  bool ok;
  std::string reason;              // empty when ok
  std::size_t failed_index;        // command index, or npos for global checks
  std::optional<Counterexample> cex;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Executable form of the carefulness conditions: the sequence must be simple
// (no switch updated twice), have Wait at every odd position, and every
// induced configuration must be loop-free and satisfy `f`. When `target` is
// given, the final induced policy must equal it. Passing implies the
// sequence is correct for `f` from `initial`.
PlanCheck validate_plan(const Topology& topo, const NetworkPolicy& initial,
                        const CommandSequence& seq, const LtlFormula& f,
                        const PacketSpace& space,
                        const NetworkPolicy* target = nullptr);

struct SimulationResult {
  bool ok;
  bool budget_exhausted;
  std::string reason;
  std::optional<LassoTrace> witness;
  std::uint64_t traces_checked;
};

// Independent oracle that explores the nondeterministic network transition
// system directly: packet moves, update transitions gated by the wait flag,
// wait transitions, and new-packet transitions. Extracts every complete
// one-packet trace contained in some network trace, checks each against
// `f`, and checks wait correctness (a packet present when a wait fires must
// leave under the then-frozen policy). Intended for small instances only;
// `max_traces` bounds the extraction and overruns are reported as budget
// exhaustion, distinct from violations. The sequence must be careful-shaped
// (Wait at every odd position, no switch updated twice).
SimulationResult simulate_semantics(const Topology& topo,
                                    const NetworkPolicy& initial,
                                    const CommandSequence& seq,
                                    const LtlFormula& f,
                                    const PacketSpace& space,
                                    std::uint64_t max_traces);

}  // namespace netupdate

#endif  // NETUPDATE_CHECKER_HPP_
