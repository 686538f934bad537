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
// Shared fixtures and independent oracles for the test suites. The oracles
// deliberately reimplement their subjects along a different route: the LTL
// oracle evaluates by definition-unfolding instead of dynamic programming,
// the model-check oracle collects all traces up front, the synthesis oracle
// enumerates whole permutations, and the step oracle re-simulates hybrid
// traces directly.

#ifndef NETUPDATE_TESTS_SUPPORT_HPP_
#define NETUPDATE_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netupdate/checker.hpp"
#include "netupdate/json_io.hpp"
#include "netupdate/ltl.hpp"
#include "netupdate/model.hpp"
#include "netupdate/synth.hpp"

namespace netupdate::testing {

// ---------------------------------------------------------------------------
// Deterministic randomness (splitmix64), independent of the library's.

class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }
  bool chance(double p) { return next() % 10000 < p * 10000; }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Naive LTL oracle: direct definitional unfolding with a stationary suffix.

inline bool naive_atom(const LtlFormula& f, const LocatedPacket& lp,
                       const PacketSpace& space) {
  if (f.op == LtlOp::kAtomPort) return lp.port == f.name;
  int field = space.field_index(f.name);
  if (field < 0) throw ResolutionError("unknown field " + f.name);
  int value = space.value_index(field, f.value);
  if (value < 0) throw ResolutionError("unknown value " + f.value);
  return lp.packet.values[field] == value;
}

inline bool naive_eval(const LtlFormula& f, const LassoTrace& t,
                       const PacketSpace& space, std::size_t pos) {
  const std::size_t last = t.states.size() - 1;
  const std::size_t p = std::min(pos, last);
  switch (f.op) {
    case LtlOp::kAtomPort:
    case LtlOp::kAtomField:
      return naive_atom(f, t.states[p], space);
    case LtlOp::kNot:
      return !naive_eval(*f.lhs, t, space, p);
    case LtlOp::kAnd:
      return naive_eval(*f.lhs, t, space, p) && naive_eval(*f.rhs, t, space, p);
    case LtlOp::kOr:
      return naive_eval(*f.lhs, t, space, p) || naive_eval(*f.rhs, t, space, p);
    case LtlOp::kImplies:
      return !naive_eval(*f.lhs, t, space, p) || naive_eval(*f.rhs, t, space, p);
    case LtlOp::kNext:
      return naive_eval(*f.lhs, t, space, std::min(p + 1, last));
    case LtlOp::kFinally:
      for (std::size_t j = p; j <= last; ++j) {
        if (naive_eval(*f.lhs, t, space, j)) return true;
      }
      return false;
    case LtlOp::kGlobally:
      for (std::size_t j = p; j <= last; ++j) {
        if (!naive_eval(*f.lhs, t, space, j)) return false;
      }
      return true;
    case LtlOp::kUntil:
      for (std::size_t j = p; j <= last; ++j) {
        if (naive_eval(*f.rhs, t, space, j)) {
          bool lhs_holds = true;
          for (std::size_t i = p; i < j; ++i) {
            if (!naive_eval(*f.lhs, t, space, i)) {
              lhs_holds = false;
              break;
            }
          }
          if (lhs_holds) return true;
        }
      }
      return false;
  }
  return false;
}

inline bool naive_eval(const LtlFormula& f, const LassoTrace& t,
                       const PacketSpace& space) {
  return naive_eval(f, t, space, 0);
}

// Brute-force model check: materialize every trace, then evaluate with the
// naive oracle.
inline bool brute_model_check(const Topology& topo, const NetworkPolicy& policy,
                              const LtlFormula& f, const PacketSpace& space) {
  std::vector<LassoTrace> traces = enumerate_traces(topo, policy, space);
  for (const LassoTrace& t : traces) {
    if (!naive_eval(f, t, space)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Exhaustive permutation oracle for update-order synthesis.

enum class OracleOutcome { kPlan, kInfeasible, kPrecondition };

struct OracleResult {
  OracleOutcome outcome;
  std::vector<std::vector<SwitchId>> valid_orders;
};

// A permutation is valid when every induced configuration, endpoints
// included, is loop-free and satisfies the invariant.
inline OracleResult permutation_oracle(const Topology& topo,
                                       const NetworkPolicy& initial,
                                       const NetworkPolicy& final_policy,
                                       const LtlFormula& f,
                                       const PacketSpace& space) {
  OracleResult result;
  if (!has_loops(topo, initial, space).ok ||
      !has_loops(topo, final_policy, space).ok) {
    result.outcome = OracleOutcome::kPrecondition;
    return result;
  }
  std::vector<SwitchId> diff = diff_switches(initial, final_policy);
  std::vector<SwitchId> perm = diff;
  std::sort(perm.begin(), perm.end());
  do {
    NetworkPolicy current = initial;
    bool valid = has_loops(topo, current, space).ok &&
                 model_check(topo, current, f, space).ok;
    for (std::size_t i = 0; valid && i < perm.size(); ++i) {
      current = apply_update(topo, space, current,
                             UpdateCmd{perm[i], final_policy.at(perm[i])});
      valid = has_loops(topo, current, space).ok &&
              model_check(topo, current, f, space).ok;
    }
    if (valid) result.valid_orders.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  result.outcome = result.valid_orders.empty() ? OracleOutcome::kInfeasible
                                               : OracleOutcome::kPlan;
  return result;
}

// Independent re-verification of a wait-free plan under the mid-flight
// update discipline: every step's hybrid traces (switch flipping at any
// point of any packet's path) must stay bounded and satisfy the invariant.
inline bool hybrid_plan_valid(const Topology& topo, const NetworkPolicy& initial,
                              const std::vector<SwitchId>& order,
                              const NetworkPolicy& final_policy,
                              const LtlFormula& f, const PacketSpace& space) {
  const std::size_t bound = topo.ports.size() + 1;
  NetworkPolicy before = initial;
  for (const SwitchId& sw : order) {
    NetworkPolicy after = apply_update(topo, space, before,
                                       UpdateCmd{sw, final_policy.at(sw)});
    for (const PortId& ingress : topo.ingress) {
      std::uint64_t universe = space.universe_size();
      for (std::uint64_t ord = 0; ord < universe; ++ord) {
        for (std::size_t flip = 0; flip <= bound; ++flip) {
          LassoTrace trace;
          LocatedPacket lp{ingress, packet_at(space, ord)};
          trace.states.push_back(lp);
          std::size_t moves = 0;
          while (!topo.is_special(lp.port)) {
            lp = policy_lookup(topo, moves < flip ? before : after, lp);
            trace.states.push_back(lp);
            if (++moves > bound) return false;  // hybrid loop
          }
          if (!naive_eval(f, trace, space)) return false;
        }
      }
    }
    before = after;
  }
  // The final configuration must hold on its own as well.
  return brute_model_check(topo, before, f, space);
}

// ---------------------------------------------------------------------------
// Bundled example fixtures.

inline std::string nets_dir() {
#ifdef NETUPDATE_NETS_DIR
  return NETUPDATE_NETS_DIR;
#else
  return "nets";
#endif
}

inline NetworkFile load_firewall() {
  return load_network(nets_dir() + "/firewall.json");
}
inline LtlPtr firewall_spec() {
  return parse_ltl(read_file(nets_dir() + "/firewall.ltl"));
}
inline NetworkFile load_ring() { return load_network(nets_dir() + "/ring.json"); }
inline LtlPtr ring_spec() { return parse_ltl(read_file(nets_dir() + "/ring.ltl")); }

inline Packet make_packet(const PacketSpace& space,
                          const std::vector<std::string>& values) {
  Packet pkt;
  for (std::size_t i = 0; i < values.size(); ++i) {
    int v = space.value_index(static_cast<int>(i), values[i]);
    pkt.values.push_back(v);
  }
  return pkt;
}

// ---------------------------------------------------------------------------
// Random small instances for the property suites.

struct RandomInstance {
  Topology topo;
  PacketSpace space;
  NetworkPolicy initial;
  NetworkPolicy final_policy;
  LtlPtr spec;
};

// Layered topologies with occasional back edges, rule tables with random
// guards and rewrites, and a final policy differing on a bounded number of
// switches. Sized to stay within: at most 6 differing switches, 20 ports,
// 16 packets.
inline RandomInstance make_random_instance(std::uint64_t seed) {
  TestRng rng(seed);
  RandomInstance inst;

  std::vector<PacketField> fields;
  std::size_t nfields = 1 + rng.below(2);
  for (std::size_t i = 0; i < nfields; ++i) {
    std::vector<std::string> values;
    std::size_t nvalues = 2 + rng.below(2);  // 2..3 values
    for (std::size_t v = 0; v < nvalues; ++v) {
      values.push_back("v" + std::to_string(v));
    }
    fields.push_back(PacketField{"h" + std::to_string(i), values});
  }
  inst.space = PacketSpace(fields);

  std::size_t nswitches = 3 + rng.below(4);  // 3..6
  Topology& topo = inst.topo;
  topo.world = "WORLD";
  topo.drop = "DROP";
  topo.ports = {"WORLD", "DROP"};
  std::vector<SwitchId> switches;
  std::vector<std::vector<PortId>> in_ports(nswitches);
  for (std::size_t s = 0; s < nswitches; ++s) {
    SwitchId sw = "s" + std::to_string(s);
    switches.push_back(sw);
    topo.switches.push_back(sw);
    std::size_t nports = 1 + rng.below(2);
    for (std::size_t p = 0; p < nports; ++p) {
      PortId port = "p" + std::to_string(s) + "_" + std::to_string(p);
      topo.ports.push_back(port);
      topo.inport.emplace_back(port, sw);
      in_ports[s].push_back(port);
    }
  }
  // Ingress: the first switch's ports, occasionally one more.
  for (const PortId& p : in_ports[0]) topo.ingress.push_back(p);
  if (nswitches > 2 && rng.chance(0.4)) topo.ingress.push_back(in_ports[1][0]);

  // Every port except the ingress ports needs a writer; wire each one to a
  // switch in an earlier layer so the base structure is feed-forward.
  std::set<PortId> ingress_set(topo.ingress.begin(), topo.ingress.end());
  for (std::size_t s = 0; s < nswitches; ++s) {
    for (const PortId& p : in_ports[s]) {
      if (ingress_set.count(p)) continue;
      std::size_t writer = rng.below(std::max<std::size_t>(s, 1));
      topo.outport.emplace_back(switches[writer], p);
    }
  }
  // A few extra writer relations, including back edges, so that loops are
  // expressible.
  for (std::size_t s = 0; s + 1 < nswitches; ++s) {
    if (!rng.chance(0.5)) continue;
    std::size_t target = rng.below(nswitches);
    const std::vector<PortId>& tports = in_ports[target];
    const PortId& p = tports[rng.below(tports.size())];
    if (ingress_set.count(p)) continue;
    topo.outport.emplace_back(switches[s], p);
  }
  std::sort(topo.ports.begin(), topo.ports.end());
  std::sort(topo.switches.begin(), topo.switches.end());
  std::sort(topo.ingress.begin(), topo.ingress.end());
  topo.ingress.erase(std::unique(topo.ingress.begin(), topo.ingress.end()),
                     topo.ingress.end());
  std::sort(topo.inport.begin(), topo.inport.end());
  std::sort(topo.outport.begin(), topo.outport.end());
  topo.outport.erase(std::unique(topo.outport.begin(), topo.outport.end()),
                     topo.outport.end());

  auto random_table = [&](std::size_t s) {
    SwitchPolicy sp;
    // Out-port candidates: ports this switch writes, plus WORLD and DROP.
    std::vector<PortId> outs{topo.world, topo.drop, topo.world};
    for (const auto& [sw, port] : topo.outport) {
      if (sw == switches[s]) outs.push_back(port);
    }
    int rule_no = 0;
    for (const PortId& in : in_ports[s]) {
      std::size_t nrules = 1 + rng.below(3);
      for (std::size_t r = 0; r < nrules; ++r) {
        Rule rule;
        rule.key = "r" + std::to_string(rule_no++);
        rule.in_port = in;
        if (rng.chance(0.6)) {
          int field = static_cast<int>(rng.below(inst.space.field_count()));
          int value = static_cast<int>(
              rng.below(inst.space.fields()[field].values.size()));
          rule.guard.push_back(FieldAssignment{field, value});
        }
        if (rng.chance(0.15)) {
          int field = static_cast<int>(rng.below(inst.space.field_count()));
          int value = static_cast<int>(
              rng.below(inst.space.fields()[field].values.size()));
          rule.rewrites.push_back(FieldAssignment{field, value});
        }
        rule.out_port = outs[rng.below(outs.size())];
        sp.rules.push_back(rule);
      }
    }
    return sp;
  };

  std::map<SwitchId, SwitchPolicy> initial_table;
  for (std::size_t s = 0; s < nswitches; ++s) {
    initial_table[switches[s]] = random_table(s);
  }
  inst.initial = NetworkPolicy(initial_table);

  std::map<SwitchId, SwitchPolicy> final_table = initial_table;
  std::size_t ndiff = 1 + rng.below(std::min<std::size_t>(nswitches, 4));
  std::set<std::size_t> change;
  while (change.size() < ndiff) change.insert(rng.below(nswitches));
  for (std::size_t s : change) final_table[switches[s]] = random_table(s);
  inst.final_policy = NetworkPolicy(final_table);

  // Invariants biased toward satisfiable delivery/safety shapes so that all
  // three synthesis outcomes occur across seeds.
  const PacketField& f0 = inst.space.fields()[0];
  switch (rng.below(4)) {
    case 0:
      inst.spec = parse_ltl("F port = WORLD | F port = DROP");
      break;
    case 1:
      inst.spec = parse_ltl("G (" + f0.name + " = " + f0.values[0] +
                            " -> F port = WORLD)");
      break;
    case 2:
      inst.spec = parse_ltl(f0.name + " = " + f0.values[1] +
                            " -> F port = DROP");
      break;
    default:
      inst.spec =
          parse_ltl("G ! port = " + in_ports[nswitches - 1][0]);
      break;
  }
  return inst;
}

}  // namespace netupdate::testing

#endif  // NETUPDATE_TESTS_SUPPORT_HPP_
