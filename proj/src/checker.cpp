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

#include "netupdate/checker.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace netupdate {

namespace {

// Indexed view of a (topology, policy, packet space) triple for the hot
// stepping loops. The product of ports and packets forms a deterministic
// step graph: every in-network (port, packet) state has exactly one
// successor.
class Stepper {
 public:
  Stepper(const Topology& topo, const NetworkPolicy& policy,
          const PacketSpace& space)
      : topo_(topo), policy_(policy), space_(space) {
    universe_ = space.universe_size();
    for (std::size_t i = 0; i < topo.ports.size(); ++i) {
      port_index_[topo.ports[i]] = static_cast<int>(i);
    }
    owner_.assign(topo.ports.size(), -1);
    std::unordered_map<std::string, int> switch_index;
    for (std::size_t i = 0; i < topo.switches.size(); ++i) {
      switch_index[topo.switches[i]] = static_cast<int>(i);
    }
    for (const auto& [port, sw] : topo.inport) {
      auto pit = port_index_.find(port);
      auto sit = switch_index.find(sw);
      if (pit == port_index_.end() || sit == switch_index.end()) continue;
      owner_[pit->second] = sit->second;
    }
  }

  const Topology& topo() const { return topo_; }
  std::uint64_t universe() const { return universe_; }
  std::size_t port_count() const { return topo_.ports.size(); }
  std::uint64_t state_count() const { return port_count() * universe_; }

  int port_index(const PortId& p) const {
    auto it = port_index_.find(p);
    return it == port_index_.end() ? -1 : it->second;
  }
  const PortId& port_name(int idx) const { return topo_.ports[idx]; }
  bool special(int port_idx) const { return topo_.is_special(port_name(port_idx)); }
  int owner(int port_idx) const { return owner_[port_idx]; }
  const SwitchId& switch_name(int idx) const { return topo_.switches[idx]; }

  std::uint64_t packet_ordinal(const Packet& pkt) const {
    std::uint64_t ord = 0;
    for (std::size_t i = 0; i < space_.field_count(); ++i) {
      ord = ord * space_.fields()[i].values.size() + pkt.values[i];
    }
    return ord;
  }

  std::uint64_t state_id(int port_idx, std::uint64_t pkt_ordinal) const {
    return static_cast<std::uint64_t>(port_idx) * universe_ + pkt_ordinal;
  }
  int state_port(std::uint64_t state) const {
    return static_cast<int>(state / universe_);
  }
  Packet state_packet(std::uint64_t state) const {
    return packet_at(space_, state % universe_);
  }

  LocatedPacket locate(std::uint64_t state) const {
    return LocatedPacket{port_name(state_port(state)), state_packet(state)};
  }

  // Unique successor of an in-network state; nullopt when the packet leaves
  // through WORLD or DROP.
  std::optional<std::uint64_t> step(std::uint64_t state) const {
    int pidx = state_port(state);
    int sw = owner_[pidx];
    if (sw < 0) {
      throw ModelError("port '" + port_name(pidx) + "' is owned by no switch");
    }
    LocatedPacket lp = locate(state);
    LocatedPacket next{topo_.drop, lp.packet};
    for (const Rule& r : policy_.at(switch_name(sw)).rules) {
      if (!rule_matches(r, lp)) continue;
      next = LocatedPacket{r.out_port, lp.packet};
      for (const FieldAssignment& rw : r.rewrites) {
        next.packet.values[rw.field] = rw.value;
      }
      break;
    }
    int nidx = port_index(next.port);
    if (nidx < 0) {
      throw ModelError("rule of switch '" + switch_name(sw) +
                       "' emits to unknown port '" + next.port + "'");
    }
    if (special(nidx)) return std::nullopt;
    return state_id(nidx, packet_ordinal(next.packet));
  }

  // Final located packet of the step leaving `state`, when the successor is
  // a special port.
  LocatedPacket terminal_of(std::uint64_t state) const {
    int pidx = state_port(state);
    LocatedPacket lp = locate(state);
    LocatedPacket next{topo_.drop, lp.packet};
    int sw = owner_[pidx];
    for (const Rule& r : policy_.at(switch_name(sw)).rules) {
      if (!rule_matches(r, lp)) continue;
      next = LocatedPacket{r.out_port, lp.packet};
      for (const FieldAssignment& rw : r.rewrites) {
        next.packet.values[rw.field] = rw.value;
      }
      break;
    }
    return next;
  }

 private:
  const Topology& topo_;
  const NetworkPolicy& policy_;
  const PacketSpace& space_;
  std::uint64_t universe_;
  std::unordered_map<PortId, int> port_index_;
  std::vector<int> owner_;
};

constexpr std::uint64_t kMaxLoopStates = 50'000'000;

Counterexample loop_cex(const Stepper& st, const std::vector<std::uint64_t>& walk) {
  Counterexample cex;
  cex.kind = CexKind::kLoop;
  for (std::uint64_t s : walk) cex.trace.states.push_back(st.locate(s));
  std::set<SwitchId> seen;
  for (std::uint64_t s : walk) {
    const SwitchId& sw = st.switch_name(st.owner(st.state_port(s)));
    if (seen.insert(sw).second) cex.traversed_switches.push_back(sw);
  }
  return cex;
}

// Loop analysis over the deterministic product graph. `starts` fixes the
// exploration order and therefore the witness reported.
std::optional<Counterexample> find_loop_violation(
    const Stepper& st, const std::vector<std::uint64_t>& starts) {
  if (st.state_count() > kMaxLoopStates) {
    throw ModelError("port/packet product too large for loop analysis");
  }
  const std::size_t n = static_cast<std::size_t>(st.state_count());
  std::vector<char> color(n, 0);  // 0 unvisited, 1 on path, 2 done
  std::vector<std::uint64_t> path;

  // Pass 1: a (port, packet) state repeating means a packet cycles forever.
  for (std::uint64_t s0 : starts) {
    if (color[s0] != 0) continue;
    path.clear();
    std::uint64_t cur = s0;
    while (true) {
      color[cur] = 1;
      path.push_back(cur);
      std::optional<std::uint64_t> next = st.step(cur);
      if (!next.has_value() || color[*next] == 2) break;
      if (color[*next] == 1) {
        auto it = std::find(path.begin(), path.end(), *next);
        std::vector<std::uint64_t> cycle(it, path.end());
        return loop_cex(st, cycle);
      }
      cur = *next;
    }
    for (std::uint64_t s : path) color[s] = 2;
  }

  // Pass 2: acyclic now, so every walk terminates; look for a switch that
  // processes the same packet twice along one walk.
  const std::size_t blocks = (st.topo().switches.size() + 63) / 64;
  if (n * blocks > (std::size_t{1} << 26)) {
    throw ModelError("port/packet/switch product too large for loop analysis");
  }
  std::vector<std::uint64_t> tail(n * blocks, 0);
  std::vector<char> done(n, 0);
  auto tail_of = [&](std::uint64_t s) { return tail.data() + s * blocks; };

  for (std::uint64_t s0 : starts) {
    if (done[s0]) continue;
    path.clear();
    std::uint64_t cur = s0;
    while (!done[cur]) {
      path.push_back(cur);
      std::optional<std::uint64_t> next = st.step(cur);
      if (!next.has_value()) break;
      cur = *next;
    }
    for (std::size_t i = path.size(); i-- > 0;) {
      std::uint64_t s = path[i];
      std::optional<std::uint64_t> next = st.step(s);
      if (next.has_value()) {
        const std::uint64_t* nt = tail_of(*next);
        std::uint64_t* t = tail_of(s);
        for (std::size_t b = 0; b < blocks; ++b) t[b] = nt[b];
        int nsw = st.owner(st.state_port(*next));
        t[nsw / 64] |= (std::uint64_t{1} << (nsw % 64));
      }
      done[s] = 1;
    }
  }
  for (std::uint64_t s0 : starts) {
    int sw = st.owner(st.state_port(s0));
    if ((tail_of(s0)[sw / 64] >> (sw % 64)) & 1) {
      std::vector<std::uint64_t> walk{s0};
      std::uint64_t cur = s0;
      while (true) {
        cur = *st.step(cur);
        walk.push_back(cur);
        if (st.owner(st.state_port(cur)) == sw) break;
      }
      return loop_cex(st, walk);
    }
  }
  return std::nullopt;
}

std::vector<std::uint64_t> ordered_starts(const Stepper& st,
                                          const std::vector<PortId>& first_ports) {
  std::vector<std::uint64_t> starts;
  starts.reserve(static_cast<std::size_t>(st.state_count()));
  std::vector<char> is_first(st.port_count(), 0);
  for (const PortId& p : first_ports) {
    int idx = st.port_index(p);
    if (idx >= 0) is_first[idx] = 1;
  }
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t p = 0; p < st.port_count(); ++p) {
      if (st.special(static_cast<int>(p))) continue;
      if ((pass == 0) != (is_first[p] != 0)) continue;
      for (std::uint64_t k = 0; k < st.universe(); ++k) {
        starts.push_back(st.state_id(static_cast<int>(p), k));
      }
    }
  }
  return starts;
}

}  // namespace

std::vector<SwitchId> switches_on_trace(const Topology& topo,
                                        const LassoTrace& trace) {
  std::vector<SwitchId> result;
  std::set<SwitchId> seen;
  for (const LocatedPacket& lp : trace.states) {
    if (topo.is_special(lp.port)) continue;
    const SwitchId* owner = topo.owner_of(lp.port);
    if (owner != nullptr && seen.insert(*owner).second) {
      result.push_back(*owner);
    }
  }
  return result;
}

Verdict has_loops(const Topology& topo, const NetworkPolicy& policy,
                  const PacketSpace& space) {
  Stepper st(topo, policy, space);
  auto cex = find_loop_violation(st, ordered_starts(st, {}));
  if (cex.has_value()) return Verdict::fail(std::move(*cex));
  return Verdict::pass();
}

Verdict has_new_loops(const Topology& topo, const NetworkPolicy& policy,
                      const PacketSpace& space, const SwitchId& changed) {
  Stepper st(topo, policy, space);
  auto cex = find_loop_violation(st, ordered_starts(st, topo.in_ports_of(changed)));
  if (cex.has_value()) return Verdict::fail(std::move(*cex));
  return Verdict::pass();
}

void for_each_trace(const Topology& topo, const NetworkPolicy& policy,
                    const PacketSpace& space,
                    const std::function<bool(const LassoTrace&)>& fn) {
  Stepper st(topo, policy, space);
  const std::size_t max_states = topo.ports.size() + 1;
  for (const PortId& ingress : topo.ingress) {
    int pidx = st.port_index(ingress);
    if (pidx < 0) throw ModelError("ingress port '" + ingress + "' not in ports");
    for (std::uint64_t ord = 0; ord < st.universe(); ++ord) {
      LassoTrace trace;
      std::uint64_t cur = st.state_id(pidx, ord);
      while (true) {
        trace.states.push_back(st.locate(cur));
        if (trace.states.size() > max_states) {
          throw ModelError("trace from ingress '" + ingress +
                           "' exceeded the port bound; policy has a loop");
        }
        std::optional<std::uint64_t> next = st.step(cur);
        if (!next.has_value()) {
          trace.states.push_back(st.terminal_of(cur));
          break;
        }
        cur = *next;
      }
      if (!fn(trace)) return;
    }
  }
}

std::vector<LassoTrace> enumerate_traces(const Topology& topo,
                                         const NetworkPolicy& policy,
                                         const PacketSpace& space) {
  std::vector<LassoTrace> traces;
  for_each_trace(topo, policy, space, [&](const LassoTrace& t) {
    traces.push_back(t);
    return true;
  });
  return traces;
}

Verdict model_check(const Topology& topo, const NetworkPolicy& policy,
                    const LtlFormula& f, const PacketSpace& space) {
  std::optional<Counterexample> found;
  for_each_trace(topo, policy, space, [&](const LassoTrace& t) {
    if (eval_lasso(f, t, space)) return true;
    Counterexample cex;
    cex.kind = CexKind::kPropertyViolation;
    cex.trace = t;
    cex.traversed_switches = switches_on_trace(topo, t);
    found = std::move(cex);
    return false;
  });
  if (found.has_value()) return Verdict::fail(std::move(*found));
  return Verdict::pass();
}

PlanCheck validate_plan(const Topology& topo, const NetworkPolicy& initial,
                        const CommandSequence& seq, const LtlFormula& f,
                        const PacketSpace& space, const NetworkPolicy* target) {
  auto fail = [](std::string reason, std::size_t index,
                 std::optional<Counterexample> cex = std::nullopt) {
    return PlanCheck{false, std::move(reason), index, std::move(cex)};
  };

  std::set<SwitchId> updated;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Command& cmd = seq[i];
    if (i % 2 == 1 && !cmd.is_wait()) {
      return fail("command " + std::to_string(i) +
                      " must be a wait (careful sequences alternate)",
                  i);
    }
    if (!cmd.is_wait() && !updated.insert(cmd.update->sw).second) {
      return fail("switch '" + cmd.update->sw +
                      "' is updated more than once (sequence is not simple)",
                  i);
    }
  }

  NetworkPolicy current = initial;
  for (std::size_t i = 0; i <= seq.size(); ++i) {
    Verdict loops = has_loops(topo, current, space);
    if (!loops.ok) {
      return fail("configuration " + std::to_string(i) + " has a forwarding loop",
                  i, std::move(loops.cex));
    }
    Verdict mc = model_check(topo, current, f, space);
    if (!mc.ok) {
      return fail("configuration " + std::to_string(i) +
                      " violates the specification",
                  i, std::move(mc.cex));
    }
    if (i == seq.size()) break;
    if (!seq[i].is_wait()) {
      try {
        current = apply_update(topo, space, current, *seq[i].update);
      } catch (const ModelError& e) {
        return fail(std::string("command ") + std::to_string(i) + ": " + e.what(), i);
      }
    }
  }
  if (target != nullptr && !(current == *target)) {
    return fail("final configuration does not match the target policy",
                seq.size());
  }
  return PlanCheck{true, "", PlanCheck::npos, std::nullopt};
}

// ---------------------------------------------------------------------------
// Transition-system simulation

namespace {

struct SimState {
  int port;
  std::uint64_t pkt;
  std::uint32_t consumed;
  bool waited;

  auto operator<=>(const SimState&) const = default;
};

class Simulator {
 public:
  Simulator(const Topology& topo, const NetworkPolicy& initial,
            const CommandSequence& seq, const LtlFormula& f,
            const PacketSpace& space, std::uint64_t max_traces)
      : topo_(topo), seq_(seq), f_(f), space_(space), max_traces_(max_traces) {
    policies_.push_back(initial);
    for (const Command& cmd : seq) {
      NetworkPolicy next = policies_.back();
      if (!cmd.is_wait()) {
        next = apply_update(topo, space, policies_.back(), *cmd.update);
      }
      policies_.push_back(std::move(next));
    }
    for (const NetworkPolicy& p : policies_) {
      steppers_.emplace_back(topo, p, space);
    }
  }

  SimulationResult run() {
    result_ = SimulationResult{true, false, "", std::nullopt, 0};
    std::vector<char> k_reachable = reachable_indices();

    const Stepper& st0 = steppers_.front();
    std::vector<SimState> births;
    for (const PortId& ing : topo_.ingress) {
      int pidx = st0.port_index(ing);
      for (std::uint64_t ord = 0; ord < st0.universe(); ++ord) {
        births.push_back(SimState{pidx, ord, 0, true});  // pre-existing packet
        for (std::uint32_t k = 0; k < policies_.size(); ++k) {
          if (k_reachable[k]) births.push_back(SimState{pidx, ord, k, false});
        }
      }
    }
    for (const SimState& b : births) {
      if (!result_.ok || result_.budget_exhausted) break;
      on_path_.clear();
      LassoTrace trace;
      trace.states.push_back(steppers_[b.consumed].locate(
          steppers_[b.consumed].state_id(b.port, b.pkt)));
      explore(b, trace);
    }
    return result_;
  }

 private:
  // Which command-consumption counts are reachable at all. Waits are always
  // consumable; updates need the wait flag cleared, which a new packet
  // provides, so every prefix is reachable in order.
  std::vector<char> reachable_indices() const {
    std::vector<char> reach(policies_.size(), 0);
    for (std::size_t k = 0; k < policies_.size(); ++k) reach[k] = 1;
    return reach;
  }

  void explore(const SimState& s, LassoTrace& trace) {
    if (!result_.ok || result_.budget_exhausted) return;
    if (on_path_.count(s)) return;  // packet can circle forever; no new complete trace
    on_path_.insert(s);

    const Stepper& st = steppers_[s.consumed];
    bool special = st.special(s.port);

    if (special) {
      // Complete one-packet trace. Consuming further commands would only
      // repeat the trailing WORLD/DROP state, which the lasso suffix already
      // models, so the lifetime ends here.
      result_.traces_checked++;
      if (result_.traces_checked > max_traces_) {
        result_.budget_exhausted = true;
        result_.reason = "trace budget exhausted";
      } else if (!eval_lasso(f_, trace, space_)) {
        result_.ok = false;
        result_.reason = "complete one-packet trace violates the specification";
        result_.witness = trace;
      }
    } else {
      // Packet move.
      std::uint64_t cur = st.state_id(s.port, s.pkt);
      std::optional<std::uint64_t> next = st.step(cur);
      LocatedPacket moved =
          next.has_value() ? st.locate(*next) : st.terminal_of(cur);
      SimState ns{st.port_index(moved.port), st.packet_ordinal(moved.packet),
                  s.consumed, s.waited};
      trace.states.push_back(moved);
      explore(ns, trace);
      trace.states.pop_back();

      // Command consumption; the located packet is unchanged.
      if (s.consumed < seq_.size() && result_.ok && !result_.budget_exhausted) {
        const Command& cmd = seq_[s.consumed];
        if (cmd.is_wait()) {
          check_wait_correctness(s);
          explore(SimState{s.port, s.pkt, s.consumed + 1, true}, trace);
        } else if (!s.waited) {
          explore(SimState{s.port, s.pkt, s.consumed + 1, false}, trace);
        }
      }
    }

    on_path_.erase(s);
  }

  // After a wait fires, updates stay disabled until a new packet is tracked,
  // so the current packet must drain under the frozen policy.
  void check_wait_correctness(const SimState& s) {
    const Stepper& st = steppers_[s.consumed];
    if (st.special(s.port)) return;
    std::uint64_t key = st.state_id(s.port, s.pkt) * policies_.size() + s.consumed;
    if (!wait_checked_.insert(key).second) return;
    std::uint64_t cur = st.state_id(s.port, s.pkt);
    std::size_t steps = 0;
    LassoTrace walk;
    walk.states.push_back(st.locate(cur));
    while (true) {
      std::optional<std::uint64_t> next = st.step(cur);
      if (!next.has_value()) return;  // drains to WORLD or DROP
      cur = *next;
      walk.states.push_back(st.locate(cur));
      if (++steps > topo_.ports.size() + 1) {
        result_.ok = false;
        result_.reason =
            "wait correctness violated: a packet can stay in the network forever";
        result_.witness = walk;
        return;
      }
    }
  }

  const Topology& topo_;
  const CommandSequence& seq_;
  const LtlFormula& f_;
  const PacketSpace& space_;
  std::uint64_t max_traces_;
  std::vector<NetworkPolicy> policies_;
  std::vector<Stepper> steppers_;
  std::set<SimState> on_path_;
  std::set<std::uint64_t> wait_checked_;
  SimulationResult result_;
};

}  // namespace

SimulationResult simulate_semantics(const Topology& topo,
                                    const NetworkPolicy& initial,
                                    const CommandSequence& seq,
                                    const LtlFormula& f,
                                    const PacketSpace& space,
                                    std::uint64_t max_traces) {
  std::set<SwitchId> updated;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i % 2 == 1 && !seq[i].is_wait()) {
      throw ModelError("simulate_semantics requires a careful-shaped sequence");
    }
    if (!seq[i].is_wait() && !updated.insert(seq[i].update->sw).second) {
      throw ModelError("simulate_semantics requires a simple sequence");
    }
  }
  Simulator sim(topo, initial, seq, f, space, max_traces);
  return sim.run();
}

}  // namespace netupdate
