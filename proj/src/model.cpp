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

#include "netupdate/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace netupdate {

namespace {

std::string quoted(const std::string& s) { return "'" + s + "'"; }

}  // namespace

PacketSpace::PacketSpace(std::vector<PacketField> fields)
    : fields_(std::move(fields)) {
  std::set<std::string> seen;
  for (const PacketField& f : fields_) {
    if (!seen.insert(f.name).second) {
      throw ModelError("duplicate packet field " + quoted(f.name));
    }
    if (f.values.empty()) {
      throw ModelError("packet field " + quoted(f.name) + " has an empty domain");
    }
    std::set<std::string> vals(f.values.begin(), f.values.end());
    if (vals.size() != f.values.size()) {
      throw ModelError("packet field " + quoted(f.name) + " has duplicate values");
    }
  }
}

int PacketSpace::field_index(const std::string& name) const {
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (fields_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int PacketSpace::value_index(int field, const std::string& value) const {
  const auto& vals = fields_[field].values;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] == value) return static_cast<int>(i);
  }
  return -1;
}

std::uint64_t PacketSpace::universe_size() const {
  std::uint64_t n = 1;
  for (const PacketField& f : fields_) n *= f.values.size();
  return n;
}

Packet packet_at(const PacketSpace& space, std::uint64_t ordinal) {
  Packet pkt;
  pkt.values.resize(space.field_count());
  for (std::size_t i = space.field_count(); i-- > 0;) {
    std::uint64_t radix = space.fields()[i].values.size();
    pkt.values[i] = static_cast<std::int32_t>(ordinal % radix);
    ordinal /= radix;
  }
  return pkt;
}

std::string packet_to_string(const PacketSpace& space, const Packet& pkt) {
  std::ostringstream out;
  out << "{";
  for (std::size_t i = 0; i < space.field_count(); ++i) {
    if (i) out << ", ";
    out << space.field_name(static_cast<int>(i)) << "="
        << space.value_name(static_cast<int>(i), pkt.values[i]);
  }
  out << "}";
  return out.str();
}

bool Topology::has_port(const PortId& p) const {
  return std::binary_search(ports.begin(), ports.end(), p);
}

bool Topology::has_switch(const SwitchId& s) const {
  return std::binary_search(switches.begin(), switches.end(), s);
}

bool Topology::is_ingress(const PortId& p) const {
  return std::binary_search(ingress.begin(), ingress.end(), p);
}

const SwitchId* Topology::owner_of(const PortId& p) const {
  const SwitchId* found = nullptr;
  for (const auto& [port, sw] : inport) {
    if (port != p) continue;
    if (found != nullptr) return nullptr;  // ambiguous
    found = &sw;
  }
  return found;
}

std::vector<PortId> Topology::in_ports_of(const SwitchId& s) const {
  std::vector<PortId> result;
  for (const auto& [port, sw] : inport) {
    if (sw == s) result.push_back(port);
  }
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

bool Topology::outport_related(const SwitchId& s, const PortId& p) const {
  for (const auto& [sw, port] : outport) {
    if (sw == s && port == p) return true;
  }
  return false;
}

bool rule_matches(const Rule& rule, const LocatedPacket& lp) {
  if (rule.in_port != lp.port) return false;
  for (const FieldAssignment& g : rule.guard) {
    if (lp.packet.values[g.field] != g.value) return false;
  }
  return true;
}

const SwitchPolicy& NetworkPolicy::at(const SwitchId& s) const {
  auto it = table_.find(s);
  if (it == table_.end()) {
    throw ModelError("no policy entry for switch '" + s + "'");
  }
  return it->second;
}

void NetworkPolicy::set(const SwitchId& s, SwitchPolicy policy) {
  table_[s] = std::move(policy);
}

std::vector<std::string> validate_topology(const Topology& topo,
                                           const PacketSpace& space) {
  (void)space;
  std::vector<std::string> violations;
  auto bad = [&](const std::string& msg) { violations.push_back(msg); };

  if (topo.world == topo.drop) bad("world and drop are the same port");
  if (!topo.has_port(topo.world)) bad("world port '" + topo.world + "' not in ports");
  if (!topo.has_port(topo.drop)) bad("drop port '" + topo.drop + "' not in ports");
  if (topo.is_ingress(topo.world)) bad("world port cannot be an ingress");
  if (topo.is_ingress(topo.drop)) bad("drop port cannot be an ingress");

  for (const PortId& p : topo.ingress) {
    if (!topo.has_port(p)) bad("ingress port '" + p + "' not in ports");
  }
  for (const auto& [port, sw] : topo.inport) {
    if (!topo.has_port(port)) bad("inport row references unknown port '" + port + "'");
    if (!topo.has_switch(sw)) bad("inport row references unknown switch '" + sw + "'");
  }
  for (const auto& [sw, port] : topo.outport) {
    if (!topo.has_port(port)) bad("outport row references unknown port '" + port + "'");
    if (!topo.has_switch(sw)) bad("outport row references unknown switch '" + sw + "'");
  }

  std::map<PortId, int> readers;
  for (const auto& [port, sw] : topo.inport) readers[port]++;
  std::map<PortId, int> writers;
  for (const auto& [sw, port] : topo.outport) writers[port]++;

  for (const PortId& p : topo.ports) {
    if (topo.is_special(p)) {
      if (readers.count(p)) bad("special port '" + p + "' has an inport switch");
      continue;
    }
    int r = readers.count(p) ? readers[p] : 0;
    if (r == 0) bad("port '" + p + "' is read by no switch");
    if (r > 1) bad("port '" + p + "' is read by " + std::to_string(r) + " switches");
    if (!topo.is_ingress(p)) {
      int w = writers.count(p) ? writers[p] : 0;
      if (w == 0) bad("port '" + p + "' is written by no switch");
      if (w > 1) bad("port '" + p + "' is written by " + std::to_string(w) + " switches");
    }
  }
  return violations;
}

std::vector<std::string> validate_policy(const Topology& topo,
                                         const PacketSpace& space,
                                         const NetworkPolicy& policy) {
  std::vector<std::string> violations;
  auto bad = [&](const std::string& msg) { violations.push_back(msg); };

  for (const SwitchId& s : topo.switches) {
    if (!policy.has(s)) bad("missing policy for switch '" + s + "'");
  }
  for (const auto& [s, sp] : policy.table()) {
    if (!topo.has_switch(s)) {
      bad("policy entry for unknown switch '" + s + "'");
      continue;
    }
    std::set<std::string> keys;
    for (const Rule& r : sp.rules) {
      if (!keys.insert(r.key).second) {
        bad("switch '" + s + "' has duplicate rule key '" + r.key + "'");
      }
      const SwitchId* owner = topo.owner_of(r.in_port);
      if (owner == nullptr || *owner != s) {
        bad("switch '" + s + "' rule '" + r.key + "' matches in-port '" +
            r.in_port + "' not owned by the switch");
      }
      if (!topo.is_special(r.out_port) && !topo.outport_related(s, r.out_port)) {
        bad("switch '" + s + "' rule '" + r.key + "' emits to port '" +
            r.out_port + "' the switch cannot write");
      }
      for (const auto* fa_list : {&r.guard, &r.rewrites}) {
        for (const FieldAssignment& fa : *fa_list) {
          if (fa.field < 0 || fa.field >= static_cast<int>(space.field_count())) {
            bad("switch '" + s + "' rule '" + r.key + "' references field index " +
                std::to_string(fa.field) + " outside the packet space");
          } else if (fa.value < 0 ||
                     fa.value >= static_cast<int>(
                                     space.fields()[fa.field].values.size())) {
            bad("switch '" + s + "' rule '" + r.key + "' references value index " +
                std::to_string(fa.value) + " outside field '" +
                space.field_name(fa.field) + "'");
          }
        }
      }
    }
  }
  return violations;
}

LocatedPacket policy_lookup(const Topology& topo, const NetworkPolicy& policy,
                            const LocatedPacket& lp) {
  if (topo.is_special(lp.port)) return lp;
  const SwitchId* owner = topo.owner_of(lp.port);
  if (owner == nullptr) {
    throw ModelError("port '" + lp.port + "' is owned by no unique switch");
  }
  for (const Rule& r : policy.at(*owner).rules) {
    if (!rule_matches(r, lp)) continue;
    LocatedPacket next{r.out_port, lp.packet};
    for (const FieldAssignment& rw : r.rewrites) {
      next.packet.values[rw.field] = rw.value;
    }
    return next;
  }
  return LocatedPacket{topo.drop, lp.packet};
}

NetworkPolicy apply_update(const Topology& topo, const PacketSpace& space,
                           const NetworkPolicy& policy, const UpdateCmd& upd) {
  NetworkPolicy single(std::map<SwitchId, SwitchPolicy>{{upd.sw, upd.policy}});
  std::vector<std::string> problems = validate_policy(topo, space, single);
  // validate_policy flags every switch without an entry; only complaints
  // about the updated switch itself indicate incompatibility.
  for (const std::string& p : problems) {
    if (p.rfind("missing policy", 0) != 0) {
      throw CompatibilityError("update for switch '" + upd.sw + "': " + p);
    }
  }
  NetworkPolicy result = policy;
  result.set(upd.sw, upd.policy);
  return result;
}

std::vector<SwitchId> diff_switches(const NetworkPolicy& initial,
                                    const NetworkPolicy& final_policy) {
  if (initial.table().size() != final_policy.table().size()) {
    throw ModelError("policies cover different switch sets");
  }
  std::vector<SwitchId> diff;
  auto it = initial.table().begin();
  auto jt = final_policy.table().begin();
  for (; it != initial.table().end(); ++it, ++jt) {
    if (it->first != jt->first) {
      throw ModelError("policies cover different switch sets");
    }
    if (!(it->second == jt->second)) diff.push_back(it->first);
  }
  return diff;
}

namespace {

// Merges the per-policy key orders of one switch into a single total order;
// every policy's rule list must read as a subsequence of the result.
std::vector<std::string> align_rule_slots(const SwitchId& sw,
                                          const std::vector<const SwitchPolicy*>& tables) {
  std::set<std::string> keys;
  std::map<std::string, std::set<std::string>> after;  // key -> keys that follow
  std::map<std::string, int> indegree;
  for (const SwitchPolicy* sp : tables) {
    std::set<std::string> seen;
    for (const Rule& r : sp->rules) {
      if (!seen.insert(r.key).second) {
        throw ReductionError("switch '" + sw + "' lists rule key '" + r.key +
                             "' twice in one policy");
      }
      keys.insert(r.key);
      indegree.emplace(r.key, 0);
    }
    for (std::size_t i = 0; i < sp->rules.size(); ++i) {
      for (std::size_t j = i + 1; j < sp->rules.size(); ++j) {
        const std::string& a = sp->rules[i].key;
        const std::string& b = sp->rules[j].key;
        if (after[a].insert(b).second) indegree[b]++;
      }
    }
  }
  std::set<std::string> ready;
  for (const std::string& k : keys) {
    if (indegree[k] == 0) ready.insert(k);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string k = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(k);
    for (const std::string& next : after[k]) {
      if (--indegree[next] == 0) ready.insert(next);
    }
  }
  if (order.size() != keys.size()) {
    throw ReductionError("switch '" + sw +
                         "' has rule orders that cannot be aligned across policies");
  }
  return order;
}

std::string mirror_port(const PortId& p, std::size_t depth) {
  return depth == 0 ? p : p + "#" + std::to_string(depth);
}

}  // namespace

ReducedNetwork rule_granularity_reduce(const Topology& topo,
                                       const PacketSpace& space,
                                       const std::vector<NetworkPolicy>& policies) {
  (void)space;
  ReducedNetwork out;
  out.topo.world = topo.world;
  out.topo.drop = topo.drop;
  out.topo.ingress = topo.ingress;
  out.topo.ports = topo.ports;
  out.policies.resize(policies.size());

  std::set<PortId> port_names(topo.ports.begin(), topo.ports.end());
  std::set<SwitchId> switch_names;

  for (const SwitchId& sw : topo.switches) {
    std::vector<const SwitchPolicy*> tables;
    for (const NetworkPolicy& p : policies) tables.push_back(&p.at(sw));
    std::vector<std::string> slots = align_rule_slots(sw, tables);

    if (slots.empty()) {
      // No rules anywhere; the switch stays as-is and keeps dropping.
      if (!switch_names.insert(sw).second) {
        throw ReductionError("duplicate switch name '" + sw + "'");
      }
      for (const auto& [port, owner] : topo.inport) {
        if (owner == sw) out.topo.inport.emplace_back(port, sw);
      }
      for (const auto& [owner, port] : topo.outport) {
        if (owner == sw) out.topo.outport.emplace_back(sw, port);
      }
      for (std::size_t pi = 0; pi < policies.size(); ++pi) {
        out.policies[pi].set(sw, SwitchPolicy{});
      }
      continue;
    }

    std::vector<PortId> heads = topo.in_ports_of(sw);
    std::vector<SwitchId> chain;
    for (const std::string& key : slots) {
      SwitchId pseudo = sw + "#" + key;
      if (topo.has_switch(pseudo) || !switch_names.insert(pseudo).second) {
        throw ReductionError("pseudo-switch name '" + pseudo +
                             "' collides with an existing switch");
      }
      chain.push_back(pseudo);
    }

    // Mirrored entry ports: depth 0 reuses the original in-ports, deeper
    // chain elements get fresh internal ports per original in-port.
    for (std::size_t depth = 0; depth < slots.size(); ++depth) {
      for (const PortId& head : heads) {
        PortId mp = mirror_port(head, depth);
        if (depth > 0) {
          if (!port_names.insert(mp).second) {
            throw ReductionError("internal port name '" + mp +
                                 "' collides with an existing port");
          }
          out.topo.ports.push_back(mp);
        }
        out.topo.inport.emplace_back(mp, chain[depth]);
        if (depth + 1 < slots.size()) {
          out.topo.outport.emplace_back(chain[depth], mirror_port(head, depth + 1));
        }
      }
    }

    std::map<std::string, std::size_t> slot_of;
    for (std::size_t i = 0; i < slots.size(); ++i) slot_of[slots[i]] = i;

    std::set<std::pair<SwitchId, PortId>> slot_outports;
    for (std::size_t pi = 0; pi < policies.size(); ++pi) {
      std::map<std::size_t, Rule> by_slot;
      for (const Rule& r : tables[pi]->rules) by_slot[slot_of.at(r.key)] = r;

      for (std::size_t depth = 0; depth < slots.size(); ++depth) {
        SwitchPolicy sp;
        auto it = by_slot.find(depth);
        if (it != by_slot.end()) {
          Rule slot_rule = it->second;
          slot_rule.in_port = mirror_port(slot_rule.in_port, depth);
          sp.rules.push_back(slot_rule);
          if (!topo.is_special(it->second.out_port)) {
            slot_outports.emplace(chain[depth], it->second.out_port);
          }
        }
        bool last = depth + 1 == slots.size();
        for (const PortId& head : heads) {
          Rule pass;
          pass.key = "pass:" + head;
          pass.in_port = mirror_port(head, depth);
          pass.out_port = last ? topo.drop : mirror_port(head, depth + 1);
          sp.rules.push_back(pass);
        }
        out.policies[pi].set(chain[depth], sp);
      }
    }
    for (const auto& [pseudo, port] : slot_outports) {
      out.topo.outport.emplace_back(pseudo, port);
    }
  }

  out.topo.switches.assign(switch_names.begin(), switch_names.end());
  std::sort(out.topo.switches.begin(), out.topo.switches.end());
  std::sort(out.topo.ports.begin(), out.topo.ports.end());
  std::sort(out.topo.inport.begin(), out.topo.inport.end());
  std::sort(out.topo.outport.begin(), out.topo.outport.end());
  out.topo.outport.erase(
      std::unique(out.topo.outport.begin(), out.topo.outport.end()),
      out.topo.outport.end());
  return out;
}

}  // namespace netupdate
