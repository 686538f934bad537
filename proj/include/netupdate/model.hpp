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
// Formal network model: topologies, packets, rule-table policies, updates,
// and commands. Everything here is an immutable value; operations are pure
// functions of their inputs.

#ifndef NETUPDATE_MODEL_HPP_
#define NETUPDATE_MODEL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netupdate/errors.hpp"

namespace netupdate {

using SwitchId = std::string;
using PortId = std::string;

// One header field with its finite enumerated value domain.
struct PacketField {
  std::string name;
  std::vector<std::string> values;
};

// Ordered list of header fields. The packet universe is the product of the
// value domains, enumerated with field 0 as the most significant digit.
class PacketSpace {
 public:
  PacketSpace() = default;
  explicit PacketSpace(std::vector<PacketField> fields);

  const std::vector<PacketField>& fields() const { return fields_; }
  std::size_t field_count() const { return fields_.size(); }

  // Index of a field or value, -1 when absent.
  int field_index(const std::string& name) const;
  int value_index(int field, const std::string& value) const;

  const std::string& field_name(int field) const { return fields_[field].name; }
  const std::string& value_name(int field, int value) const {
    return fields_[field].values[value];
  }

  std::uint64_t universe_size() const;

 private:
  std::vector<PacketField> fields_;
};

// Concrete packet: one value index per field of the owning PacketSpace.
struct Packet {
  std::vector<std::int32_t> values;

  bool operator==(const Packet&) const = default;
  auto operator<=>(const Packet&) const = default;
};

// Packet number `ordinal` in field-domain order (field 0 most significant).
Packet packet_at(const PacketSpace& space, std::uint64_t ordinal);
std::string packet_to_string(const PacketSpace& space, const Packet& pkt);

struct LocatedPacket {
  PortId port;
  Packet packet;

  bool operator==(const LocatedPacket&) const = default;
};

// Switches, ports and the port-switch relations. A port is a unidirectional
// link endpoint: `inport` relates a port to the switch that reads it,
// `outport` relates a switch to a port it may emit on. WORLD and DROP are
// the two distinguished sink ports.
struct Topology {
  std::vector<SwitchId> switches;  // sorted, unique
  std::vector<PortId> ports;       // sorted, unique; includes world and drop
  PortId world;
  PortId drop;
  std::vector<PortId> ingress;  // sorted subset of ports
  std::vector<std::pair<PortId, SwitchId>> inport;
  std::vector<std::pair<SwitchId, PortId>> outport;

  bool is_special(const PortId& p) const { return p == world || p == drop; }
  bool has_port(const PortId& p) const;
  bool has_switch(const SwitchId& s) const;
  bool is_ingress(const PortId& p) const;

  // The unique switch reading port `p`, or nullptr if there is none or the
  // relation is ambiguous. Special ports have no owner.
  const SwitchId* owner_of(const PortId& p) const;

  // Ports read by switch `s`, sorted.
  std::vector<PortId> in_ports_of(const SwitchId& s) const;

  bool outport_related(const SwitchId& s, const PortId& p) const;
};

// Partial field assignment used for both guards and rewrites. Fields are
// indices into the PacketSpace; entries are sorted by field.
struct FieldAssignment {
  std::int32_t field;
  std::int32_t value;

  bool operator==(const FieldAssignment&) const = default;
  auto operator<=>(const FieldAssignment&) const = default;
};

// One forwarding rule. `key` identifies the rule slot across configurations
// so that rule-granularity reduction can align initial and final tables.
struct Rule {
  std::string key;
  PortId in_port;
  std::vector<FieldAssignment> guard;
  std::vector<FieldAssignment> rewrites;
  PortId out_port;

  bool operator==(const Rule&) const = default;
};

bool rule_matches(const Rule& rule, const LocatedPacket& lp);

// Ordered rule table, first match wins.
struct SwitchPolicy {
  std::vector<Rule> rules;

  bool operator==(const SwitchPolicy&) const = default;
};

// Total map from switch to its policy.
class NetworkPolicy {
 public:
  NetworkPolicy() = default;
  explicit NetworkPolicy(std::map<SwitchId, SwitchPolicy> table)
      : table_(std::move(table)) {}

  const std::map<SwitchId, SwitchPolicy>& table() const { return table_; }
  const SwitchPolicy& at(const SwitchId& s) const;
  bool has(const SwitchId& s) const { return table_.count(s) != 0; }
  void set(const SwitchId& s, SwitchPolicy policy);

  bool operator==(const NetworkPolicy&) const = default;

 private:
  std::map<SwitchId, SwitchPolicy> table_;
};

struct UpdateCmd {
  SwitchId sw;
  SwitchPolicy policy;

  bool operator==(const UpdateCmd&) const = default;
};

// Either a single-switch update or the wait barrier.
struct Command {
  std::optional<UpdateCmd> update;  // empty means wait

  bool is_wait() const { return !update.has_value(); }
  static Command wait() { return Command{}; }
  static Command make_update(SwitchId sw, SwitchPolicy policy) {
    return Command{UpdateCmd{std::move(sw), std::move(policy)}};
  }

  bool operator==(const Command&) const = default;
};

using CommandSequence = std::vector<Command>;

// ---------------------------------------------------------------------------
// Operations

// Well-formedness of a topology against its packet space. Violations are
// data, not failures: the returned strings name the offending port/switch.
std::vector<std::string> validate_topology(const Topology& topo,
                                           const PacketSpace& space);

// Compatibility of a policy with a topology: every switch has an entry, rule
// in-ports are owned by their switch, out-ports are emittable, guard and
// rewrite fields fit the packet space, and rule keys are unique per switch.
std::vector<std::string> validate_policy(const Topology& topo,
                                         const PacketSpace& space,
                                         const NetworkPolicy& policy);

// One forwarding step. Scans the owning switch's rules in order and applies
// the first match; an unmatched packet is forwarded to DROP. Located packets
// at WORLD or DROP self-loop. Throws ModelError if the port is owned by no
// switch.
LocatedPacket policy_lookup(const Topology& topo, const NetworkPolicy& policy,
                            const LocatedPacket& lp);

// The policy override P[s <- pi]. The input policy is not mutated. Throws
// CompatibilityError if the new switch policy does not fit `upd.sw`.
NetworkPolicy apply_update(const Topology& topo, const PacketSpace& space,
                           const NetworkPolicy& policy, const UpdateCmd& upd);

// Switches whose policies differ structurally, sorted by ID. Throws
// ModelError if the two policies cover different switch sets.
std::vector<SwitchId> diff_switches(const NetworkPolicy& initial,
                                    const NetworkPolicy& final_policy);

struct ReducedNetwork {
  Topology topo;
  std::vector<NetworkPolicy> policies;  // same order as the input
};

// Rewrites every multi-rule switch into a chain of single-rule
// pseudo-switches connected by fresh internal ports, so that updating one
// rule becomes an ordinary switch update. Rule slots are aligned across the
// given policies by rule key; unalignable tables raise ReductionError.
// Forwarding is preserved: for every (ingress, packet) pair the complete
// trace projected onto original ports is unchanged.
//
// Note: slots of one chain may share an original out-port, so the reduced
// outport relation can have several writers per port. Such topologies model
// virtual switches sharing a physical transmitter and are not expected to
// pass the strict uniqueness check in validate_topology.
ReducedNetwork rule_granularity_reduce(const Topology& topo,
                                       const PacketSpace& space,
                                       const std::vector<NetworkPolicy>& policies);

}  // namespace netupdate

#endif  // NETUPDATE_MODEL_HPP_
