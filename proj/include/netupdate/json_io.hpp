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
// The machine-facing file formats: network description files, plan files,
// and counterexample reports. Parsers are strict; unknown keys are rejected.

#ifndef NETUPDATE_JSON_IO_HPP_
#define NETUPDATE_JSON_IO_HPP_

#include <map>
#include <string>
#include <vector>

#include "netupdate/checker.hpp"
#include "netupdate/model.hpp"
#include "netupdate/synth.hpp"

namespace netupdate {

// Parsed network description: topology, packet space, and named policies.
struct NetworkFile {
  Topology topo;
  PacketSpace space;
  std::map<std::string, NetworkPolicy> policies;
};

// Parses and validates a network description. Structural JSON problems and
// unknown keys raise ParseError; topology or policy violations raise
// ModelError listing every violation.
NetworkFile parse_network(const std::string& json_text);
NetworkFile load_network(const std::string& path);
std::string network_to_json(const NetworkFile& net);

// Rule-granularity reduction applied across every policy in the file.
NetworkFile reduce_network(const NetworkFile& net);

// Plan files: the synthesized command sequence plus run statistics. Updates
// reference the policy they install by name (`policy_ref`); the referenced
// policy must exist in the network file the plan is checked against.
struct PlanCommand {
  bool wait;
  SwitchId sw;             // update only
  std::string policy_ref;  // update only
};

struct PlanFile {
  std::string algorithm;  // "order", "configpairs", or "refine"
  std::vector<PlanCommand> commands;
  SynthStats stats;
};

PlanFile parse_plan(const std::string& json_text);
PlanFile load_plan(const std::string& path);
std::string plan_to_json(const PlanFile& plan);

// Materializes plan commands against the network's named policies. Unknown
// policy references or switches raise ModelError.
CommandSequence resolve_plan(const PlanFile& plan, const NetworkFile& net);

std::string counterexample_to_json(const Topology& topo,
                                   const PacketSpace& space,
                                   const Counterexample& cex);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace netupdate

#endif  // NETUPDATE_JSON_IO_HPP_
