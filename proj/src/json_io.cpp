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

#include "netupdate/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace netupdate {

// Field and domain order in the file is semantic (it fixes packet
// enumeration order), so parsing must preserve object key order.
using Json = nlohmann::ordered_json;

namespace {

void expect_keys(const Json& obj, const std::set<std::string>& allowed,
                 const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ParseError("unknown key '" + key + "' in " + where);
    }
  }
}

const Json& require(const Json& obj, const std::string& key,
                    const std::string& where) {
  if (!obj.contains(key)) {
    throw ParseError("missing key '" + key + "' in " + where);
  }
  return obj.at(key);
}

std::string as_string(const Json& v, const std::string& where) {
  if (!v.is_string()) throw ParseError(where + " must be a string");
  return v.get<std::string>();
}

std::vector<std::string> as_string_list(const Json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const Json& item : v) out.push_back(as_string(item, where + " entry"));
  return out;
}

std::vector<FieldAssignment> parse_assignments(const Json& obj,
                                               const PacketSpace& space,
                                               const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + " must be an object");
  std::vector<FieldAssignment> out;
  for (const auto& [field, value] : obj.items()) {
    int fi = space.field_index(field);
    if (fi < 0) throw ParseError(where + " references unknown field '" + field + "'");
    int vi = space.value_index(fi, as_string(value, where + "." + field));
    if (vi < 0) {
      throw ParseError(where + " assigns unknown value '" +
                       value.get<std::string>() + "' to field '" + field + "'");
    }
    out.push_back(FieldAssignment{fi, vi});
  }
  std::sort(out.begin(), out.end());
  return out;
}

Rule parse_rule(const Json& obj, const PacketSpace& space,
                const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + " must be an object");
  expect_keys(obj, {"key", "in_port", "guard", "rewrites", "out_port"}, where);
  Rule rule;
  rule.key = as_string(require(obj, "key", where), where + ".key");
  rule.in_port = as_string(require(obj, "in_port", where), where + ".in_port");
  rule.out_port = as_string(require(obj, "out_port", where), where + ".out_port");
  rule.guard = parse_assignments(require(obj, "guard", where), space, where + ".guard");
  rule.rewrites =
      parse_assignments(require(obj, "rewrites", where), space, where + ".rewrites");
  return rule;
}

Json assignments_to_json(const std::vector<FieldAssignment>& list,
                         const PacketSpace& space) {
  Json obj = Json::object();
  for (const FieldAssignment& fa : list) {
    obj[space.field_name(fa.field)] = space.value_name(fa.field, fa.value);
  }
  return obj;
}

}  // namespace

NetworkFile parse_network(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("network file must be a JSON object");
  expect_keys(root,
              {"fields", "ports", "switches", "inport", "outport", "ingress",
               "world", "drop", "policies"},
              "network file");

  NetworkFile net;

  const Json& fields = require(root, "fields", "network file");
  if (!fields.is_object()) throw ParseError("'fields' must be an object");
  std::vector<PacketField> pf;
  for (const auto& [name, values] : fields.items()) {
    pf.push_back(PacketField{name, as_string_list(values, "field '" + name + "'")});
  }
  net.space = PacketSpace(std::move(pf));

  net.topo.ports = as_string_list(require(root, "ports", "network file"), "'ports'");
  net.topo.switches =
      as_string_list(require(root, "switches", "network file"), "'switches'");
  net.topo.ingress =
      as_string_list(require(root, "ingress", "network file"), "'ingress'");
  net.topo.world = as_string(require(root, "world", "network file"), "'world'");
  net.topo.drop = as_string(require(root, "drop", "network file"), "'drop'");
  std::sort(net.topo.ports.begin(), net.topo.ports.end());
  std::sort(net.topo.switches.begin(), net.topo.switches.end());
  std::sort(net.topo.ingress.begin(), net.topo.ingress.end());

  for (const char* rel : {"inport", "outport"}) {
    const Json& rows = require(root, rel, "network file");
    if (!rows.is_array()) throw ParseError(std::string("'") + rel + "' must be an array");
    for (const Json& row : rows) {
      if (!row.is_array() || row.size() != 2) {
        throw ParseError(std::string("'") + rel + "' rows must be two-element arrays");
      }
      std::string a = as_string(row[0], rel);
      std::string b = as_string(row[1], rel);
      if (std::string(rel) == "inport") {
        net.topo.inport.emplace_back(a, b);
      } else {
        net.topo.outport.emplace_back(a, b);
      }
    }
  }
  std::sort(net.topo.inport.begin(), net.topo.inport.end());
  std::sort(net.topo.outport.begin(), net.topo.outport.end());

  std::vector<std::string> violations = validate_topology(net.topo, net.space);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid topology:";
    for (const std::string& v : violations) msg << "\n  - " << v;
    throw ModelError(msg.str());
  }

  const Json& policies = require(root, "policies", "network file");
  if (!policies.is_object()) throw ParseError("'policies' must be an object");
  for (const auto& [pname, tables] : policies.items()) {
    if (!tables.is_object()) {
      throw ParseError("policy '" + pname + "' must map switches to rule lists");
    }
    NetworkPolicy policy;
    for (const auto& [sw, rules] : tables.items()) {
      if (!rules.is_array()) {
        throw ParseError("policy '" + pname + "' switch '" + sw +
                         "' must be an array of rules");
      }
      SwitchPolicy sp;
      std::size_t i = 0;
      for (const Json& r : rules) {
        sp.rules.push_back(parse_rule(
            r, net.space,
            "policy '" + pname + "' switch '" + sw + "' rule " + std::to_string(i)));
        ++i;
      }
      policy.set(sw, std::move(sp));
    }
    // Switches without an explicit table get the empty (all-drop) table.
    for (const SwitchId& sw : net.topo.switches) {
      if (!policy.has(sw)) policy.set(sw, SwitchPolicy{});
    }
    std::vector<std::string> problems = validate_policy(net.topo, net.space, policy);
    if (!problems.empty()) {
      std::ostringstream msg;
      msg << "invalid policy '" << pname << "':";
      for (const std::string& p : problems) msg << "\n  - " << p;
      throw ModelError(msg.str());
    }
    net.policies.emplace(pname, std::move(policy));
  }
  return net;
}

namespace {

Json network_to_json_obj(const NetworkFile& net) {
  Json root = Json::object();
  Json fields = Json::object();
  for (const PacketField& f : net.space.fields()) fields[f.name] = f.values;
  root["fields"] = std::move(fields);
  root["ports"] = net.topo.ports;
  root["switches"] = net.topo.switches;
  Json inport = Json::array();
  for (const auto& [p, s] : net.topo.inport) inport.push_back(Json::array({p, s}));
  root["inport"] = std::move(inport);
  Json outport = Json::array();
  for (const auto& [s, p] : net.topo.outport) outport.push_back(Json::array({s, p}));
  root["outport"] = std::move(outport);
  root["ingress"] = net.topo.ingress;
  root["world"] = net.topo.world;
  root["drop"] = net.topo.drop;
  Json policies = Json::object();
  for (const auto& [pname, policy] : net.policies) {
    Json tables = Json::object();
    for (const auto& [sw, sp] : policy.table()) {
      if (sp.rules.empty()) continue;
      Json rules = Json::array();
      for (const Rule& r : sp.rules) {
        Json rule = Json::object();
        rule["key"] = r.key;
        rule["in_port"] = r.in_port;
        rule["guard"] = assignments_to_json(r.guard, net.space);
        rule["rewrites"] = assignments_to_json(r.rewrites, net.space);
        rule["out_port"] = r.out_port;
        rules.push_back(std::move(rule));
      }
      tables[sw] = std::move(rules);
    }
    policies[pname] = std::move(tables);
  }
  root["policies"] = std::move(policies);
  return root;
}

}  // namespace

std::string network_to_json(const NetworkFile& net) {
  return network_to_json_obj(net).dump(2) + "\n";
}

NetworkFile load_network(const std::string& path) {
  return parse_network(read_file(path));
}

NetworkFile reduce_network(const NetworkFile& net) {
  std::vector<std::string> names;
  std::vector<NetworkPolicy> policies;
  for (const auto& [name, policy] : net.policies) {
    names.push_back(name);
    policies.push_back(policy);
  }
  ReducedNetwork reduced = rule_granularity_reduce(net.topo, net.space, policies);
  NetworkFile out;
  out.topo = std::move(reduced.topo);
  out.space = net.space;
  for (std::size_t i = 0; i < names.size(); ++i) {
    out.policies.emplace(names[i], std::move(reduced.policies[i]));
  }
  return out;
}

PlanFile parse_plan(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("plan file must be a JSON object");
  expect_keys(root, {"algorithm", "commands", "stats"}, "plan file");
  PlanFile plan;
  plan.algorithm = as_string(require(root, "algorithm", "plan file"), "'algorithm'");
  const Json& commands = require(root, "commands", "plan file");
  if (!commands.is_array()) throw ParseError("'commands' must be an array");
  for (const Json& c : commands) {
    if (!c.is_object()) throw ParseError("plan commands must be objects");
    std::string type = as_string(require(c, "type", "plan command"), "'type'");
    if (type == "wait") {
      expect_keys(c, {"type"}, "wait command");
      plan.commands.push_back(PlanCommand{true, "", ""});
    } else if (type == "update") {
      expect_keys(c, {"type", "switch", "policy-ref"}, "update command");
      plan.commands.push_back(PlanCommand{
          false, as_string(require(c, "switch", "update command"), "'switch'"),
          as_string(require(c, "policy-ref", "update command"), "'policy-ref'")});
    } else {
      throw ParseError("unknown command type '" + type + "'");
    }
  }
  if (root.contains("stats")) {
    const Json& stats = root.at("stats");
    expect_keys(stats,
                {"model_check_calls", "loop_check_calls", "configs_visited",
                 "configs_pruned_by_cex", "wall_time_ms"},
                "plan stats");
    auto num = [&](const char* key) -> std::uint64_t {
      return stats.contains(key) ? stats.at(key).get<std::uint64_t>() : 0;
    };
    plan.stats.model_check_calls = num("model_check_calls");
    plan.stats.loop_check_calls = num("loop_check_calls");
    plan.stats.configs_visited = num("configs_visited");
    plan.stats.configs_pruned_by_cex = num("configs_pruned_by_cex");
    plan.stats.wall_time_ms =
        stats.contains("wall_time_ms") ? stats.at("wall_time_ms").get<double>() : 0.0;
  }
  return plan;
}

PlanFile load_plan(const std::string& path) { return parse_plan(read_file(path)); }

std::string plan_to_json(const PlanFile& plan) {
  Json root = Json::object();
  root["algorithm"] = plan.algorithm;
  Json commands = Json::array();
  for (const PlanCommand& c : plan.commands) {
    Json cmd = Json::object();
    if (c.wait) {
      cmd["type"] = "wait";
    } else {
      cmd["type"] = "update";
      cmd["switch"] = c.sw;
      cmd["policy-ref"] = c.policy_ref;
    }
    commands.push_back(std::move(cmd));
  }
  root["commands"] = std::move(commands);
  Json stats = Json::object();
  stats["model_check_calls"] = plan.stats.model_check_calls;
  stats["loop_check_calls"] = plan.stats.loop_check_calls;
  stats["configs_visited"] = plan.stats.configs_visited;
  stats["configs_pruned_by_cex"] = plan.stats.configs_pruned_by_cex;
  stats["wall_time_ms"] = plan.stats.wall_time_ms;
  root["stats"] = std::move(stats);
  return root.dump(2) + "\n";
}

CommandSequence resolve_plan(const PlanFile& plan, const NetworkFile& net) {
  CommandSequence seq;
  for (const PlanCommand& c : plan.commands) {
    if (c.wait) {
      seq.push_back(Command::wait());
      continue;
    }
    auto it = net.policies.find(c.policy_ref);
    if (it == net.policies.end()) {
      throw ModelError("plan references unknown policy '" + c.policy_ref + "'");
    }
    if (!it->second.has(c.sw)) {
      throw ModelError("policy '" + c.policy_ref + "' has no entry for switch '" +
                       c.sw + "'");
    }
    seq.push_back(Command::make_update(c.sw, it->second.at(c.sw)));
  }
  return seq;
}

std::string counterexample_to_json(const Topology& topo,
                                   const PacketSpace& space,
                                   const Counterexample& cex) {
  (void)topo;
  Json root = Json::object();
  root["kind"] = cex.kind == CexKind::kLoop ? "loop" : "property-violation";
  Json trace = Json::array();
  for (const LocatedPacket& lp : cex.trace.states) {
    Json state = Json::object();
    state["port"] = lp.port;
    Json packet = Json::object();
    for (std::size_t i = 0; i < space.field_count(); ++i) {
      packet[space.field_name(static_cast<int>(i))] =
          space.value_name(static_cast<int>(i), lp.packet.values[i]);
    }
    state["packet"] = std::move(packet);
    trace.push_back(std::move(state));
  }
  root["trace"] = std::move(trace);
  root["switches"] = cex.traversed_switches;
  return root.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  std::ostringstream data;
  data << in.rdbuf();
  return data.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write file '" + path + "'");
  out << content;
  if (!out) throw ParseError("failed while writing file '" + path + "'");
}

}  // namespace netupdate
