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

#include "netupdate.h"

#include <cstdlib>
#include <cstring>
#include <sstream>

#include "netupdate/bench.hpp"
#include "netupdate/checker.hpp"
#include "netupdate/json_io.hpp"
#include "netupdate/ltl.hpp"
#include "netupdate/nusmv.hpp"
#include "netupdate/synth.hpp"

using namespace netupdate;

struct nu_network {
  NetworkFile file;
};

struct nu_formula {
  LtlPtr formula;
};

struct nu_plan {
  PlanFile file;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_error(char** slot, const std::string& message) {
  if (slot != nullptr) *slot = dup_string(message);
}

// Maps C++ exceptions at the library boundary onto status codes.
template <typename Fn>
nu_status guarded(char** error, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    set_error(error, e.what());
    return NU_ERR_PARSE;
  } catch (const ModelError& e) {
    set_error(error, e.what());
    return NU_ERR_VALIDATION;
  } catch (const ResolutionError& e) {
    set_error(error, e.what());
    return NU_ERR_VALIDATION;
  } catch (const std::exception& e) {
    set_error(error, e.what());
    return NU_ERR_INTERNAL;
  }
}

const NetworkPolicy* find_policy(const NetworkFile& net, const char* name,
                                 char** error) {
  if (name == nullptr) {
    set_error(error, "policy name is null");
    return nullptr;
  }
  auto it = net.policies.find(name);
  if (it == net.policies.end()) {
    set_error(error, "network file has no policy named '" + std::string(name) + "'");
    return nullptr;
  }
  return &it->second;
}

}  // namespace

extern "C" {

const char* nu_status_name(nu_status status) {
  switch (status) {
    case NU_OK: return "ok";
    case NU_ERR_IO: return "io-error";
    case NU_ERR_PARSE: return "parse-error";
    case NU_ERR_VALIDATION: return "validation-error";
    case NU_ERR_INFEASIBLE: return "infeasible";
    case NU_ERR_PRECONDITION: return "precondition-failure";
    case NU_ERR_UNAVAILABLE: return "unavailable";
    case NU_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

void nu_string_free(char* s) { ::free(s); }

nu_status nu_network_parse(const char* json_text, nu_network** out, char** error) {
  if (json_text == nullptr || out == nullptr) {
    set_error(error, "null argument");
    return NU_ERR_INTERNAL;
  }
  return guarded(error, [&]() {
    auto* net = new nu_network{parse_network(json_text)};
    *out = net;
    return NU_OK;
  });
}

nu_status nu_network_load(const char* path, nu_network** out, char** error) {
  if (path == nullptr || out == nullptr) {
    set_error(error, "null argument");
    return NU_ERR_INTERNAL;
  }
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    set_error(error, e.what());
    return NU_ERR_IO;
  }
  return nu_network_parse(text.c_str(), out, error);
}

void nu_network_free(nu_network* net) { delete net; }

nu_status nu_network_to_json(const nu_network* net, char** json) {
  if (net == nullptr || json == nullptr) return NU_ERR_INTERNAL;
  return guarded(nullptr, [&]() {
    *json = dup_string(network_to_json(net->file));
    return NU_OK;
  });
}

nu_status nu_network_reduce(const nu_network* net, nu_network** out, char** error) {
  if (net == nullptr || out == nullptr) {
    set_error(error, "null argument");
    return NU_ERR_INTERNAL;
  }
  return guarded(error, [&]() {
    *out = new nu_network{reduce_network(net->file)};
    return NU_OK;
  });
}

int nu_network_has_policy(const nu_network* net, const char* name) {
  if (net == nullptr || name == nullptr) return 0;
  return net->file.policies.count(name) ? 1 : 0;
}

nu_status nu_formula_parse(const char* text, nu_formula** out, char** error) {
  if (text == nullptr || out == nullptr) {
    set_error(error, "null argument");
    return NU_ERR_INTERNAL;
  }
  return guarded(error, [&]() {
    *out = new nu_formula{parse_ltl(text)};
    return NU_OK;
  });
}

nu_status nu_formula_load(const char* path, nu_formula** out, char** error) {
  if (path == nullptr || out == nullptr) {
    set_error(error, "null argument");
    return NU_ERR_INTERNAL;
  }
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    set_error(error, e.what());
    return NU_ERR_IO;
  }
  return nu_formula_parse(text.c_str(), out, error);
}

void nu_formula_free(nu_formula* f) { delete f; }

nu_status nu_formula_resolve(const nu_formula* f, const nu_network* net,
                             char** error) {
  if (f == nullptr || net == nullptr) {
    set_error(error, "null argument");
    return NU_ERR_INTERNAL;
  }
  return guarded(error, [&]() {
    std::vector<std::string> problems =
        resolve_names(*f->formula, net->file.topo, net->file.space);
    if (problems.empty()) return NU_OK;
    std::ostringstream msg;
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (i) msg << "\n";
      msg << problems[i];
    }
    set_error(error, msg.str());
    return NU_ERR_VALIDATION;
  });
}

nu_status nu_synthesize(const nu_network* net, const char* initial_policy,
                        const char* final_policy, const nu_formula* f,
                        const nu_synth_options* options, nu_plan** out_plan,
                        nu_synth_stats* stats, char** message) {
  if (net == nullptr || f == nullptr || out_plan == nullptr) {
    set_error(message, "null argument");
    return NU_ERR_INTERNAL;
  }
  *out_plan = nullptr;
  const NetworkPolicy* initial = find_policy(net->file, initial_policy, message);
  const NetworkPolicy* final_pol = find_policy(net->file, final_policy, message);
  if (initial == nullptr || final_pol == nullptr) return NU_ERR_VALIDATION;

  nu_synth_options opts_in{NU_ALGO_ORDER, 1, 0};
  if (options != nullptr) opts_in = *options;
  SynthOptions opts;
  opts.cex_learning = opts_in.cex_learning != 0;
  opts.max_visited = opts_in.max_visited;

  return guarded(message, [&]() {
    std::pair<SynthResult, SynthStats> run;
    const char* algo_name = "order";
    switch (opts_in.algorithm) {
      case NU_ALGO_ORDER:
        run = order_update(net->file.topo, *initial, *final_pol, *f->formula,
                           net->file.space, opts);
        algo_name = "order";
        break;
      case NU_ALGO_CONFIG_PAIRS:
        run = config_pairs(net->file.topo, *initial, *final_pol, *f->formula,
                           net->file.space, opts);
        algo_name = "configpairs";
        break;
      case NU_ALGO_REFINE:
        run = refine(net->file.topo, *initial, *final_pol, *f->formula,
                     net->file.space, opts);
        algo_name = "refine";
        break;
      default:
        set_error(message, "unknown algorithm");
        return NU_ERR_INTERNAL;
    }
    if (stats != nullptr) {
      stats->model_check_calls = run.second.model_check_calls;
      stats->loop_check_calls = run.second.loop_check_calls;
      stats->configs_visited = run.second.configs_visited;
      stats->configs_pruned_by_cex = run.second.configs_pruned_by_cex;
      stats->wall_time_ms = run.second.wall_time_ms;
    }
    switch (run.first.outcome) {
      case SynthOutcome::kPlan: {
        PlanFile plan;
        plan.algorithm = algo_name;
        plan.stats = run.second;
        for (const Command& cmd : run.first.plan) {
          if (cmd.is_wait()) {
            plan.commands.push_back(PlanCommand{true, "", ""});
          } else {
            plan.commands.push_back(
                PlanCommand{false, cmd.update->sw, final_policy});
          }
        }
        *out_plan = new nu_plan{std::move(plan)};
        return NU_OK;
      }
      case SynthOutcome::kInfeasible:
        set_error(message, run.first.reason);
        return NU_ERR_INFEASIBLE;
      case SynthOutcome::kPreconditionFailure:
        set_error(message, run.first.reason);
        return NU_ERR_PRECONDITION;
    }
    return NU_ERR_INTERNAL;
  });
}

nu_status nu_plan_parse(const char* json_text, nu_plan** out, char** error) {
  if (json_text == nullptr || out == nullptr) {
    set_error(error, "null argument");
    return NU_ERR_INTERNAL;
  }
  return guarded(error, [&]() {
    *out = new nu_plan{parse_plan(json_text)};
    return NU_OK;
  });
}

nu_status nu_plan_load(const char* path, nu_plan** out, char** error) {
  if (path == nullptr || out == nullptr) {
    set_error(error, "null argument");
    return NU_ERR_INTERNAL;
  }
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    set_error(error, e.what());
    return NU_ERR_IO;
  }
  return nu_plan_parse(text.c_str(), out, error);
}

void nu_plan_free(nu_plan* plan) { delete plan; }

nu_status nu_plan_to_json(const nu_plan* plan, char** json) {
  if (plan == nullptr || json == nullptr) return NU_ERR_INTERNAL;
  return guarded(nullptr, [&]() {
    *json = dup_string(plan_to_json(plan->file));
    return NU_OK;
  });
}

uint64_t nu_plan_command_count(const nu_plan* plan) {
  return plan == nullptr ? 0 : plan->file.commands.size();
}

nu_status nu_plan_validate(const nu_network* net, const char* initial_policy,
                           const char* final_policy, const nu_plan* plan,
                           const nu_formula* f, char** diagnostics) {
  if (net == nullptr || plan == nullptr || f == nullptr) {
    set_error(diagnostics, "null argument");
    return NU_ERR_INTERNAL;
  }
  const NetworkPolicy* initial = find_policy(net->file, initial_policy, diagnostics);
  if (initial == nullptr) return NU_ERR_VALIDATION;
  const NetworkPolicy* target = nullptr;
  if (final_policy != nullptr) {
    target = find_policy(net->file, final_policy, diagnostics);
    if (target == nullptr) return NU_ERR_VALIDATION;
  }
  return guarded(diagnostics, [&]() {
    CommandSequence seq = resolve_plan(plan->file, net->file);
    PlanCheck check = validate_plan(net->file.topo, *initial, seq, *f->formula,
                                    net->file.space, target);
    if (check.ok) return NU_OK;
    std::ostringstream msg;
    msg << check.reason;
    if (check.cex.has_value()) {
      msg << "\n"
          << counterexample_to_json(net->file.topo, net->file.space, *check.cex);
    }
    set_error(diagnostics, msg.str());
    return NU_ERR_VALIDATION;
  });
}

nu_status nu_simulate(const nu_network* net, const char* initial_policy,
                      const nu_plan* plan, const nu_formula* f,
                      uint64_t max_traces, char** diagnostics) {
  if (net == nullptr || plan == nullptr || f == nullptr) {
    set_error(diagnostics, "null argument");
    return NU_ERR_INTERNAL;
  }
  const NetworkPolicy* initial = find_policy(net->file, initial_policy, diagnostics);
  if (initial == nullptr) return NU_ERR_VALIDATION;
  return guarded(diagnostics, [&]() {
    CommandSequence seq = resolve_plan(plan->file, net->file);
    SimulationResult result =
        simulate_semantics(net->file.topo, *initial, seq, *f->formula,
                           net->file.space, max_traces == 0 ? 100000 : max_traces);
    if (result.budget_exhausted) {
      set_error(diagnostics, "simulation budget exhausted after " +
                                 std::to_string(result.traces_checked) + " traces");
      return NU_ERR_PRECONDITION;
    }
    if (!result.ok) {
      set_error(diagnostics, result.reason);
      return NU_ERR_VALIDATION;
    }
    return NU_OK;
  });
}

nu_status nu_bench_generate(uint64_t nodes, uint64_t updating,
                            uint64_t ingress_count, int impossible,
                            uint64_t seed, char** network_json,
                            char** spec_text, char** error) {
  if (network_json == nullptr || spec_text == nullptr) {
    set_error(error, "null argument");
    return NU_ERR_INTERNAL;
  }
  return guarded(error, [&]() {
    BenchParams params;
    params.total_nodes = nodes;
    params.updating_nodes = updating;
    params.ingress_count = ingress_count == 0 ? 3 : ingress_count;
    params.impossible = impossible != 0;
    params.seed = seed;
    BenchInstance instance = bench_generate(params);
    *network_json = dup_string(network_to_json(instance.net));
    *spec_text = dup_string(instance.spec_text + "\n");
    return NU_OK;
  });
}

nu_status nu_emit_nusmv(const nu_network* net, const char* policy_name,
                        const nu_formula* f, char** model_text, char** error) {
  if (net == nullptr || f == nullptr || model_text == nullptr) {
    set_error(error, "null argument");
    return NU_ERR_INTERNAL;
  }
  const NetworkPolicy* policy = find_policy(net->file, policy_name, error);
  if (policy == nullptr) return NU_ERR_VALIDATION;
  return guarded(error, [&]() {
    NusmvModel model =
        emit_nusmv(net->file.topo, *policy, *f->formula, net->file.space);
    *model_text = dup_string(model.text);
    return NU_OK;
  });
}

nu_status nu_run_nusmv(const nu_network* net, const char* policy_name,
                       const nu_formula* f, const char* binary_path,
                       int* verdict_ok, char** detail) {
  if (net == nullptr || f == nullptr || verdict_ok == nullptr ||
      binary_path == nullptr) {
    set_error(detail, "null argument");
    return NU_ERR_INTERNAL;
  }
  const NetworkPolicy* policy = find_policy(net->file, policy_name, detail);
  if (policy == nullptr) return NU_ERR_VALIDATION;
  return guarded(detail, [&]() {
    NusmvModel model =
        emit_nusmv(net->file.topo, *policy, *f->formula, net->file.space);
    NusmvRun run = run_nusmv(model, binary_path, net->file.space);
    switch (run.status) {
      case NusmvStatus::kOk:
        *verdict_ok = run.verdict.ok ? 1 : 0;
        return NU_OK;
      case NusmvStatus::kUnavailable:
        set_error(detail, run.detail);
        return NU_ERR_UNAVAILABLE;
      case NusmvStatus::kRunFailed:
      case NusmvStatus::kUnparseable:
        set_error(detail, run.detail);
        return NU_ERR_VALIDATION;
    }
    return NU_ERR_INTERNAL;
  });
}

}  // extern "C"
