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
// Operator-facing command line over the shared-library C interface. Stdout
// carries human-readable text; machine artifacts (plans, networks, models)
// go to files.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "netupdate.h"

namespace {

// Exit codes shared by all subcommands.
constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitPrecondition = 3;

struct StringOut {
  char* value = nullptr;
  ~StringOut() { nu_string_free(value); }
  char** slot() { return &value; }
  std::string str() const { return value == nullptr ? "" : value; }
};

struct NetworkHandle {
  nu_network* net = nullptr;
  ~NetworkHandle() { nu_network_free(net); }
};

struct FormulaHandle {
  nu_formula* formula = nullptr;
  ~FormulaHandle() { nu_formula_free(formula); }
};

struct PlanHandle {
  nu_plan* plan = nullptr;
  ~PlanHandle() { nu_plan_free(plan); }
};

int input_error(const std::string& context, const StringOut& error) {
  std::cerr << "error: " << context;
  if (!error.str().empty()) std::cerr << ": " << error.str();
  std::cerr << "\n";
  return kExitInput;
}

bool write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

struct CommonArgs {
  std::string network;
  std::string spec;
  std::string initial = "initial";
  std::string final_name = "final";
  bool rule_granularity = false;
};

bool load_inputs(const CommonArgs& args, NetworkHandle& net, FormulaHandle& formula,
                 int& exit_code) {
  StringOut err;
  if (nu_network_load(args.network.c_str(), &net.net, err.slot()) != NU_OK) {
    exit_code = input_error("loading network '" + args.network + "'", err);
    return false;
  }
  if (args.rule_granularity) {
    nu_network* reduced = nullptr;
    StringOut rerr;
    if (nu_network_reduce(net.net, &reduced, rerr.slot()) != NU_OK) {
      exit_code = input_error("rule-granularity reduction", rerr);
      return false;
    }
    nu_network_free(net.net);
    net.net = reduced;
  }
  if (!args.spec.empty()) {
    StringOut serr;
    if (nu_formula_load(args.spec.c_str(), &formula.formula, serr.slot()) != NU_OK) {
      exit_code = input_error("parsing specification '" + args.spec + "'", serr);
      return false;
    }
    StringOut rerr;
    if (nu_formula_resolve(formula.formula, net.net, rerr.slot()) != NU_OK) {
      exit_code = input_error("specification names do not resolve", rerr);
      return false;
    }
  }
  exit_code = kExitOk;
  return true;
}

std::string nusmv_path_or_env(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  const char* env = std::getenv("NETUPDATE_NUSMV");
  return env == nullptr ? "" : env;
}

void print_stats(const nu_synth_stats& stats) {
  std::cout << "  model check calls:   " << stats.model_check_calls << "\n";
  std::cout << "  loop check calls:    " << stats.loop_check_calls << "\n";
  std::cout << "  configs visited:     " << stats.configs_visited << "\n";
  std::cout << "  configs pruned:      " << stats.configs_pruned_by_cex << "\n";
  std::cout << "  wall time:           " << stats.wall_time_ms << " ms\n";
}

int run_synth(const CommonArgs& common, const std::string& algo,
              bool no_cex_learning, std::uint64_t max_visited,
              const std::string& out_path) {
  NetworkHandle net;
  FormulaHandle formula;
  int exit_code;
  if (!load_inputs(common, net, formula, exit_code)) return exit_code;

  nu_synth_options options{};
  options.cex_learning = no_cex_learning ? 0 : 1;
  options.max_visited = max_visited;
  if (algo == "order") {
    options.algorithm = NU_ALGO_ORDER;
  } else if (algo == "configpairs") {
    options.algorithm = NU_ALGO_CONFIG_PAIRS;
  } else if (algo == "refine") {
    options.algorithm = NU_ALGO_REFINE;
  } else {
    std::cerr << "error: unknown algorithm '" << algo << "'\n";
    return kExitInput;
  }

  PlanHandle plan;
  nu_synth_stats stats{};
  StringOut message;
  nu_status status = nu_synthesize(net.net, common.initial.c_str(),
                                   common.final_name.c_str(), formula.formula,
                                   &options, &plan.plan, &stats, message.slot());

  // Failed synthesis still leaves a machine-readable report when --out is
  // given, so pipelines can distinguish "no plan" from "never ran".
  auto write_report = [&](const char* result) {
    if (out_path.empty()) return true;
    nlohmann::ordered_json report;
    report["algorithm"] = algo;
    report["result"] = result;
    report["reason"] = message.str();
    report["stats"] = {{"model_check_calls", stats.model_check_calls},
                       {"loop_check_calls", stats.loop_check_calls},
                       {"configs_visited", stats.configs_visited},
                       {"configs_pruned_by_cex", stats.configs_pruned_by_cex},
                       {"wall_time_ms", stats.wall_time_ms}};
    return write_text(out_path, report.dump(2) + "\n");
  };

  switch (status) {
    case NU_OK: {
      StringOut json;
      nu_plan_to_json(plan.plan, json.slot());
      if (!out_path.empty() && !write_text(out_path, json.str())) {
        std::cerr << "error: cannot write plan to '" << out_path << "'\n";
        return kExitInput;
      }
      std::cout << "plan found: " << nu_plan_command_count(plan.plan)
                << " commands (" << algo << ")\n";
      if (!out_path.empty()) std::cout << "plan written to " << out_path << "\n";
      print_stats(stats);
      return kExitOk;
    }
    case NU_ERR_INFEASIBLE:
      std::cout << "infeasible: " << message.str() << "\n";
      print_stats(stats);
      write_report("infeasible");
      return kExitInfeasible;
    case NU_ERR_PRECONDITION:
      std::cout << "precondition failure: " << message.str() << "\n";
      print_stats(stats);
      write_report("precondition-failure");
      return kExitPrecondition;
    default:
      return input_error("synthesis", message);
  }
}

int run_check(const CommonArgs& common, const std::string& plan_path,
              bool check_final) {
  NetworkHandle net;
  FormulaHandle formula;
  int exit_code;
  if (!load_inputs(common, net, formula, exit_code)) return exit_code;

  PlanHandle plan;
  StringOut perr;
  if (nu_plan_load(plan_path.c_str(), &plan.plan, perr.slot()) != NU_OK) {
    return input_error("loading plan '" + plan_path + "'", perr);
  }
  StringOut diag;
  nu_status status = nu_plan_validate(
      net.net, common.initial.c_str(),
      check_final ? common.final_name.c_str() : nullptr, plan.plan,
      formula.formula, diag.slot());
  if (status == NU_OK) {
    std::cout << "plan is valid\n";
    return kExitOk;
  }
  std::cout << "plan is invalid: " << diag.str() << "\n";
  return kExitInfeasible;
}

int run_simulate(const CommonArgs& common, const std::string& plan_path,
                 std::uint64_t max_packets) {
  NetworkHandle net;
  FormulaHandle formula;
  int exit_code;
  if (!load_inputs(common, net, formula, exit_code)) return exit_code;

  PlanHandle plan;
  StringOut perr;
  if (nu_plan_load(plan_path.c_str(), &plan.plan, perr.slot()) != NU_OK) {
    return input_error("loading plan '" + plan_path + "'", perr);
  }
  StringOut diag;
  nu_status status = nu_simulate(net.net, common.initial.c_str(), plan.plan,
                                 formula.formula, max_packets, diag.slot());
  if (status == NU_OK) {
    std::cout << "simulation found no violation\n";
    return kExitOk;
  }
  if (status == NU_ERR_PRECONDITION) {
    std::cout << "simulation inconclusive: " << diag.str() << "\n";
    return kExitPrecondition;
  }
  std::cout << "simulation found a violation: " << diag.str() << "\n";
  return kExitInfeasible;
}

int run_bench(std::uint64_t nodes, std::uint64_t updating, std::uint64_t ingress,
              bool impossible, std::uint64_t seed, const std::string& out_prefix) {
  StringOut network, spec, err;
  nu_status status = nu_bench_generate(nodes, updating, ingress,
                                       impossible ? 1 : 0, seed,
                                       network.slot(), spec.slot(), err.slot());
  if (status != NU_OK) return input_error("benchmark generation", err);
  std::string net_path = out_prefix + ".json";
  std::string spec_path = out_prefix + ".ltl";
  if (!write_text(net_path, network.str()) || !write_text(spec_path, spec.str())) {
    std::cerr << "error: cannot write benchmark files '" << out_prefix << ".*'\n";
    return kExitInput;
  }
  std::cout << "benchmark written to " << net_path << " and " << spec_path << "\n";
  return kExitOk;
}

int run_emit_nusmv(const CommonArgs& common, const std::string& out_path) {
  NetworkHandle net;
  FormulaHandle formula;
  int exit_code;
  if (!load_inputs(common, net, formula, exit_code)) return exit_code;

  StringOut model, err;
  if (nu_emit_nusmv(net.net, common.initial.c_str(), formula.formula,
                    model.slot(), err.slot()) != NU_OK) {
    return input_error("model emission", err);
  }
  if (out_path.empty()) {
    std::cout << model.str();
  } else if (!write_text(out_path, model.str())) {
    std::cerr << "error: cannot write model to '" << out_path << "'\n";
    return kExitInput;
  } else {
    std::cout << "model written to " << out_path << "\n";
  }
  return kExitOk;
}

// Optional job file: {"network": ..., "spec": ..., "algorithm": ...,
// "options": {...}, "output": ...}. Flags given on the command line win.
struct JobFile {
  std::string network, spec, algorithm, output;
  bool rule_granularity = false;
  bool cex_learning = true;
  std::uint64_t max_visited = 0;
};

bool read_job_file(const std::string& path, JobFile& job, std::string& error) {
  std::ifstream in(path);
  if (!in) {
    error = "cannot open job file";
    return false;
  }
  nlohmann::json root;
  try {
    in >> root;
  } catch (const std::exception& e) {
    error = e.what();
    return false;
  }
  if (!root.is_object()) {
    error = "job file must be a JSON object";
    return false;
  }
  for (const auto& [key, value] : root.items()) {
    if (key == "network") {
      job.network = value.get<std::string>();
    } else if (key == "spec") {
      job.spec = value.get<std::string>();
    } else if (key == "algorithm") {
      job.algorithm = value.get<std::string>();
    } else if (key == "output") {
      job.output = value.get<std::string>();
    } else if (key == "options") {
      for (const auto& [opt, v] : value.items()) {
        if (opt == "cex_learning") {
          job.cex_learning = v.get<bool>();
        } else if (opt == "rule_granularity") {
          job.rule_granularity = v.get<bool>();
        } else if (opt == "max_visited") {
          job.max_visited = v.get<std::uint64_t>();
        } else {
          error = "unknown option '" + opt + "' in job file";
          return false;
        }
      }
    } else {
      error = "unknown key '" + key + "' in job file";
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesizes and checks invariant-preserving network update plans"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string algo = "order";
  std::string out_path;
  std::string plan_path;
  std::string job_path;
  std::string nusmv_flag;
  bool no_cex_learning = false;
  std::uint64_t max_visited = 0;
  std::uint64_t max_packets = 100000;

  auto add_common = [&](CLI::App* cmd, bool spec_required) {
    cmd->add_option("--network", common.network, "network description file")
        ->required();
    auto* spec = cmd->add_option("--spec", common.spec, "LTL specification file");
    if (spec_required) spec->required();
    cmd->add_option("--initial", common.initial, "initial policy name");
    cmd->add_option("--final", common.final_name, "final policy name");
    cmd->add_flag("--rule-granularity", common.rule_granularity,
                  "reduce rules to pseudo-switches before the operation");
  };

  CLI::App* synth = app.add_subcommand("synth", "synthesize an update plan");
  add_common(synth, /*spec_required=*/false);
  synth->get_option("--network")->required(false);  // may come from --job
  synth->add_option("--algo", algo, "order | configpairs | refine");
  synth->add_option("--out", out_path, "plan output file");
  synth->add_flag("--no-cex-learning", no_cex_learning,
                  "disable counterexample cube pruning");
  synth->add_option("--max-visited", max_visited,
                    "abort after visiting this many configurations (0 = off)");
  synth->add_option("--job", job_path, "job file supplying inputs and options");

  CLI::App* check = app.add_subcommand("check", "validate a plan file");
  add_common(check, /*spec_required=*/true);
  check->add_option("--plan", plan_path, "plan file to validate")->required();
  bool check_final = false;
  check->add_flag("--check-final", check_final,
                  "also require the plan to end at the final policy");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "cross-check a plan against the transition-system oracle");
  add_common(simulate, /*spec_required=*/true);
  simulate->add_option("--plan", plan_path, "plan file to simulate")->required();
  simulate->add_option("--max-packets", max_packets,
                       "bound on extracted packet traces");

  std::uint64_t bench_nodes = 100, bench_updating = 8, bench_ingress = 3,
                bench_seed = 0;
  bool bench_impossible = false;
  std::string bench_out = "bench";
  CLI::App* bench = app.add_subcommand("bench", "generate a benchmark instance");
  bench->add_option("--nodes", bench_nodes, "total switches (N)")->required();
  bench->add_option("--updating", bench_updating, "differing switches (M)")
      ->required();
  bench->add_option("--ingress", bench_ingress, "ingress regions");
  bench->add_flag("--impossible", bench_impossible,
                  "final configuration drops packets at their gateway");
  bench->add_option("--seed", bench_seed, "instance seed");
  bench->add_option("--out", bench_out, "output prefix (.json and .ltl)");

  CLI::App* emit = app.add_subcommand("emit-nusmv",
                                      "emit a NuSMV model of one configuration");
  add_common(emit, /*spec_required=*/true);
  emit->add_option("--out", out_path, "model output file (stdout when absent)");
  emit->add_option("--nusmv-path", nusmv_flag,
                   "run this NuSMV binary on the emitted model");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    if (!job_path.empty()) {
      JobFile job;
      std::string error;
      if (!read_job_file(job_path, job, error)) {
        std::cerr << "error: job file '" << job_path << "': " << error << "\n";
        return kExitInput;
      }
      if (common.network.empty()) common.network = job.network;
      if (common.spec.empty()) common.spec = job.spec;
      if (synth->get_option("--algo")->count() == 0 && !job.algorithm.empty()) {
        algo = job.algorithm;
      }
      if (out_path.empty()) out_path = job.output;
      if (!common.rule_granularity) common.rule_granularity = job.rule_granularity;
      if (!no_cex_learning) no_cex_learning = !job.cex_learning;
      if (max_visited == 0) max_visited = job.max_visited;
    }
    if (common.network.empty() || common.spec.empty()) {
      std::cerr << "error: synth requires --network and --spec (or a --job file)\n";
      return kExitInput;
    }
    return run_synth(common, algo, no_cex_learning, max_visited, out_path);
  }
  if (check->parsed()) return run_check(common, plan_path, check_final);
  if (simulate->parsed()) return run_simulate(common, plan_path, max_packets);
  if (bench->parsed()) {
    return run_bench(bench_nodes, bench_updating, bench_ingress, bench_impossible,
                     bench_seed, bench_out);
  }
  if (emit->parsed()) {
    std::string nusmv = nusmv_path_or_env(nusmv_flag);
    int rc = run_emit_nusmv(common, out_path);
    if (rc != kExitOk || nusmv.empty()) return rc;
    NetworkHandle net;
    FormulaHandle formula;
    int exit_code;
    if (!load_inputs(common, net, formula, exit_code)) return exit_code;
    int verdict = 0;
    StringOut detail;
    nu_status status = nu_run_nusmv(net.net, common.initial.c_str(),
                                    formula.formula, nusmv.c_str(), &verdict,
                                    detail.slot());
    if (status == NU_ERR_UNAVAILABLE) {
      std::cout << "NuSMV oracle unavailable: " << detail.str() << "\n";
      return kExitPrecondition;
    }
    if (status != NU_OK) return input_error("running NuSMV", detail);
    std::cout << "NuSMV verdict: " << (verdict ? "specification holds" : "violated")
              << "\n";
    return verdict ? kExitOk : kExitInfeasible;
  }
  return kExitInput;
}
