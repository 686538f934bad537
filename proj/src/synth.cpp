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

#include "netupdate/synth.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

namespace netupdate {

bool UpdateStatus::all() const {
  return std::all_of(updated.begin(), updated.end(), [](bool b) { return b; });
}

std::uint64_t UpdateStatus::count() const {
  return static_cast<std::uint64_t>(
      std::count(updated.begin(), updated.end(), true));
}

std::vector<std::pair<NetworkPolicy, SwitchId>> next_policies(
    const Topology& topo, const PacketSpace& space,
    const NetworkPolicy& current, const UpdateStatus& status,
    const NetworkPolicy& final_policy, const std::vector<SwitchId>& diff) {
  std::vector<std::pair<NetworkPolicy, SwitchId>> successors;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (status.updated[i]) continue;
    UpdateCmd upd{diff[i], final_policy.at(diff[i])};
    successors.emplace_back(apply_update(topo, space, current, upd), diff[i]);
  }
  return successors;
}

CexCube analyze_cex(const Counterexample& cex, const UpdateStatus& status,
                    const std::vector<SwitchId>& diff) {
  CexCube cube;
  std::set<SwitchId> traversed(cex.traversed_switches.begin(),
                               cex.traversed_switches.end());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (traversed.count(diff[i])) {
      cube.constraints.emplace_back(diff[i], status.updated[i]);
    }
  }
  if (cube.constraints.empty()) {
    // The violation does not involve any differing switch; excluding more
    // than this exact configuration would be unsound.
    for (std::size_t i = 0; i < diff.size(); ++i) {
      cube.constraints.emplace_back(diff[i], status.updated[i]);
    }
  }
  return cube;
}

bool matches_wrong(const UpdateStatus& status,
                   const std::vector<CexCube>& cubes,
                   const std::vector<SwitchId>& diff) {
  std::map<SwitchId, bool> bits;
  for (std::size_t i = 0; i < diff.size(); ++i) bits[diff[i]] = status.updated[i];
  for (const CexCube& cube : cubes) {
    bool all_agree = true;
    for (const auto& [sw, required] : cube.constraints) {
      auto it = bits.find(sw);
      if (it == bits.end() || it->second != required) {
        all_agree = false;
        break;
      }
    }
    if (all_agree && !cube.constraints.empty()) return true;
  }
  return false;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct BudgetExceeded {};

CommandSequence plan_from_order(const std::vector<SwitchId>& order,
                                const NetworkPolicy& final_policy,
                                bool with_waits) {
  CommandSequence seq;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && with_waits) seq.push_back(Command::wait());
    seq.push_back(Command::make_update(order[i], final_policy.at(order[i])));
  }
  // Careful sequences interleave a wait after every update; the trailing
  // wait is vacuous because nothing follows it, so plans end on an update.
  return seq;
}

SynthResult plan_result(std::vector<SwitchId> order,
                        const NetworkPolicy& final_policy, bool with_waits) {
  SynthResult r;
  r.outcome = SynthOutcome::kPlan;
  r.plan = plan_from_order(order, final_policy, with_waits);
  r.update_order = std::move(order);
  return r;
}

SynthResult failure(SynthOutcome outcome, std::string reason) {
  SynthResult r;
  r.outcome = outcome;
  r.reason = std::move(reason);
  return r;
}

constexpr const char* kLoopyEndpoints = "Loops in initial or final configuration.";
constexpr const char* kNoSequence = "No simple and careful update sequence exists.";

// Shared scaffolding for the order_update and config_pairs searches.
struct SearchContext {
  const Topology& topo;
  const PacketSpace& space;
  const LtlFormula& f;
  const NetworkPolicy& final_policy;
  std::vector<SwitchId> diff;
  const SynthOptions& opts;

  std::set<std::vector<bool>> visited;
  std::vector<CexCube> cubes;
  SynthStats stats;

  // The final configuration is checked once, the first time the search
  // reaches it; the result is reused by every later leaf.
  bool final_checked = false;
  bool final_ok = false;

  void learn(const Counterexample& cex, const UpdateStatus& status) {
    if (!opts.cex_learning) return;
    CexCube cube = analyze_cex(cex, status, diff);
    if (opts.on_learn) opts.on_learn(cube, status);
    cubes.push_back(std::move(cube));
  }

  // Returns true when the node was seen before. Newly visited nodes count
  // against the search budget.
  bool note_visit(const UpdateStatus& status) {
    if (!visited.insert(status.updated).second) return true;
    stats.configs_visited++;
    if (opts.max_visited != 0 && stats.configs_visited > opts.max_visited) {
      throw BudgetExceeded{};
    }
    return false;
  }

  bool check_final(const NetworkPolicy& final_config, const UpdateStatus& status) {
    if (!final_checked) {
      final_checked = true;
      stats.model_check_calls++;
      Verdict v = model_check(topo, final_config, f, space);
      final_ok = v.ok;
      if (!v.ok) learn(*v.cex, status);
    }
    return final_ok;
  }
};

bool order_dfs(SearchContext& ctx, const NetworkPolicy& policy,
               UpdateStatus& status, const SwitchId* just_updated,
               std::vector<SwitchId>& order_out) {
  if (status.all()) return ctx.check_final(policy, status);
  if (ctx.note_visit(status)) return false;
  if (matches_wrong(status, ctx.cubes, ctx.diff)) {
    ctx.stats.configs_pruned_by_cex++;
    return false;
  }
  if (just_updated != nullptr) {
    ctx.stats.loop_check_calls++;
    Verdict loops = has_new_loops(ctx.topo, policy, ctx.space, *just_updated);
    if (!loops.ok) {
      ctx.learn(*loops.cex, status);
      return false;
    }
  }
  ctx.stats.model_check_calls++;
  Verdict mc = model_check(ctx.topo, policy, ctx.f, ctx.space);
  if (!mc.ok) {
    ctx.learn(*mc.cex, status);
    return false;
  }
  for (auto& [next, sw] : next_policies(ctx.topo, ctx.space, policy, status,
                                        ctx.final_policy, ctx.diff)) {
    std::size_t idx = static_cast<std::size_t>(
        std::lower_bound(ctx.diff.begin(), ctx.diff.end(), sw) - ctx.diff.begin());
    status.updated[idx] = true;
    bool found = order_dfs(ctx, next, status, &sw, order_out);
    status.updated[idx] = false;
    if (found) {
      order_out.insert(order_out.begin(), sw);
      return true;
    }
  }
  return false;
}

}  // namespace

std::pair<SynthResult, SynthStats> order_update(
    const Topology& topo, const NetworkPolicy& initial,
    const NetworkPolicy& final_policy, const LtlFormula& f,
    const PacketSpace& space, const SynthOptions& opts) {
  Clock::time_point start = Clock::now();
  SearchContext ctx{topo, space, f, final_policy,
                    diff_switches(initial, final_policy), opts,
                    {}, {}, {}, false, false};

  ctx.stats.loop_check_calls += 2;
  if (!has_loops(topo, initial, space).ok || !has_loops(topo, final_policy, space).ok) {
    ctx.stats.wall_time_ms = elapsed_ms(start);
    return {failure(SynthOutcome::kPreconditionFailure, kLoopyEndpoints), ctx.stats};
  }

  UpdateStatus status;
  status.updated.assign(ctx.diff.size(), false);
  std::vector<SwitchId> order;
  SynthResult result;
  try {
    if (order_dfs(ctx, initial, status, nullptr, order)) {
      result = plan_result(std::move(order), final_policy, /*with_waits=*/true);
    } else {
      result = failure(SynthOutcome::kInfeasible, kNoSequence);
    }
  } catch (const BudgetExceeded&) {
    result = failure(SynthOutcome::kPreconditionFailure,
                     "Search budget exhausted (max_visited).");
  }
  ctx.stats.wall_time_ms = elapsed_ms(start);
  return {result, ctx.stats};
}

// ---------------------------------------------------------------------------
// ConfigPairs

Verdict check_update_step(const Topology& topo, const PacketSpace& space,
                          const NetworkPolicy& before,
                          const NetworkPolicy& after, const LtlFormula& f) {
  const std::size_t bound = topo.ports.size() + 1;
  std::vector<PortId> sorted_ingress = topo.ingress;
  std::uint64_t universe = space.universe_size();

  for (const PortId& ingress : sorted_ingress) {
    for (std::uint64_t ord = 0; ord < universe; ++ord) {
      Packet pkt = packet_at(space, ord);
      // Longest flip point needed: the length of the pure-`before` trace.
      // Later flips reproduce it exactly.
      std::size_t max_flip = 0;
      {
        LocatedPacket lp{ingress, pkt};
        while (!topo.is_special(lp.port) && max_flip <= bound) {
          lp = policy_lookup(topo, before, lp);
          max_flip++;
        }
      }
      for (std::size_t flip = 0; flip <= max_flip; ++flip) {
        LassoTrace trace;
        LocatedPacket lp{ingress, pkt};
        trace.states.push_back(lp);
        std::size_t moves = 0;
        while (!topo.is_special(lp.port)) {
          const NetworkPolicy& pol = moves < flip ? before : after;
          lp = policy_lookup(topo, pol, lp);
          trace.states.push_back(lp);
          if (++moves > bound) break;
        }
        if (!topo.is_special(lp.port)) {
          Counterexample cex;
          cex.kind = CexKind::kLoop;
          cex.trace = std::move(trace);
          cex.traversed_switches = switches_on_trace(topo, cex.trace);
          return Verdict::fail(std::move(cex));
        }
        if (!eval_lasso(f, trace, space)) {
          Counterexample cex;
          cex.kind = CexKind::kPropertyViolation;
          cex.trace = std::move(trace);
          cex.traversed_switches = switches_on_trace(topo, cex.trace);
          return Verdict::fail(std::move(cex));
        }
      }
    }
  }
  return Verdict::pass();
}

namespace {

bool config_pairs_dfs(SearchContext& ctx, const NetworkPolicy& policy,
                      UpdateStatus& status, std::vector<SwitchId>& order_out) {
  if (status.all()) return ctx.check_final(policy, status);
  if (ctx.note_visit(status)) return false;
  if (matches_wrong(status, ctx.cubes, ctx.diff)) {
    ctx.stats.configs_pruned_by_cex++;
    return false;
  }
  for (auto& [next, sw] : next_policies(ctx.topo, ctx.space, policy, status,
                                        ctx.final_policy, ctx.diff)) {
    ctx.stats.model_check_calls++;
    Verdict step = check_update_step(ctx.topo, ctx.space, policy, next, ctx.f);
    if (!step.ok) {
      // Only violations that avoid the flipping switch are config-pure and
      // therefore safe to generalize into a cube.
      const auto& traversed = step.cex->traversed_switches;
      if (std::find(traversed.begin(), traversed.end(), sw) == traversed.end()) {
        ctx.learn(*step.cex, status);
      }
      continue;
    }
    std::size_t idx = static_cast<std::size_t>(
        std::lower_bound(ctx.diff.begin(), ctx.diff.end(), sw) - ctx.diff.begin());
    status.updated[idx] = true;
    bool found = config_pairs_dfs(ctx, next, status, order_out);
    status.updated[idx] = false;
    if (found) {
      order_out.insert(order_out.begin(), sw);
      return true;
    }
  }
  return false;
}

}  // namespace

std::pair<SynthResult, SynthStats> config_pairs(
    const Topology& topo, const NetworkPolicy& initial,
    const NetworkPolicy& final_policy, const LtlFormula& f,
    const PacketSpace& space, const SynthOptions& opts) {
  Clock::time_point start = Clock::now();
  SearchContext ctx{topo, space, f, final_policy,
                    diff_switches(initial, final_policy), opts,
                    {}, {}, {}, false, false};

  ctx.stats.loop_check_calls += 2;
  if (!has_loops(topo, initial, space).ok || !has_loops(topo, final_policy, space).ok) {
    ctx.stats.wall_time_ms = elapsed_ms(start);
    return {failure(SynthOutcome::kPreconditionFailure, kLoopyEndpoints), ctx.stats};
  }

  UpdateStatus status;
  status.updated.assign(ctx.diff.size(), false);
  std::vector<SwitchId> order;
  SynthResult result;
  try {
    if (config_pairs_dfs(ctx, initial, status, order)) {
      result = plan_result(std::move(order), final_policy, /*with_waits=*/false);
    } else {
      result = failure(SynthOutcome::kInfeasible, kNoSequence);
    }
  } catch (const BudgetExceeded&) {
    result = failure(SynthOutcome::kPreconditionFailure,
                     "Search budget exhausted (max_visited).");
  }
  ctx.stats.wall_time_ms = elapsed_ms(start);
  return {result, ctx.stats};
}

// ---------------------------------------------------------------------------
// Refine

namespace {

struct RefineViolation {
  std::vector<SwitchId> prefix;
};

class RefineSearch {
 public:
  RefineSearch(const Topology& topo, const NetworkPolicy& initial,
               const NetworkPolicy& final_policy, const LtlFormula& f,
               const PacketSpace& space, const SynthOptions& opts)
      : topo_(topo), initial_(initial), final_(final_policy), f_(f),
        space_(space), opts_(opts), diff_(diff_switches(initial, final_policy)) {}

  std::pair<SynthResult, SynthStats> run() {
    Clock::time_point start = Clock::now();
    stats_.loop_check_calls += 2;
    if (!has_loops(topo_, initial_, space_).ok ||
        !has_loops(topo_, final_, space_).ok) {
      stats_.wall_time_ms = elapsed_ms(start);
      return {failure(SynthOutcome::kPreconditionFailure, kLoopyEndpoints), stats_};
    }

    SynthResult result;
    try {
      while (true) {
        std::vector<SwitchId> prefix;
        UpdateStatus status;
        status.updated.assign(diff_.size(), false);
        std::vector<SwitchId> order;
        bool found;
        try {
          found = dfs(initial_, status, prefix, order);
        } catch (RefineViolation& v) {
          forbidden_.push_back(std::move(v.prefix));
          continue;  // re-search the refined model
        }
        result = found ? plan_result(std::move(order), final_, /*with_waits=*/true)
                       : failure(SynthOutcome::kInfeasible, kNoSequence);
        break;
      }
    } catch (const BudgetExceeded&) {
      result = failure(SynthOutcome::kPreconditionFailure,
                       "Search budget exhausted (max_visited).");
    }
    stats_.configs_visited = static_cast<std::uint64_t>(statuses_seen_.size());
    stats_.wall_time_ms = elapsed_ms(start);
    return {result, stats_};
  }

 private:
  bool forbidden_prefix(const std::vector<SwitchId>& prefix) const {
    for (const auto& banned : forbidden_) {
      if (banned.size() <= prefix.size() &&
          std::equal(banned.begin(), banned.end(), prefix.begin())) {
        return true;
      }
    }
    return false;
  }

  // The violation check for extending the order with one switch: the switch
  // may flip while a packet is in flight, so the step is verified over
  // hybrid traces. Results are cached across re-searches.
  const Verdict& step_verdict(const NetworkPolicy& before,
                              const NetworkPolicy& after,
                              const UpdateStatus& status, std::size_t sw_idx) {
    std::pair<std::vector<bool>, std::size_t> key{status.updated, sw_idx};
    auto it = step_cache_.find(key);
    if (it != step_cache_.end()) return it->second;
    stats_.model_check_calls++;
    Verdict v = check_update_step(topo_, space_, before, after, f_);
    return step_cache_.emplace(std::move(key), std::move(v)).first->second;
  }

  bool dfs(const NetworkPolicy& policy, UpdateStatus& status,
           std::vector<SwitchId>& prefix, std::vector<SwitchId>& order_out) {
    statuses_seen_.insert(status.updated);
    if (opts_.max_visited != 0 && nodes_visited_++ > opts_.max_visited) {
      throw BudgetExceeded{};
    }
    if (status.all()) {
      if (!final_checked_) {
        final_checked_ = true;
        stats_.model_check_calls++;
        final_ok_ = model_check(topo_, policy, f_, space_).ok;
      }
      return final_ok_;
    }
    for (std::size_t i = 0; i < diff_.size(); ++i) {
      if (status.updated[i]) continue;
      prefix.push_back(diff_[i]);
      if (forbidden_prefix(prefix)) {
        stats_.configs_pruned_by_cex++;
        prefix.pop_back();
        continue;
      }
      NetworkPolicy next = apply_update(
          topo_, space_, policy, UpdateCmd{diff_[i], final_.at(diff_[i])});
      const Verdict& v = step_verdict(policy, next, status, i);
      if (!v.ok) {
        // A reachable violating trace: exclude this update order prefix and
        // start over on the refined model.
        throw RefineViolation{prefix};
      }
      status.updated[i] = true;
      bool found = dfs(next, status, prefix, order_out);
      status.updated[i] = false;
      if (found) {
        order_out.insert(order_out.begin(), diff_[i]);
        prefix.pop_back();
        return true;
      }
      prefix.pop_back();
    }
    return false;
  }

  const Topology& topo_;
  const NetworkPolicy& initial_;
  const NetworkPolicy& final_;
  const LtlFormula& f_;
  const PacketSpace& space_;
  const SynthOptions& opts_;
  std::vector<SwitchId> diff_;

  std::vector<std::vector<SwitchId>> forbidden_;
  std::map<std::pair<std::vector<bool>, std::size_t>, Verdict> step_cache_;
  std::set<std::vector<bool>> statuses_seen_;
  std::uint64_t nodes_visited_ = 0;
  bool final_checked_ = false;
  bool final_ok_ = false;
  SynthStats stats_;
};

}  // namespace

std::pair<SynthResult, SynthStats> refine(
    const Topology& topo, const NetworkPolicy& initial,
    const NetworkPolicy& final_policy, const LtlFormula& f,
    const PacketSpace& space, const SynthOptions& opts) {
  return RefineSearch(topo, initial, final_policy, f, space, opts).run();
}

}  // namespace netupdate
