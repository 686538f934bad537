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

#include "netupdate/bench.hpp"

#include <algorithm>
#include <tuple>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace netupdate {

namespace {

// Hand-rolled generator so instances are identical across platforms and
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

struct Graph {
  std::vector<std::string> nodes;                    // sorted
  std::map<std::string, std::set<std::string>> adj;  // undirected

  void add_edge(const std::string& a, const std::string& b) {
    adj[a].insert(b);
    adj[b].insert(a);
  }
  bool has_edge(const std::string& a, const std::string& b) const {
    auto it = adj.find(a);
    return it != adj.end() && it->second.count(b);
  }
};

std::string pad(std::uint64_t v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

// BFS distances from `target` over the graph minus `removed`.
std::map<std::string, std::uint64_t> bfs_dist(const Graph& g,
                                              const std::string& target,
                                              const std::set<std::string>& removed) {
  std::map<std::string, std::uint64_t> dist;
  if (removed.count(target)) return dist;
  std::deque<std::string> queue{target};
  dist[target] = 0;
  while (!queue.empty()) {
    std::string u = queue.front();
    queue.pop_front();
    auto it = g.adj.find(u);
    if (it == g.adj.end()) continue;
    for (const std::string& v : it->second) {  // std::set: deterministic order
      if (removed.count(v) || dist.count(v)) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

// Next hop of `u` toward `target`: the neighbor closest to the target,
// ties broken by name. Empty when unreachable.
std::string next_hop(const Graph& g, const std::string& u,
                     const std::map<std::string, std::uint64_t>& dist,
                     const std::set<std::string>& removed) {
  std::string best;
  std::uint64_t best_dist = ~0ULL;
  auto it = g.adj.find(u);
  if (it == g.adj.end()) return best;
  for (const std::string& v : it->second) {
    if (removed.count(v)) continue;
    auto dit = dist.find(v);
    if (dit == dist.end()) continue;
    if (dit->second < best_dist) {
      best_dist = dit->second;
      best = v;
    }
  }
  return best;
}

std::string link_port(const std::string& from, const std::string& to) {
  return from + ">" + to;
}

}  // namespace

BenchInstance bench_generate(const BenchParams& params) {
  const std::uint64_t N = params.total_nodes;
  const std::uint64_t M = params.updating_nodes;
  const std::uint64_t k = params.ingress_count;
  if (k < 2) throw ModelError("bench: ingress_count must be at least 2");
  if (M < 1) throw ModelError("bench: updating_nodes must be at least 1");
  if (M >= N) throw ModelError("bench: updating_nodes must be smaller than total_nodes");
  if (params.impossible && M < k) {
    throw ModelError("bench: impossible instances need updating_nodes >= ingress_count");
  }
  const std::uint64_t reroute_target = params.impossible ? M - k : M;

  std::uint64_t core_size = std::max<std::uint64_t>(8, 2 * reroute_target + 6);
  if (N < 2 * k + core_size) {
    // Shrink toward the minimum viable core before giving up.
    if (N >= 2 * k + 8) {
      core_size = N - 2 * k;
    } else {
      throw ModelError("bench: total_nodes too small for ingress_count");
    }
  }
  const std::uint64_t fringe_total = N - k - core_size;
  if (fringe_total < k) {
    throw ModelError("bench: total_nodes leaves no room for fringe nodes");
  }
  if (core_size < k) {
    throw ModelError("bench: ingress_count exceeds the core size");
  }

  // Node names. Anchors are the first `k` core nodes; each region's fringes
  // fan out between its gateway and its anchor.
  std::vector<std::string> cores, gateways;
  for (std::uint64_t i = 0; i < core_size; ++i) cores.push_back("c" + pad(i, 4));
  for (std::uint64_t r = 0; r < k; ++r) gateways.push_back("g" + pad(r, 2));
  std::vector<std::vector<std::string>> fringes(k);
  for (std::uint64_t j = 0; j < fringe_total; ++j) {
    std::uint64_t r = j % k;
    fringes[r].push_back("f" + pad(r, 2) + "_" + pad(j / k, 4));
  }

  std::vector<std::string> dsts;
  for (std::uint64_t r = 0; r < k; ++r) dsts.push_back("n" + pad(r, 2));

  using HopTable = std::map<std::string, std::vector<std::string>>;

  // One construction attempt under a derived topology seed. Returns the
  // graph plus per-destination next hops before and after the removals, or
  // nothing when the removal search cannot hit the reroute target on this
  // topology.
  auto attempt_build =
      [&](std::uint64_t topo_seed) -> std::optional<std::tuple<Graph, HopTable, HopTable>> {
    Rng topo_rng(topo_seed * 0x100000001b3ULL + 0x42ULL);
    Graph g;

    // Sparse connected core: a random spanning tree plus extra edges up to
    // an average degree of about three.
    for (std::uint64_t i = 1; i < core_size; ++i) {
      g.add_edge(cores[i], cores[topo_rng.below(i)]);
    }
    std::uint64_t want_edges = core_size * 3 / 2;
    std::uint64_t have_edges = core_size - 1;
    for (int tries = 0; have_edges < want_edges && tries < 10000; ++tries) {
      const std::string& a = cores[topo_rng.below(core_size)];
      const std::string& b = cores[topo_rng.below(core_size)];
      if (a == b || g.has_edge(a, b)) continue;
      g.add_edge(a, b);
      ++have_edges;
    }
    for (std::uint64_t r = 0; r < k; ++r) {
      for (const std::string& f : fringes[r]) {
        g.add_edge(gateways[r], f);
        g.add_edge(f, cores[r]);  // cores[r] is region r's anchor
      }
    }

    std::vector<std::string> removable(cores.begin() + k, cores.end());

    // Per-destination next hops over the full graph under a removal set.
    auto route = [&](const std::set<std::string>& removed) -> std::optional<HopTable> {
      HopTable hops;
      for (std::uint64_t r = 0; r < k; ++r) {
        auto dist = bfs_dist(g, gateways[r], removed);
        for (const auto& [node, nbrs] : g.adj) {
          if (removed.count(node)) continue;
          if (node == gateways[r]) continue;
          std::string hop = next_hop(g, node, dist, removed);
          if (hop.empty()) return std::nullopt;  // disconnected
          hops[node].resize(k);
          hops[node][r] = hop;
        }
      }
      return hops;
    };

    auto base_routes = route({});
    if (!base_routes.has_value()) return std::nullopt;

    // Removals only reshape routing inside the core: fringe nodes always
    // prefer their anchor (two hops closer than their gateway) and gateways
    // always inject through their lexicographically first fringe, so the
    // differing switches are exactly the core switches whose next hop
    // changes. The removal search therefore runs on the much smaller core
    // subgraph.
    Graph core_graph;
    for (const std::string& c : cores) {
      for (const std::string& nbr : g.adj[c]) {
        if (nbr[0] == 'c') core_graph.add_edge(c, nbr);
      }
    }
    auto core_hops = [&](const std::set<std::string>& removed) -> std::optional<HopTable> {
      HopTable hops;
      for (std::uint64_t r = 0; r < k; ++r) {
        auto dist = bfs_dist(core_graph, cores[r], removed);
        for (const std::string& u : cores) {
          if (removed.count(u)) continue;
          if (!dist.count(u)) return std::nullopt;  // core disconnected
          hops[u].resize(k);
          if (u == cores[r]) continue;  // anchors inject via fringes; stable
          hops[u][r] = next_hop(core_graph, u, dist, removed);
        }
      }
      return hops;
    };
    auto base_core = core_hops({});

    auto count_changed = [&](const HopTable& hops, const std::set<std::string>& removed) {
      std::uint64_t changed = 0;
      for (const auto& [node, hop] : *base_core) {
        if (removed.count(node)) continue;  // removed switches keep old rules
        auto it = hops.find(node);
        if (it != hops.end() && it->second != hop) ++changed;
      }
      return changed;
    };

    // Greedy growth with restarts: add one removal at a time while the
    // reroute count strictly increases and stays at or below the target. A
    // removal typically reroutes several switches at once, so the count
    // rarely lands on the target exactly; the remaining gap is closed by
    // re-breaking shortest-path ties on switches the removals left unchanged
    // (the alternative hop is equally short, so the rerouted policy is still
    // a shortest-path policy).
    std::set<std::string> removed;
    // (switch, dst index) -> forced next hop.
    std::map<std::pair<std::string, std::uint64_t>, std::string> tie_flips;
    bool found = reroute_target == 0;
    for (std::uint64_t restart = 0; restart < 40 && !found; ++restart) {
      Rng rng(topo_seed * 0x9e3779b1ULL + restart * 0x85ebca77ULL + 1);
      std::set<std::string> current;
      std::uint64_t current_changed = 0;
      for (int step = 0; step < 200 && current_changed < reroute_target; ++step) {
        if (current.size() >= reroute_target) break;  // keep removals sparse
        const std::string& x = removable[rng.below(removable.size())];
        if (current.count(x)) continue;
        std::set<std::string> trial = current;
        trial.insert(x);
        auto hops = core_hops(trial);
        if (!hops.has_value()) continue;
        std::uint64_t changed = count_changed(*hops, trial);
        if (changed > reroute_target || changed <= current_changed) continue;
        current = std::move(trial);
        current_changed = changed;
      }
      std::uint64_t gap = reroute_target - current_changed;
      if (gap == 0) {
        removed = current;
        found = true;
        break;
      }
      // Tie flips for the remaining gap, chosen deterministically.
      auto hops = core_hops(current);
      if (!hops.has_value()) continue;
      std::map<std::pair<std::string, std::uint64_t>, std::string> flips;
      std::set<std::string> flipped_nodes;
      for (std::uint64_t r = 0; r < k && gap > 0; ++r) {
        auto dist = bfs_dist(core_graph, cores[r], current);
        for (const std::string& u : cores) {
          if (gap == 0) break;
          if (current.count(u) || u == cores[r]) continue;
          if (hops->at(u) != base_core->at(u)) continue;  // already rerouted
          if (flipped_nodes.count(u)) continue;           // one flip per switch
          const std::string& best = hops->at(u)[r];
          std::uint64_t best_dist = dist.at(best);
          for (const std::string& v : core_graph.adj.at(u)) {
            if (v == best || current.count(v)) continue;
            auto dit = dist.find(v);
            if (dit != dist.end() && dit->second == best_dist) {
              flips.emplace(std::make_pair(u, r), v);
              flipped_nodes.insert(u);
              --gap;
              break;
            }
          }
        }
      }
      if (gap == 0) {
        removed = current;
        tie_flips = std::move(flips);
        found = true;
      }
    }
    if (!found) return std::nullopt;

    auto new_routes = route(removed);
    if (!new_routes.has_value()) return std::nullopt;
    for (const auto& [key, hop] : tie_flips) {
      (*new_routes)[key.first][key.second] = hop;
    }
    return std::make_tuple(std::move(g), std::move(*base_routes),
                           std::move(*new_routes));
  };

  std::optional<std::tuple<Graph, HopTable, HopTable>> built;
  for (std::uint64_t variant = 0; variant < 16 && !built.has_value(); ++variant) {
    built = attempt_build(params.seed + variant * 0x51ed270b6ae4ccdbULL);
  }
  if (!built.has_value()) {
    throw ModelError("bench: could not realize the requested number of updating "
                     "switches; try another seed or size");
  }
  Graph& g = std::get<0>(*built);
  HopTable& base_routes = std::get<1>(*built);
  HopTable& new_routes = std::get<2>(*built);

  // Assemble the network file.
  NetworkFile net;
  net.space = PacketSpace({PacketField{"dst", dsts}});
  net.topo.world = "WORLD";
  net.topo.drop = "DROP";
  net.topo.ports = {"WORLD", "DROP"};
  for (const auto& [node, nbrs] : g.adj) {
    net.topo.switches.push_back(node);
    for (const std::string& nbr : nbrs) {
      net.topo.ports.push_back(link_port(nbr, node));
      net.topo.inport.emplace_back(link_port(nbr, node), node);
      net.topo.outport.emplace_back(node, link_port(node, nbr));
    }
  }
  for (std::uint64_t r = 0; r < k; ++r) {
    std::string in = "in:" + gateways[r];
    net.topo.ports.push_back(in);
    net.topo.ingress.push_back(in);
    net.topo.inport.emplace_back(in, gateways[r]);
  }
  std::sort(net.topo.switches.begin(), net.topo.switches.end());
  std::sort(net.topo.ports.begin(), net.topo.ports.end());
  std::sort(net.topo.ingress.begin(), net.topo.ingress.end());
  std::sort(net.topo.inport.begin(), net.topo.inport.end());
  std::sort(net.topo.outport.begin(), net.topo.outport.end());

  std::map<std::string, std::uint64_t> gateway_region;
  for (std::uint64_t r = 0; r < k; ++r) gateway_region[gateways[r]] = r;

  auto build_policy = [&](const std::map<std::string, std::vector<std::string>>& routes,
                          bool drop_at_gateways) {
    NetworkPolicy policy;
    for (const auto& [node, nbrs] : g.adj) {
      SwitchPolicy sp;
      std::vector<std::string> in_ports;
      for (const std::string& nbr : nbrs) in_ports.push_back(link_port(nbr, node));
      auto git = gateway_region.find(node);
      if (git != gateway_region.end()) in_ports.push_back("in:" + node);
      std::sort(in_ports.begin(), in_ports.end());

      // Removed switches keep their pre-removal routes; they simply stop
      // receiving traffic once everyone else has rerouted.
      const std::vector<std::string>* hops = nullptr;
      auto rit = routes.find(node);
      if (rit != routes.end()) {
        hops = &rit->second;
      } else {
        hops = &base_routes.at(node);
      }
      for (const std::string& in : in_ports) {
        for (std::uint64_t r = 0; r < k; ++r) {
          Rule rule;
          rule.key = in + "|" + dsts[r];
          rule.in_port = in;
          rule.guard = {FieldAssignment{0, static_cast<std::int32_t>(r)}};
          if (git != gateway_region.end() && git->second == r) {
            rule.out_port = drop_at_gateways ? net.topo.drop : net.topo.world;
          } else {
            rule.out_port = link_port(node, (*hops)[r]);
          }
          sp.rules.push_back(rule);
        }
      }
      policy.set(node, sp);
    }
    return policy;
  };

  net.policies.emplace("initial", build_policy(base_routes, false));
  net.policies.emplace("final", build_policy(new_routes, params.impossible));

  std::ostringstream spec;
  spec << "G (";
  for (std::uint64_t r = 0; r < k; ++r) {
    if (r) spec << " & ";
    spec << "(dst = " << dsts[r] << " -> F port = WORLD)";
  }
  spec << ")";

  BenchInstance instance;
  instance.net = std::move(net);
  instance.spec_text = spec.str();
  return instance;
}

}  // namespace netupdate
