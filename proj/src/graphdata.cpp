#include "fedaux/graphdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <queue>
#include <stdexcept>

#include "json.hpp"

namespace fedaux {

namespace {

void warn(const std::string& msg) { std::cerr << "[warn] " << msg << "\n"; }

}  // namespace

void Graph::validate_and_normalize() {
  if (n < 1) throw std::invalid_argument("graph: n must be >= 1");
  if (num_classes < 1) throw std::invalid_argument("graph: num_classes must be >= 1");
  if (features.rows() != n) throw std::invalid_argument("graph: features row count != n");
  if (features.cols() < 1) throw std::invalid_argument("graph: feature dimension must be >= 1");
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("graph: labels length != n");
  for (int y : labels)
    if (y < 0 || y >= num_classes)
      throw std::invalid_argument("graph: label out of range [0, num_classes)");

  int self_loops = 0;
  std::vector<std::pair<int, int>> cleaned;
  cleaned.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw std::invalid_argument("graph: edge endpoint out of range");
    if (u == v) {
      ++self_loops;
      continue;
    }
    if (u > v) std::swap(u, v);
    cleaned.emplace_back(u, v);
  }
  std::sort(cleaned.begin(), cleaned.end());
  size_t before = cleaned.size();
  cleaned.erase(std::unique(cleaned.begin(), cleaned.end()), cleaned.end());
  if (self_loops > 0) warn("graph: dropped " + std::to_string(self_loops) + " self-loop(s)");
  if (cleaned.size() < before)
    warn("graph: deduplicated " + std::to_string(before - cleaned.size()) + " edge(s)");
  edges = std::move(cleaned);
}

std::vector<std::vector<int>> Graph::adjacency_list() const {
  std::vector<std::vector<int>> adj(n);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

void SbmConfig::validate() const {
  if (nodes < 1) throw std::invalid_argument("sbm: nodes must be >= 1");
  if (blocks < 1 || nodes % blocks != 0)
    throw std::invalid_argument("sbm: blocks must divide nodes");
  if (blocks_per_group < 1 || blocks % blocks_per_group != 0)
    throw std::invalid_argument("sbm: blocks_per_group must divide blocks");
  if (num_labels != groups())
    throw std::invalid_argument("sbm: num_labels must equal blocks / blocks_per_group");
  if (num_labels < 2) throw std::invalid_argument("sbm: need at least 2 label groups");
  if (p_inter < 0.0 || p_inter > 1.0)
    throw std::invalid_argument("sbm: p_inter out of [0, 1]");
  double p_max = p_intra_step * groups();
  if (p_intra_step <= 0.0 || p_max > 1.0)
    throw std::invalid_argument("sbm: p_intra_step out of range");
  if (label_fidelity <= 0.0 || label_fidelity > 1.0)
    throw std::invalid_argument("sbm: label_fidelity out of (0, 1]");
}

std::pair<Graph, Partition> gen_sbm(const SbmConfig& cfg, Rng& rng) {
  cfg.validate();
  int block_size = cfg.nodes / cfg.blocks;

  Graph g;
  g.n = cfg.nodes;
  g.num_classes = cfg.num_labels;
  g.labels.resize(cfg.nodes);

  // Labels first, then edges; the draw order is part of the determinism contract.
  for (int i = 0; i < cfg.nodes; ++i) {
    int block = i / block_size;
    int group = block / cfg.blocks_per_group;
    if (rng.uniform() < cfg.label_fidelity) {
      g.labels[i] = group;
    } else {
      int off = rng.uniform_int(cfg.num_labels - 1);
      g.labels[i] = off >= group ? off + 1 : off;
    }
  }
  g.features = Matrix(cfg.nodes, cfg.num_labels);
  for (int i = 0; i < cfg.nodes; ++i) g.features(i, g.labels[i]) = 1.0;

  for (int i = 0; i < cfg.nodes; ++i) {
    int bi = i / block_size;
    for (int j = i + 1; j < cfg.nodes; ++j) {
      int bj = j / block_size;
      double p = (bi == bj) ? cfg.p_intra_step * (bi / cfg.blocks_per_group + 1) : cfg.p_inter;
      if (rng.uniform() < p) g.edges.emplace_back(i, j);
    }
  }
  g.validate_and_normalize();

  Partition part;
  part.num_clients = cfg.blocks;
  part.assignment.resize(cfg.nodes);
  for (int i = 0; i < cfg.nodes; ++i) part.assignment[i] = i / block_size;
  return {std::move(g), std::move(part)};
}

namespace {

// BFS hop distances; -1 marks unreachable nodes.
std::vector<int> bfs_dist(const std::vector<std::vector<int>>& adj, int src) {
  std::vector<int> dist(adj.size(), -1);
  std::queue<int> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
  }
  return dist;
}

}  // namespace

Partition partition_graph(const Graph& g, int k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("partition: K must be >= 1");
  if (k > g.n) throw std::invalid_argument("partition: K exceeds node count");
  int n = g.n;
  Partition part;
  part.num_clients = k;
  part.assignment.assign(n, -1);
  if (k == 1) {
    std::fill(part.assignment.begin(), part.assignment.end(), 0);
    return part;
  }

  auto adj = g.adjacency_list();
  const long long inf = std::numeric_limits<long long>::max();

  // Farthest-first seeds with a double-sweep start so path-like graphs get
  // endpoint seeds regardless of the initial draw. Unreachable distance counts
  // as infinite, which naturally spreads seeds over disconnected components.
  std::vector<int> seeds;
  {
    int s0 = rng.uniform_int(n);
    auto d0 = bfs_dist(adj, s0);
    int best = s0;
    long long best_d = -1;
    for (int v = 0; v < n; ++v) {
      long long dv = d0[v] < 0 ? inf : d0[v];
      if (dv > best_d) {
        best_d = dv;
        best = v;
      }
    }
    seeds.push_back(best);
  }
  std::vector<long long> min_dist(n, inf);
  while (static_cast<int>(seeds.size()) < k) {
    auto d = bfs_dist(adj, seeds.back());
    for (int v = 0; v < n; ++v) {
      long long dv = d[v] < 0 ? inf : d[v];
      min_dist[v] = std::min(min_dist[v], dv);
    }
    int best = -1;
    long long best_d = -1;
    for (int v = 0; v < n; ++v) {
      if (min_dist[v] > best_d) {
        best_d = min_dist[v];
        best = v;
      }
    }
    seeds.push_back(best);
  }

  int cap = static_cast<int>(std::ceil(1.05 * n / k));
  std::vector<int> sizes(k, 0);
  // gain[v][c]: edges from v into the current set of client c.
  std::vector<std::vector<int>> gain(n, std::vector<int>(k, 0));

  auto assign = [&](int v, int c) {
    part.assignment[v] = c;
    ++sizes[c];
    for (int u : adj[v]) ++gain[u][c];
  };
  for (int c = 0; c < k; ++c) assign(seeds[c], c);

  int unassigned = n - k;
  int turn = 0;
  while (unassigned > 0) {
    int c = turn % k;
    ++turn;
    if (sizes[c] >= cap) continue;
    int best = -1, best_gain = -1;
    for (int v = 0; v < n; ++v) {
      if (part.assignment[v] >= 0) continue;
      if (gain[v][c] > best_gain) {
        best_gain = gain[v][c];
        best = v;
      }
    }
    if (best < 0) break;
    assign(best, c);
    --unassigned;
  }

  // One refinement sweep: move boundary nodes that strictly reduce the cut,
  // respecting the balance cap and never emptying a client.
  for (int v = 0; v < n; ++v) {
    int c = part.assignment[v];
    if (sizes[c] <= 1) continue;
    int best_c = c;
    int best_gain = gain[v][c];
    for (int c2 = 0; c2 < k; ++c2) {
      if (c2 == c || sizes[c2] >= cap) continue;
      if (gain[v][c2] > best_gain) {
        best_gain = gain[v][c2];
        best_c = c2;
      }
    }
    if (best_c != c) {
      part.assignment[v] = best_c;
      --sizes[c];
      ++sizes[best_c];
      for (int u : adj[v]) {
        --gain[u][c];
        ++gain[u][best_c];
      }
    }
  }
  return part;
}

std::vector<ClientSubgraph> build_subgraphs(const Graph& g, const Partition& p) {
  if (static_cast<int>(p.assignment.size()) != g.n)
    throw std::invalid_argument("build_subgraphs: assignment length != n");
  int k = p.num_clients;
  for (int a : p.assignment)
    if (a < 0 || a >= k) throw std::invalid_argument("build_subgraphs: client id out of range");

  std::vector<ClientSubgraph> subs(k);
  std::vector<int> local_id(g.n, -1);
  for (int i = 0; i < g.n; ++i) subs[p.assignment[i]].node_ids.push_back(i);

  for (int c = 0; c < k; ++c) {
    ClientSubgraph& s = subs[c];
    s.client_id = c;
    int m = static_cast<int>(s.node_ids.size());
    if (m == 0) throw std::invalid_argument("build_subgraphs: client " + std::to_string(c) + " is empty");
    for (int j = 0; j < m; ++j) local_id[s.node_ids[j]] = j;
    s.local.n = m;
    s.local.num_classes = g.num_classes;
    s.local.features = Matrix(m, g.features.cols());
    s.local.labels.resize(m);
    for (int j = 0; j < m; ++j) {
      int gi = s.node_ids[j];
      s.local.labels[j] = g.labels[gi];
      for (int f = 0; f < g.features.cols(); ++f) s.local.features(j, f) = g.features(gi, f);
    }
  }
  for (auto [u, v] : g.edges) {
    if (p.assignment[u] == p.assignment[v])
      subs[p.assignment[u]].local.edges.emplace_back(local_id[u], local_id[v]);
  }
  for (auto& s : subs) s.local.validate_and_normalize();
  return subs;
}

ClientSubgraph split(const ClientSubgraph& sub, const std::array<double, 3>& ratios, Rng& rng) {
  for (double r : ratios)
    if (r < 0.0) throw std::invalid_argument("split: negative ratio");
  double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split: ratios must sum to 1");

  ClientSubgraph out = sub;
  int n = sub.local.n;
  out.train_mask.assign(n, 0);
  out.val_mask.assign(n, 0);
  out.test_mask.assign(n, 0);
  if (n < 3) {
    warn("split: client " + std::to_string(sub.client_id) + " has " + std::to_string(n) +
         " node(s); using all for training");
    std::fill(out.train_mask.begin(), out.train_mask.end(), 1);
    return out;
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);

  int counts[3];
  counts[0] = static_cast<int>(std::floor(ratios[0] * n + 1e-9));
  counts[1] = static_cast<int>(std::floor(ratios[1] * n + 1e-9));
  counts[2] = n - counts[0] - counts[1];
  // Every requested slice gets at least one node; steal from the largest.
  for (int s = 0; s < 3; ++s) {
    if (ratios[s] > 0.0 && counts[s] == 0) {
      int donor = 0;
      for (int t = 1; t < 3; ++t)
        if (counts[t] > counts[donor]) donor = t;
      --counts[donor];
      ++counts[s];
    }
  }

  int pos = 0;
  for (int i = 0; i < counts[0]; ++i) out.train_mask[order[pos++]] = 1;
  for (int i = 0; i < counts[1]; ++i) out.val_mask[order[pos++]] = 1;
  for (int i = 0; i < counts[2]; ++i) out.test_mask[order[pos++]] = 1;
  return out;
}

namespace {

using nlohmann::ordered_json;

ordered_json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

void write_file(const ordered_json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

Graph load_graph(const std::string& path) {
  ordered_json j = parse_file(path);
  Graph g;
  try {
    if (!j.contains("n")) throw std::runtime_error("missing field 'n'");
    if (!j.contains("num_classes")) throw std::runtime_error("missing field 'num_classes'");
    if (!j.contains("edges")) throw std::runtime_error("missing field 'edges'");
    if (!j.contains("features")) throw std::runtime_error("missing field 'features'");
    if (!j.contains("labels")) throw std::runtime_error("missing field 'labels'");
    g.n = j.at("n").get<int>();
    g.num_classes = j.at("num_classes").get<int>();
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2)
        throw std::runtime_error("field 'edges': entries must be [u, v] pairs");
      g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    const auto& feats = j.at("features");
    if (!feats.is_array() || static_cast<int>(feats.size()) != g.n)
      throw std::runtime_error("field 'features': need one row per node");
    int d = feats.empty() ? 0 : static_cast<int>(feats[0].size());
    g.features = Matrix(g.n, d);
    for (int i = 0; i < g.n; ++i) {
      if (static_cast<int>(feats[i].size()) != d)
        throw std::runtime_error("field 'features': ragged rows");
      for (int f = 0; f < d; ++f) g.features(i, f) = feats[i][f].get<double>();
    }
    for (const auto& y : j.at("labels")) g.labels.push_back(y.get<int>());
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error("graph file " + path + ": " + e.what());
  }
  try {
    g.validate_and_normalize();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("graph file " + path + ": " + e.what());
  }
  return g;
}

void save_graph(const Graph& g, const std::string& path) {
  ordered_json j;
  j["n"] = g.n;
  j["num_classes"] = g.num_classes;
  ordered_json edges = ordered_json::array();
  for (auto [u, v] : g.edges) edges.push_back({u, v});
  j["edges"] = std::move(edges);
  ordered_json feats = ordered_json::array();
  for (int i = 0; i < g.n; ++i) {
    ordered_json row = ordered_json::array();
    for (int f = 0; f < g.features.cols(); ++f) row.push_back(g.features(i, f));
    feats.push_back(std::move(row));
  }
  j["features"] = std::move(feats);
  j["labels"] = g.labels;
  write_file(j, path);
}

Partition load_partition(const std::string& path, int expected_nodes) {
  ordered_json j = parse_file(path);
  if (!j.contains("assignment"))
    throw std::runtime_error("partition file " + path + ": missing field 'assignment'");
  Partition p;
  for (const auto& a : j.at("assignment")) p.assignment.push_back(a.get<int>());
  if (expected_nodes >= 0 && static_cast<int>(p.assignment.size()) != expected_nodes)
    throw std::runtime_error("partition file " + path + ": assignment length != node count");
  int maxc = -1;
  for (int a : p.assignment) {
    if (a < 0) throw std::runtime_error("partition file " + path + ": negative client id");
    maxc = std::max(maxc, a);
  }
  p.num_clients = maxc + 1;
  return p;
}

void save_partition(const Partition& p, const std::string& path) {
  ordered_json j;
  j["assignment"] = p.assignment;
  write_file(j, path);
}

}  // namespace fedaux
